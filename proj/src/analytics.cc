#include "atlas/analytics.hpp"

#include <algorithm>
#include <numeric>

namespace atlas {

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

Integer binomial_big(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  Integer out = 1;
  for (std::uint64_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

std::uint64_t isqrt(std::uint64_t x) {
  std::uint64_t r = 0;
  for (std::uint64_t bit = std::uint64_t{1} << 62; bit; bit >>= 2) {
    if (x >= r + bit) {
      x -= r + bit;
      r = (r >> 1) + bit;
    } else {
      r >>= 1;
    }
  }
  return r;
}

/// Coverage count of every t-subset, indexed in colex order.
std::vector<std::uint64_t> coverage(const IncidenceStructure& d, std::size_t t) {
  std::vector<std::vector<std::uint64_t>> c(d.v + 1, std::vector<std::uint64_t>(t + 1, 0));
  for (std::size_t n = 0; n <= d.v; ++n)
    for (std::size_t r = 0; r <= t; ++r) c[n][r] = binomial(n, r);
  std::vector<std::uint64_t> counts(c[d.v][t], 0);
  std::vector<std::size_t> idx(t);
  for (const auto& block : d.blocks) {
    const std::vector<Point> pts = block.points();
    if (pts.size() < t) continue;
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::uint64_t rank = 0;
      for (std::size_t i = 0; i < t; ++i) rank += c[pts[idx[i]]][i + 1];
      ++counts[rank];
      std::size_t i = t;
      while (i > 0 && idx[i - 1] == pts.size() - t + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < t; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return counts;
}

}  // namespace

TDesignProfile max_t_lambda(const IncidenceStructure& design, std::size_t t_cap) {
  TDesignProfile p;
  p.lambdas.push_back(design.b());
  const auto rep = design.replication();
  if (rep.empty() || std::any_of(rep.begin(), rep.end(), [&](std::size_t r) { return r != rep[0]; }))
    throw Error("structure is not a 1-design: replication numbers differ");
  p.t = 1;
  p.lambda = rep[0];
  p.lambdas.push_back(rep[0]);
  for (std::size_t t = 2; t <= std::min(t_cap, design.k); ++t) {
    const auto counts = coverage(design, t);
    if (std::any_of(counts.begin(), counts.end(), [&](std::uint64_t c) { return c != counts[0]; })) break;
    p.t = t;
    p.lambda = counts[0];
    p.lambdas.push_back(counts[0]);
  }
  return p;
}

LambdaCascade lambda_cascade(std::size_t t, std::size_t v, std::size_t k, const Integer& lambda) {
  if (k > v || t > k) throw Error("lambda_cascade: need t <= k <= v");
  LambdaCascade out;
  out.lambdas.resize(t + 1);
  for (std::size_t s = 0; s <= t; ++s) {
    const Integer num = lambda * binomial_big(v - s, t - s);
    const Integer den = binomial_big(k - s, t - s);
    if (num % den != 0) out.integral = false;
    out.lambdas[s] = num / den;
  }
  return out;
}

IntersectionProfile intersection_numbers(const IncidenceStructure& design, std::size_t max_blocks) {
  if (design.b() > max_blocks)
    throw BudgetExceeded("intersection numbers of " + std::to_string(design.b()) + " blocks exceed cap " +
                         std::to_string(max_blocks));
  IntersectionProfile p;
  const auto& blocks = design.blocks;
  std::vector<std::uint64_t> hist(design.k + 1, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j) ++hist[(blocks[i] & blocks[j]).count()];
  for (std::size_t s = 0; s < hist.size(); ++s)
    if (hist[s]) p.counts[s] = hist[s];
  if (!p.counts.empty()) {
    p.x = p.counts.begin()->first;
    p.y = p.counts.rbegin()->first;
    p.quasi_symmetric = p.counts.size() <= 2;
  }
  return p;
}

SrgVerdict srg_check(const UGraph& graph) {
  SrgVerdict out;
  const std::size_t v = graph.order();
  if (v == 0) return out;
  const std::size_t k = graph.degree(0);
  for (std::size_t a = 1; a < v; ++a)
    if (graph.degree(a) != k) return out;
  out.parameters.v = v;
  out.parameters.k = k;
  if (k == 0 || k == v - 1) {
    out.kind = SrgVerdict::Kind::degenerate;
    return out;
  }
  std::optional<std::uint64_t> lambda, mu;
  out.kind = SrgVerdict::Kind::not_strongly_regular;
  for (std::size_t a = 0; a < v; ++a) {
    auto ra = graph.row(a);
    for (std::size_t b = a + 1; b < v; ++b) {
      auto rb = graph.row(b);
      std::uint64_t common = 0;
      for (std::size_t w = 0; w < ra.size(); ++w) common += static_cast<std::uint64_t>(std::popcount(ra[w] & rb[w]));
      auto& slot = graph.adjacent(a, b) ? lambda : mu;
      if (!slot) slot = common;
      else if (*slot != common) return out;
    }
  }
  out.parameters.lambda = lambda.value_or(0);
  out.parameters.mu = mu.value_or(0);
  const auto& p = out.parameters;
  if (p.k * (p.k - p.lambda - 1) != (p.v - p.k - 1) * p.mu) return out;
  out.kind = (p.mu == 0 || p.mu == p.k) ? SrgVerdict::Kind::degenerate : SrgVerdict::Kind::strongly_regular;
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> srg_feasibility(std::uint64_t v, std::uint64_t k) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  if (k == 0 || k + 1 >= v) return out;
  for (std::uint64_t lambda = 0; lambda < k; ++lambda)
    for (std::uint64_t mu = 1; mu <= k; ++mu) {
      if (k * (k - lambda - 1) != (v - k - 1) * mu) continue;
      // Eigenvalue multiplicities ((v-1) ∓ e/√D)/2 with D = (λ-μ)² + 4(k-μ)
      // and e = 2k + (v-1)(λ-μ).
      const std::int64_t diff = static_cast<std::int64_t>(lambda) - static_cast<std::int64_t>(mu);
      const auto disc = static_cast<std::uint64_t>(diff * diff) + 4 * (k - mu);
      const std::int64_t e = 2 * static_cast<std::int64_t>(k) + static_cast<std::int64_t>(v - 1) * diff;
      const std::uint64_t root = isqrt(disc);
      bool feasible;
      if (root * root == disc) {
        if (root == 0 || e % static_cast<std::int64_t>(root) != 0) continue;
        const std::int64_t q = e / static_cast<std::int64_t>(root);
        const std::int64_t f2 = static_cast<std::int64_t>(v - 1) - q, g2 = static_cast<std::int64_t>(v - 1) + q;
        feasible = f2 > 0 && g2 > 0 && f2 % 2 == 0 && g2 % 2 == 0;
      } else {
        feasible = e == 0 && (v - 1) % 2 == 0;  // conference graphs
      }
      if (feasible) out.emplace_back(lambda, mu);
    }
  return out;
}

DesignAnalytics analyze_design(const IncidenceStructure& design, std::size_t t_cap,
                               std::size_t max_blocks_for_intersections) {
  DesignAnalytics a;
  a.v = design.v;
  a.b = design.b();
  a.k = design.k;
  a.profile = max_t_lambda(design, t_cap);
  a.r = a.profile.lambdas.at(1);
  if (a.b <= max_blocks_for_intersections) a.intersections = intersection_numbers(design, max_blocks_for_intersections);
  return a;
}

std::size_t default_t_cap(std::size_t v) { return v <= 22 ? 5 : 3; }

nlohmann::json analytics_to_json(const DesignAnalytics& a, const std::optional<SrgParameters>& srg) {
  nlohmann::json j = {{"v", a.v}, {"b", a.b}, {"k", a.k}, {"r", a.r}, {"t", a.profile.t}, {"lambda", a.profile.lambda}};
  if (a.intersections) {
    j["quasi_symmetric"] = a.intersections->quasi_symmetric;
    j["x"] = a.intersections->x;
    j["y"] = a.intersections->y;
  } else {
    j["quasi_symmetric"] = nullptr;
    j["x"] = nullptr;
    j["y"] = nullptr;
  }
  if (srg) j["srg"] = {{"k", srg->k}, {"lambda", srg->lambda}, {"mu", srg->mu}};
  else j["srg"] = nullptr;
  return j;
}

}  // namespace atlas
