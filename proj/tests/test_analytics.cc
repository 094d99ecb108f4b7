#include "doctest.h"

#include <cmath>
#include <set>

#include "atlas/analytics.hpp"
#include "atlas/m11.hpp"
#include "atlas/subgroup_atlas.hpp"

using namespace atlas;

namespace {

struct Fixture {
  SubgroupLattice lattice{PermGroup(m11_generators())};
  std::vector<SubgroupClass> classes = enumerate_subgroup_classes(PermGroup(m11_generators()));

  GroupAction action(std::uint64_t order) {
    for (const auto& c : classes)
      if (c.order == order) return coset_action(lattice.shared_index(), c.representative);
    throw Error("no such class");
  }

  // Block system with the given (k, b) and the largest t among unions of
  // orbits of the classes of order stabilizer_order.
  IncidenceStructure find(GroupAction& omega2, std::uint64_t stabilizer_order, std::size_t k, std::uint64_t b) {
    DesignSweep sweep(omega2);
    SweepOptions opts;
    opts.block_size = k;
    for (const auto& c : classes)
      if (c.order == stabilizer_order) sweep.add_stabilizer(c.representative, 0, opts);
    std::optional<IncidenceStructure> best;
    std::size_t best_t = 0;
    for (const auto& seed : sweep.seeds()) {
      if (seed.b != b) continue;
      IncidenceStructure d = sweep.build(seed);
      const std::size_t t = max_t_lambda(d, 5).t;
      if (!best || t > best_t) {
        best = std::move(d);
        best_t = t;
      }
    }
    if (!best) throw Error("no such design");
    return *best;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

UGraph triangular(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  UGraph g(pairs.size());
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      auto [p, q] = pairs[a];
      auto [r, s] = pairs[b];
      if (p == r || p == s || q == r || q == s) g.add_edge(a, b);
    }
  return g;
}

UGraph cycle(std::size_t n) {
  UGraph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

// Oracle: common neighbours from explicit neighbour sets.
std::optional<SrgParameters> brute_force_srg(const UGraph& g) {
  const std::size_t v = g.order();
  std::vector<std::set<std::size_t>> nb(v);
  for (std::size_t a = 0; a < v; ++a)
    for (std::size_t b = 0; b < v; ++b)
      if (g.adjacent(a, b)) nb[a].insert(b);
  std::set<std::size_t> adj, non;
  for (std::size_t a = 0; a < v; ++a)
    for (std::size_t b = a + 1; b < v; ++b) {
      std::size_t c = 0;
      for (auto x : nb[a]) c += nb[b].count(x);
      (g.adjacent(a, b) ? adj : non).insert(c);
    }
  std::set<std::size_t> degrees;
  for (const auto& s : nb) degrees.insert(s.size());
  if (degrees.size() != 1 || adj.size() != 1 || non.size() != 1) return std::nullopt;
  return SrgParameters{v, *degrees.begin(), *adj.begin(), *non.begin()};
}

// Oracle: coverage of every t-subset by explicit subset tests.
bool brute_force_is_t_design(const IncidenceStructure& d, std::size_t t, std::uint64_t lambda) {
  std::vector<Point> pick(t);
  bool ok = true;
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (!ok) return;
    if (depth == t) {
      PointMask m = PointMask::of(pick);
      std::uint64_t c = 0;
      for (const auto& blk : d.blocks) c += (blk & m) == m;
      ok = c == lambda;
      return;
    }
    for (std::size_t p = start; p < d.v; ++p) {
      pick[depth] = static_cast<Point>(p);
      self(self, p + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return ok;
}

// Oracle: multiplicities in floating point.
std::vector<std::pair<std::uint64_t, std::uint64_t>> float_feasibility(std::uint64_t v, std::uint64_t k) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t l = 0; l < k; ++l)
    for (std::uint64_t m = 1; m <= k; ++m) {
      if (k * (k - l - 1) != (v - k - 1) * m) continue;
      const double d = std::sqrt(double((double(l) - double(m)) * (double(l) - double(m)) + 4.0 * double(k - m)));
      const double e = 2.0 * double(k) + double(v - 1) * (double(l) - double(m));
      const double f = 0.5 * (double(v - 1) - e / d), g = 0.5 * (double(v - 1) + e / d);
      if (f > 0.5 && g > 0.5 && std::abs(f - std::round(f)) < 1e-9 && std::abs(g - std::round(g)) < 1e-9)
        out.emplace_back(l, m);
    }
  return out;
}

}  // namespace

TEST_CASE("strongest t for designs from the group") {
  auto& f = fixture();
  GroupAction a11 = f.action(720);
  IncidenceStructure steiner = f.find(a11, 120, 5, 66);
  auto p = max_t_lambda(steiner, 5);
  CHECK(p.t == 4);
  CHECK(p.lambda == 1);
  CHECK(p.lambdas == std::vector<std::uint64_t>{66, 30, 12, 4, 1});
  CHECK(brute_force_is_t_design(steiner, 4, 1));
  CHECK_FALSE(brute_force_is_t_design(steiner, 5, 0));

  GroupAction a12 = f.action(660);
  IncidenceStructure d12 = f.find(a12, 10, 6, 792);
  p = max_t_lambda(d12, 5);
  CHECK(p.t == 5);
  CHECK(p.lambda == 6);
  CHECK(brute_force_is_t_design(d12, 5, 6));

  GroupAction a22 = f.action(360);
  IncidenceStructure d22 = f.find(a22, 10, 7, 792);
  p = max_t_lambda(d22, 5);
  CHECK(p.t == 3);
  CHECK(p.lambda == 18);
  CHECK(p.lambdas.at(1) == 252);
  CHECK(p.lambdas.at(2) == 72);
  CHECK(brute_force_is_t_design(d22, 3, 18));

  // Capped below the true strength.
  CHECK(max_t_lambda(steiner, 2).t == 2);

  IncidenceStructure lopsided;
  lopsided.v = 3;
  lopsided.k = 2;
  lopsided.blocks = {PointMask::of(std::vector<Point>{0, 1})};
  CHECK_THROWS_AS(max_t_lambda(lopsided, 2), Error);
}

TEST_CASE("lambda cascade") {
  auto c = lambda_cascade(4, 11, 5, 1);
  CHECK(c.integral);
  CHECK(c.lambdas == std::vector<Integer>{66, 30, 12, 4, 1});
  c = lambda_cascade(3, 22, 7, 18);
  CHECK(c.integral);
  CHECK(c.lambdas[1] == 252);
  CHECK(c.lambdas[2] == 72);
  CHECK(lambda_cascade(2, 7, 3, 1).lambdas.back() == 1);
  CHECK_FALSE(lambda_cascade(2, 8, 3, 1).integral);
  CHECK(lambda_cascade(3, 12, 6, 2).lambdas[0] == 22);
}

TEST_CASE("intersection numbers") {
  auto& f = fixture();
  GroupAction a12 = f.action(660);
  IncidenceStructure d = f.find(a12, 360, 6, 22);
  auto ip = intersection_numbers(d);
  std::map<std::size_t, std::uint64_t> oracle;
  for (std::size_t i = 0; i < d.b(); ++i)
    for (std::size_t j = i + 1; j < d.b(); ++j) {
      std::size_t c = 0;
      for (Point p = 0; p < d.v; ++p) c += d.blocks[i].test(p) && d.blocks[j].test(p);
      ++oracle[c];
    }
  CHECK(ip.counts == oracle);
  CHECK(ip.quasi_symmetric);
  CHECK(ip.counts.size() <= 2);
  CHECK(ip.x == oracle.begin()->first);
  CHECK(ip.y == oracle.rbegin()->first);

  IncidenceStructure disjoint{4, 2, {PointMask::of(std::vector<Point>{0, 1}), PointMask::of(std::vector<Point>{2, 3})}};
  CHECK(intersection_numbers(disjoint).counts.count(0) == 1);
  IncidenceStructure single{4, 4, {PointMask::below(4)}};
  CHECK(intersection_numbers(single).counts.empty());
  CHECK_THROWS_AS(intersection_numbers(d, 10), BudgetExceeded);
}

TEST_CASE("strong regularity") {
  auto t11 = srg_check(triangular(11));
  REQUIRE(t11.ok());
  CHECK(t11.parameters == SrgParameters{55, 18, 9, 4});
  CHECK(srg_check(triangular(12)).parameters == SrgParameters{66, 20, 10, 4});
  CHECK(srg_check(cycle(5)).parameters == SrgParameters{5, 2, 0, 1});
  CHECK(srg_check(cycle(6)).kind == SrgVerdict::Kind::not_strongly_regular);

  UGraph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  CHECK(srg_check(path).kind == SrgVerdict::Kind::not_regular);
  CHECK(srg_check(UGraph(4)).kind == SrgVerdict::Kind::degenerate);
  CHECK(srg_check(UGraph(4).complement()).kind == SrgVerdict::Kind::degenerate);
  UGraph two_triangles(6);
  for (std::size_t base : {0u, 3u})
    for (std::size_t i = 0; i < 3; ++i) two_triangles.add_edge(base + i, base + (i + 1) % 3);
  CHECK(srg_check(two_triangles).kind == SrgVerdict::Kind::degenerate);
  CHECK(srg_check(two_triangles.complement()).kind == SrgVerdict::Kind::degenerate);

  for (const UGraph& g : {triangular(6), triangular(7), cycle(5), cycle(7), triangular(5).complement()}) {
    auto verdict = srg_check(g);
    auto oracle = brute_force_srg(g);
    CHECK(verdict.ok() == oracle.has_value());
    if (oracle) CHECK(verdict.parameters == *oracle);
  }
}

TEST_CASE("SRG feasibility") {
  auto has = [](const auto& list, std::uint64_t l, std::uint64_t m) {
    return std::find(list.begin(), list.end(), std::pair<std::uint64_t, std::uint64_t>{l, m}) != list.end();
  };
  CHECK(has(srg_feasibility(55, 18), 9, 4));
  CHECK(has(srg_feasibility(330, 63), 24, 9));
  CHECK(has(srg_feasibility(5, 2), 0, 1));
  CHECK(has(srg_feasibility(13, 6), 2, 3));
  CHECK(srg_feasibility(25, 8) == std::vector<std::pair<std::uint64_t, std::uint64_t>>{{3, 2}});
  for (std::uint64_t v = 5; v <= 80; ++v)
    for (std::uint64_t k = 1; k + 1 < v; ++k) {
      CAPTURE(v);
      CAPTURE(k);
      auto exact = srg_feasibility(v, k);
      auto approx = float_feasibility(v, k);
      // The float oracle misses conference graphs (irrational eigenvalues
      // with integral multiplicities); add them back.
      for (auto pr : exact)
        if (std::find(approx.begin(), approx.end(), pr) == approx.end()) {
          auto [l, m] = pr;
          CHECK(2 * k + (v - 1) * l == (v - 1) * m);
        }
      for (auto pr : approx) CHECK(has(exact, pr.first, pr.second));
    }
}

TEST_CASE("analytics JSON") {
  auto& f = fixture();
  GroupAction a12 = f.action(660);
  IncidenceStructure d = f.find(a12, 360, 6, 22);
  auto a = analyze_design(d, default_t_cap(d.v));
  auto j = analytics_to_json(a);
  CHECK(j["t"] == 3);
  CHECK(j["lambda"] == 2);
  CHECK(j["r"] == 11);
  CHECK(j["quasi_symmetric"] == true);
  CHECK(j["srg"].is_null());
  j = analytics_to_json(a, SrgParameters{55, 18, 9, 4});
  CHECK(j["srg"]["mu"] == 4);
}
