#include "atlas/srg_search.hpp"

#include <algorithm>

#include "atlas/perm_group.hpp"

namespace atlas {

SuborbitAlgebra suborbit_algebra(const GroupAction& action) {
  SuborbitAlgebra a;
  a.orbits = suborbits(action, 0);
  a.paired = orbit_pairing(action, 0, a.orbits);
  const std::size_t n = action.degree(), r = a.rank();
  std::vector<std::size_t> orbit_of(n);
  for (std::size_t i = 0; i < r; ++i)
    for (Point x : a.orbits[i]) orbit_of[x] = i;
  Orbit transversal(n, 0);
  transversal.close(action.image_generators());
  a.p.assign(r, std::vector<std::uint32_t>(r * r, 0));
  for (std::size_t l = 0; l < r; ++l) {
    const Permutation back = transversal.witness(a.orbits[l].front()).inverse();
    for (Point x = 0; x < n; ++x) ++a.p[l][orbit_of[x] * r + orbit_of[back[x]]];
  }
  return a;
}

namespace {

struct Target {
  std::uint64_t k;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // feasible (λ, μ)
  std::uint64_t bound;                                          // largest admissible common count
};

class UnionSearch {
 public:
  UnionSearch(const GroupAction& action, const SuborbitAlgebra& a, const SrgSearchOptions& options)
      : action_(action), a_(a), options_(options) {
    for (std::size_t i = 1; i < a.rank(); ++i)
      if (i <= a.paired[i]) {
        std::vector<std::size_t> unit{i};
        if (a.paired[i] != i) unit.push_back(a.paired[i]);
        std::size_t size = 0;
        for (std::size_t j : unit) size += a.orbits[j].size();
        units_.push_back(std::move(unit));
        sizes_.push_back(size);
      }
    suffix_.assign(units_.size() + 1, 0);
    for (std::size_t u = units_.size(); u-- > 0;) suffix_[u] = suffix_[u + 1] + sizes_[u];
  }

  void run(const Target& target, std::vector<SrgCandidate>& out) {
    target_ = &target;
    chosen_.clear();
    members_.clear();
    counts_.assign(a_.rank(), 0);
    dfs(0, 0, out);
  }

 private:
  void dfs(std::size_t u, std::uint64_t sum, std::vector<SrgCandidate>& out) {
    if (++nodes_ > options_.node_budget)
      throw BudgetExceeded("orbital graph search on " + std::to_string(action_.degree()) + " points exceeded " +
                           std::to_string(options_.node_budget) + " nodes");
    if (sum == target_->k) {
      check(out);
      return;
    }
    if (u == units_.size() || sum + suffix_[u] < target_->k) return;
    if (sum + sizes_[u] <= target_->k) {
      const std::vector<std::uint64_t> saved = counts_;
      const std::size_t before = members_.size();
      bool viable = true;
      for (std::size_t i : units_[u]) {
        add(i);
        members_.push_back(i);
      }
      for (std::size_t l = 1; l < a_.rank() && viable; ++l) viable = counts_[l] <= target_->bound;
      if (viable) {
        chosen_.push_back(u);
        dfs(u + 1, sum + sizes_[u], out);
        chosen_.pop_back();
      }
      members_.resize(before);
      counts_ = saved;
    }
    dfs(u + 1, sum, out);
  }

  // Adds orbit i to the union: counts[l] = Σ_{i,j in union} p[l][i][j].
  void add(std::size_t i) {
    const std::size_t r = a_.rank();
    for (std::size_t l = 0; l < r; ++l) {
      const auto& p = a_.p[l];
      std::uint64_t c = p[i * r + i];
      for (std::size_t j : members_) c += p[i * r + j] + p[j * r + i];
      counts_[l] += c;
    }
  }

  void check(std::vector<SrgCandidate>& out) {
    std::vector<bool> in(a_.rank(), false);
    for (std::size_t i : members_) in[i] = true;
    std::optional<std::uint64_t> lambda, mu;
    for (std::size_t l = 1; l < a_.rank(); ++l) {
      auto& slot = in[l] ? lambda : mu;
      if (!slot) slot = counts_[l];
      else if (*slot != counts_[l]) return;
    }
    if (!lambda || !mu) return;
    if (std::find(target_->pairs.begin(), target_->pairs.end(), std::make_pair(*lambda, *mu)) == target_->pairs.end())
      return;
    std::vector<std::size_t> subset = members_;
    std::sort(subset.begin(), subset.end());
    auto graph = build_graph_candidate(action_, 0, a_.orbits, subset);
    if (!graph) throw Error("pairing-closed union gave an asymmetric graph");
    const SrgVerdict verdict = srg_check(*graph);
    const SrgParameters expected{action_.degree(), target_->k, *lambda, *mu};
    if (verdict.kind != SrgVerdict::Kind::strongly_regular || verdict.parameters != expected)
      throw Error("structure constants disagree with the orbital graph");
    out.push_back({expected, std::move(subset), std::move(*graph)});
  }

  const GroupAction& action_;
  const SuborbitAlgebra& a_;
  SrgSearchOptions options_;
  std::vector<std::vector<std::size_t>> units_;
  std::vector<std::uint64_t> sizes_, suffix_;
  const Target* target_ = nullptr;
  std::vector<std::size_t> chosen_, members_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::vector<SrgCandidate> srg_orbit_graphs(const GroupAction& action, const SrgSearchOptions& options) {
  const std::uint64_t v = action.degree();
  std::vector<SrgCandidate> out;
  if (v < 3) return out;
  const SuborbitAlgebra algebra = suborbit_algebra(action);
  UnionSearch search(action, algebra, options);
  const std::uint64_t k_max = options.up_to_complement ? (v - 1) / 2 : v - 2;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    Target target{k, {}, 0};
    for (auto [lambda, mu] : srg_feasibility(v, k)) {
      if (options.primitive_only && (mu == 0 || mu == k)) continue;
      target.pairs.emplace_back(lambda, mu);
      target.bound = std::max({target.bound, lambda, mu});
    }
    if (!target.pairs.empty()) search.run(target, out);
  }
  return out;
}

}  // namespace atlas
