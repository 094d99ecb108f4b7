#pragma once

#include <cstdint>
#include <vector>

#include "atlas/action.hpp"
#include "atlas/analytics.hpp"
#include "atlas/design.hpp"

namespace atlas {

/// Intersection numbers of the suborbits of a transitive action:
/// p[l][i][j] = |O_i(α) ∩ O_j(δ_l)| for a fixed δ_l in O_l.
struct SuborbitAlgebra {
  std::vector<std::vector<Point>> orbits;  // suborbits of point 0, orbit 0 = {0}
  std::vector<std::size_t> paired;
  std::vector<std::vector<std::uint32_t>> p;  // p[l][i * rank + j]

  std::size_t rank() const { return orbits.size(); }
};

SuborbitAlgebra suborbit_algebra(const GroupAction& action);

struct SrgSearchOptions {
  bool up_to_complement = true;  // only valencies k <= (v-1)/2
  bool primitive_only = true;    // drop disjoint cliques and complete multipartite graphs
  std::uint64_t node_budget = 500'000'000;
};

struct SrgCandidate {
  SrgParameters parameters;
  std::vector<std::size_t> orbit_subset;  // indices into SuborbitAlgebra::orbits
  UGraph graph;
};

/// Every union of suborbits closed under pairing whose orbital graph is
/// strongly regular, with valency restricted to feasible parameter sets.
/// The test is exact: for l in the union the common neighbours of 0 and δ_l
/// must all equal λ, for l outside they must equal μ. Throws BudgetExceeded
/// past the node budget.
std::vector<SrgCandidate> srg_orbit_graphs(const GroupAction& action, const SrgSearchOptions& options = {});

}  // namespace atlas
