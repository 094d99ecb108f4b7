#include "doctest.h"

#include <chrono>
#include <set>

#include "atlas/m11.hpp"
#include "atlas/srg_search.hpp"
#include "atlas/subgroup_atlas.hpp"

using namespace atlas;

namespace {

struct Fixture {
  SubgroupLattice lattice{PermGroup(m11_generators())};
  std::vector<SubgroupClass> classes = enumerate_subgroup_classes(PermGroup(m11_generators()));
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

std::vector<GroupAction> actions_of_degree(std::size_t degree) {
  auto& f = fixture();
  std::vector<GroupAction> out;
  for (const auto& c : f.classes)
    if (7920 / c.order == degree) out.push_back(coset_action(f.lattice.shared_index(), c.representative));
  return out;
}

// Oracle: every pairing-closed union, built as a graph and checked directly.
std::set<std::pair<SrgParameters, std::vector<std::size_t>>> brute_force(const GroupAction& action) {
  const auto orbits = suborbits(action, 0);
  const auto paired = orbit_pairing(action, 0, orbits);
  std::set<std::pair<SrgParameters, std::vector<std::size_t>>> out;
  const std::size_t r = orbits.size();
  for (std::uint64_t mask = 1; mask < (1ull << (r - 1)); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 1; i < r; ++i)
      if (mask >> (i - 1) & 1) subset.push_back(i);
    bool closed = true;
    for (std::size_t i : subset) closed &= std::find(subset.begin(), subset.end(), paired[i]) != subset.end();
    if (!closed) continue;
    auto g = build_graph_candidate(action, 0, orbits, subset);
    REQUIRE(g);
    const auto verdict = srg_check(*g);
    if (!verdict.ok()) continue;
    const auto& p = verdict.parameters;
    if (2 * p.k > p.v - 1 || p.mu == 0 || p.mu == p.k) continue;
    out.emplace(p, subset);
  }
  return out;
}

}  // namespace

TEST_CASE("suborbit intersection numbers") {
  for (std::size_t degree : {11, 12, 55}) {
    for (const auto& action : actions_of_degree(degree)) {
      const SuborbitAlgebra a = suborbit_algebra(action);
      const std::size_t r = a.rank();
      for (std::size_t l = 0; l < r; ++l) {
        // Row sums are orbit sizes; p[l][0][j] is 1 exactly for the pair of l.
        for (std::size_t i = 0; i < r; ++i) {
          std::uint64_t row = 0;
          for (std::size_t j = 0; j < r; ++j) row += a.p[l][i * r + j];
          CHECK(row == a.orbits[i].size());
        }
        for (std::size_t j = 0; j < r; ++j) CHECK(a.p[l][j] == (j == a.paired[l] ? 1u : 0u));
      }
    }
  }
}

TEST_CASE("orbital graph search agrees with direct checking") {
  for (std::size_t degree : {11, 12, 22, 55, 66, 110, 132, 144}) {
    for (const auto& action : actions_of_degree(degree)) {
      std::set<std::pair<SrgParameters, std::vector<std::size_t>>> found;
      for (auto& c : srg_orbit_graphs(action)) {
        CHECK(c.parameters.k * (c.parameters.k - c.parameters.lambda - 1) ==
              (c.parameters.v - c.parameters.k - 1) * c.parameters.mu);
        found.emplace(c.parameters, c.orbit_subset);
      }
      CHECK(found == brute_force(action));
    }
  }
}

TEST_CASE("orbital graphs on 11 and 55 points") {
  CHECK(srg_orbit_graphs(actions_of_degree(11).at(0)).empty());
  auto on55 = srg_orbit_graphs(actions_of_degree(55).at(0));
  REQUIRE(on55.size() == 1);
  CHECK(on55[0].parameters == SrgParameters{55, 18, 9, 4});
}

TEST_CASE("orbital graph search budget") {
  SrgSearchOptions tight;
  tight.node_budget = 10;
  CHECK_THROWS_AS(srg_orbit_graphs(actions_of_degree(144).at(0), tight), BudgetExceeded);
}
