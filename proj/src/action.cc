#include "atlas/action.hpp"

#include <algorithm>

namespace atlas {

CosetTable coset_table(const ElementIndex& group, const PermGroup& subgroup) {
  CosetTable t;
  const std::vector<ElementId> h = group.elements_of(subgroup).to_vector();
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  t.coset_of_element.assign(group.size(), unset);
  for (ElementId e = 0; e < group.size(); ++e) {
    if (t.coset_of_element[e] != unset) continue;
    const auto c = static_cast<std::uint32_t>(t.representatives.size());
    t.representatives.push_back(e);
    for (ElementId x : h) t.coset_of_element[group.multiply(x, e)] = c;
  }
  return t;
}

GroupAction coset_action(std::shared_ptr<const ElementIndex> group, const PermGroup& subgroup, std::size_t cap) {
  const ElementIndex& idx = *group;
  if (subgroup.degree() != idx.degree() || !idx.group().contains_group(subgroup))
    throw Error("coset_action: not a subgroup of the source group");
  const std::uint64_t h_order = subgroup.order_u64();
  const std::uint64_t index = idx.size() / h_order;
  if (index > cap)
    throw BudgetExceeded("coset action of degree " + std::to_string(index) + " exceeds cap " + std::to_string(cap));

  GroupAction a;
  a.index_ = std::move(group);
  a.subgroup_ = subgroup;
  a.subgroup_order_ = h_order;
  a.cosets_ = coset_table(idx, subgroup);
  for (const auto& g : idx.group().generators()) a.image_generators_.push_back(a.image_of(g));
  a.image_group_ = PermGroup(a.image_generators_);
  return a;
}

GroupAction coset_action(const PermGroup& group, const PermGroup& subgroup, std::size_t cap) {
  return coset_action(std::make_shared<const ElementIndex>(group), subgroup, cap);
}

Permutation GroupAction::image_of(ElementId g) const {
  std::vector<Point> images(degree());
  for (std::size_t c = 0; c < degree(); ++c)
    images[c] = cosets_.coset_of_element[index_->multiply(cosets_.representatives[c], g)];
  return Permutation::from_images(std::move(images));
}

Permutation GroupAction::image_of(const Permutation& g) const { return image_of(index_->rank(g)); }

std::vector<Permutation> GroupAction::stabilizer_generators(std::size_t point) const {
  // The stabilizer of H r is r^-1 H r.
  const Permutation r = index_->element(cosets_.representatives.at(point));
  std::vector<Permutation> gens;
  for (const auto& h : subgroup_.generators()) gens.push_back(h.conjugate_by(r));
  return gens;
}

std::size_t transitivity_degree(const GroupAction& action) { return transitivity_degree(action.image_group()); }

std::vector<std::vector<Point>> suborbits(const GroupAction& from, std::size_t alpha, const GroupAction& on) {
  if (&from.index() != &on.index() && from.source().generators() != on.source().generators())
    throw Error("suborbits: actions of different source groups");
  if (alpha >= from.degree()) throw Error("suborbits: point out of range");
  std::vector<Permutation> gens;
  for (const auto& g : from.stabilizer_generators(alpha)) gens.push_back(on.image_of(g));
  return orbit_partition(on.degree(), gens);
}

std::vector<std::vector<Point>> suborbits(const GroupAction& action, std::size_t alpha) {
  return suborbits(action, alpha, action);
}

std::vector<std::size_t> orbit_pairing(const GroupAction& action, std::size_t alpha,
                                       const std::vector<std::vector<Point>>& orbits) {
  std::vector<std::size_t> orbit_of_point(action.degree(), orbits.size());
  for (std::size_t i = 0; i < orbits.size(); ++i)
    for (Point p : orbits[i]) orbit_of_point.at(p) = i;
  if (std::count(orbit_of_point.begin(), orbit_of_point.end(), orbits.size()) != 0)
    throw Error("orbit_pairing: orbits do not partition the points");

  Orbit transversal(action.degree(), static_cast<Point>(alpha));
  transversal.close(action.image_generators());
  std::vector<std::size_t> paired(orbits.size());
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    // t maps alpha into the orbit; the paired orbit holds alpha t^-1.
    const Permutation& t = transversal.witness(orbits[i].front());
    paired[i] = orbit_of_point[t.inverse()[static_cast<Point>(alpha)]];
  }
  return paired;
}

nlohmann::json action_to_json(const GroupAction& action) {
  std::vector<std::size_t> sizes;
  for (const auto& orbit : suborbits(action, 0)) sizes.push_back(orbit.size());
  return {{"subgroup_order", action.subgroup_order()},
          {"index", action.index().size() / action.subgroup_order()},
          {"degree", action.degree()},
          {"transitivity_degree", transitivity_degree(action)},
          {"suborbit_sizes", sizes}};
}

}  // namespace atlas
