#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "json.hpp"

#include "atlas/element_index.hpp"
#include "atlas/perm_group.hpp"

namespace atlas {

/// Right cosets of a subgroup. Coset 0 is the subgroup itself; the others
/// are numbered by the rank of their least element.
struct CosetTable {
  std::vector<std::uint32_t> coset_of_element;
  std::vector<ElementId> representatives;
};

CosetTable coset_table(const ElementIndex& group, const PermGroup& subgroup);

/// Transitive action of a source group on the right cosets of a subgroup.
/// Points are the cosets of coset_table().
class GroupAction {
 public:
  const PermGroup& source() const { return index_->group(); }
  const PermGroup& subgroup() const { return subgroup_; }
  std::uint64_t subgroup_order() const { return subgroup_order_; }
  std::size_t degree() const { return cosets_.representatives.size(); }
  const std::vector<Permutation>& image_generators() const { return image_generators_; }
  const PermGroup& image_group() const { return image_group_; }
  std::uint64_t kernel_order() const { return index_->size() / image_group_.order_u64(); }
  const ElementIndex& index() const { return *index_; }

  /// Image of an element of the source group.
  Permutation image_of(const Permutation& g) const;
  Permutation image_of(ElementId g) const;

  /// Coset containing a source element, and the least-rank element of a coset.
  std::size_t coset_of(ElementId g) const { return cosets_.coset_of_element[g]; }
  ElementId representative(std::size_t coset) const { return cosets_.representatives[coset]; }

  /// Generators (in the source group) of the stabilizer of a point.
  std::vector<Permutation> stabilizer_generators(std::size_t point) const;

 private:
  friend GroupAction coset_action(std::shared_ptr<const ElementIndex>, const PermGroup&, std::size_t);

  std::shared_ptr<const ElementIndex> index_;
  PermGroup subgroup_;
  std::uint64_t subgroup_order_ = 0;
  CosetTable cosets_;
  std::vector<Permutation> image_generators_;
  PermGroup image_group_;
};

constexpr std::size_t kDefaultActionCap = 10'000;

GroupAction coset_action(std::shared_ptr<const ElementIndex> group, const PermGroup& subgroup,
                         std::size_t cap = kDefaultActionCap);
GroupAction coset_action(const PermGroup& group, const PermGroup& subgroup, std::size_t cap = kDefaultActionCap);

std::size_t transitivity_degree(const GroupAction& action);

/// Orbits on the points of `on` of the stabilizer of `alpha` in `from`,
/// ordered by least point. Both actions must share their source group.
std::vector<std::vector<Point>> suborbits(const GroupAction& from, std::size_t alpha, const GroupAction& on);
std::vector<std::vector<Point>> suborbits(const GroupAction& action, std::size_t alpha);

/// paired[i] is the index of the orbit paired with orbits[i]; self-paired
/// orbits map to themselves. `orbits` must be the suborbits of `alpha`.
std::vector<std::size_t> orbit_pairing(const GroupAction& action, std::size_t alpha,
                                       const std::vector<std::vector<Point>>& orbits);

nlohmann::json action_to_json(const GroupAction& action);

}  // namespace atlas
