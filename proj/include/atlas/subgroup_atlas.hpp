#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "atlas/element_index.hpp"
#include "atlas/perm_group.hpp"

namespace atlas {

struct Fingerprint {
  OrderCounts element_orders;
  std::size_t derived_length = 0;  // derived-series steps until it stabilises

  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

struct SubgroupClass {
  PermGroup representative;
  std::uint64_t order = 0;
  std::uint64_t index = 0;
  std::uint64_t class_size = 0;
  bool solvable = false;
  Fingerprint fingerprint;
  ElementSet elements;  // representative's elements in the ambient element table
};

struct LatticeLimits {
  std::uint64_t max_group_order = 100'000;
  std::uint64_t max_subgroups = 2'000'000;  // conjugates stored across all classes
};

/// Conjugacy classes of subgroups discovered so far. Every member of every
/// class is stored, so deduplication up to conjugacy is a hash lookup.
class SubgroupLattice {
 public:
  explicit SubgroupLattice(const PermGroup& group, LatticeLimits limits = {});

  const ElementIndex& index() const { return *index_; }
  std::shared_ptr<const ElementIndex> shared_index() const { return index_; }
  const std::vector<SubgroupClass>& classes() const { return classes_; }
  std::size_t subgroup_count() const { return known_.size(); }

  /// Class id of the subgroup with these elements, registering its class if new.
  std::size_t register_subgroup(const ElementSet& elements);
  std::optional<std::size_t> find(const ElementSet& elements) const;

  std::vector<ElementId> normalizer(std::size_t class_id) const;

  /// Classes of H' with H normal in H' of prime index, H the class representative.
  std::vector<std::size_t> cyclic_extensions(std::size_t class_id);

  /// Classes of perfect subgroups <x, y> with x a conjugacy class
  /// representative and y arbitrary, restricted to `target_orders`.
  std::vector<std::size_t> perfect_subgroups(const std::vector<std::uint64_t>& target_orders);

  /// Classes sorted by (order, fingerprint, lexicographically least member).
  std::vector<SubgroupClass> sorted_classes() const;

 private:
  std::shared_ptr<const ElementIndex> index_;
  LatticeLimits limits_;
  std::vector<std::vector<ElementId>> conjugation_maps_;  // one per group generator
  std::unordered_map<ElementSet, std::size_t, ElementSetHash> known_;
  std::vector<SubgroupClass> classes_;
};

/// All conjugacy classes of subgroups: cyclic extension from the trivial
/// group and from perfect subgroups, closed upward until nothing new appears.
std::vector<SubgroupClass> enumerate_subgroup_classes(const PermGroup& group, LatticeLimits limits = {});

/// One round of cyclic extension over a layer of classes.
std::vector<SubgroupClass> cyclic_extension_step(const PermGroup& group, const std::vector<SubgroupClass>& layer,
                                                 LatticeLimits limits = {});

std::vector<SubgroupClass> perfect_subgroup_search(const PermGroup& group,
                                                   const std::vector<std::uint64_t>& target_orders,
                                                   LatticeLimits limits = {});

struct AtlasRow {
  std::uint64_t order = 0;
  std::uint64_t index = 0;
  std::uint64_t multiplicity = 0;
  friend bool operator==(const AtlasRow&, const AtlasRow&) = default;
};

struct AtlasMismatch {
  std::uint64_t order = 0;
  std::uint64_t index = 0;
  std::uint64_t expected = 0;
  std::uint64_t computed = 0;
};

struct AtlasReport {
  std::size_t expected_classes = 0;
  std::size_t computed_classes = 0;
  std::vector<AtlasMismatch> mismatches;
  bool matches() const { return mismatches.empty(); }
};

std::vector<AtlasRow> atlas_rows(const std::vector<SubgroupClass>& classes);
AtlasReport verify_atlas(const std::vector<SubgroupClass>& classes, const std::vector<AtlasRow>& expected);

/// CSV with header `order,index,multiplicity`.
std::vector<AtlasRow> parse_atlas_csv(std::string_view text);

nlohmann::json atlas_to_json(const std::vector<SubgroupClass>& classes);

}  // namespace atlas
