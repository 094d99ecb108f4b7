#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "atlas/errors.hpp"
#include "atlas/permutation.hpp"

namespace atlas {

/// Orbit of a point together with a transversal: `witness(q)` maps the start
/// point onto q.
class Orbit {
 public:
  Orbit() = default;
  Orbit(std::size_t degree, Point start);

  Point start() const { return points_.front(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  bool contains(Point q) const { return index_[q] >= 0; }
  std::size_t index_of(Point q) const { return static_cast<std::size_t>(index_[q]); }
  const Permutation& witness(Point q) const { return transversal_[static_cast<std::size_t>(index_[q])]; }
  const Permutation& witness_at(std::size_t i) const { return transversal_[i]; }
  const Permutation& inverse_witness_at(std::size_t i) const { return inverse_transversal_[i]; }

  /// Extends the orbit to closure under `gens`. Existing entries are kept.
  void close(std::span<const Permutation> gens);

 private:
  std::vector<Point> points_;
  std::vector<std::int64_t> index_;
  std::vector<Permutation> transversal_;
  std::vector<Permutation> inverse_transversal_;
};

/// Permutation group held as a base and strong generating set, built by
/// deterministic Schreier-Sims. Immutable after construction.
///
/// Base selection: the optional `base_prefix` first, then repeatedly the
/// first point moved by a generator that fixes the current base. Base points
/// fixed by the whole group are dropped.
class PermGroup {
 public:
  struct Level {
    Point base_point;
    Orbit orbit;
    std::vector<std::size_t> generator_ids;  // indices into strong_generators()
  };

  PermGroup() = default;
  explicit PermGroup(std::vector<Permutation> generators, std::span<const Point> base_prefix = {});
  static PermGroup trivial(std::size_t degree);

  std::size_t degree() const { return degree_; }
  const std::vector<Permutation>& generators() const { return generators_; }
  const std::vector<Permutation>& strong_generators() const { return strong_; }
  const std::vector<Level>& levels() const { return levels_; }
  std::vector<Point> base() const;
  std::vector<std::size_t> fundamental_orbit_lengths() const;

  Integer order() const;
  std::uint64_t order_u64() const { return to_u64(order()); }
  bool is_trivial() const { return levels_.empty(); }

  /// Residue after sifting through the chain and the level where it stopped
  /// (levels().size() if it passed every level).
  std::pair<Permutation, std::size_t> sift(const Permutation& g, std::size_t from_level = 0) const;
  bool contains(const Permutation& g) const;
  bool contains_group(const PermGroup& other) const;

  /// Visits every element in rank order. Throws BudgetExceeded above `cap`.
  void for_each_element(const std::function<void(const Permutation&)>& visit,
                        std::uint64_t cap = 10'000'000) const;

  /// Same group with a base starting with `prefix`.
  PermGroup with_base(std::span<const Point> prefix) const;

 private:
  void build(std::span<const Point> base_prefix);
  void rebuild_level(std::size_t l);

  std::size_t degree_ = 0;
  std::vector<Permutation> generators_;
  std::vector<Permutation> strong_;
  std::vector<Level> levels_;
};

Orbit orbit_of(const PermGroup& group, Point point);

/// Orbits of the group on {0..degree-1}, each sorted, ordered by minimal point.
std::vector<std::vector<Point>> orbit_partition(const PermGroup& group);
std::vector<std::vector<Point>> orbit_partition(std::size_t degree, std::span<const Permutation> gens);

bool is_transitive(const PermGroup& group);

PermGroup point_stabilizer(const PermGroup& group, Point point);

/// Stabilizer of a set of points by backtracking over the stabilizer chain,
/// with the set's points leading the base and orbit pruning by the part of
/// the stabilizer already found. An empty set yields the whole group.
PermGroup setwise_stabilizer(const PermGroup& group, std::span<const Point> pointset);

/// Reference implementation that filters every group element. Throws
/// BudgetExceeded when the group order exceeds `cap`.
PermGroup setwise_stabilizer_by_enumeration(const PermGroup& group, std::span<const Point> pointset,
                                            std::uint64_t cap = 100'000);

/// Smallest normal subgroup of `group` containing `elements`.
PermGroup normal_closure(const PermGroup& group, std::span<const Permutation> elements);
PermGroup derived_subgroup(const PermGroup& group);
/// Number of derived-series steps until the series stabilises, and whether it
/// ends in the trivial group.
std::pair<std::size_t, bool> derived_series(const PermGroup& group);

/// Element order frequencies. Throws BudgetExceeded above `cap`.
OrderCounts element_order_counts(const PermGroup& group, std::uint64_t cap = 1'000'000);

/// Element g with H^g = g^-1 H g = K, if one exists. H and K must be
/// subgroups of `group`; the search enumerates `group` and is bounded by `cap`.
std::optional<Permutation> are_conjugate(const PermGroup& group, const PermGroup& H, const PermGroup& K,
                                         std::uint64_t cap = 1'000'000);

/// Largest t for which the group is t-transitive on its domain. The group on
/// a single point is defined to have transitivity degree 0.
std::size_t transitivity_degree(const PermGroup& group);

}  // namespace atlas
