#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "atlas/design.hpp"
#include "atlas/errors.hpp"

namespace atlas {

/// Undirected vertex-coloured graph in compressed adjacency form. Colour
/// values order the initial cells.
class ColoredGraph {
 public:
  ColoredGraph() = default;
  ColoredGraph(std::vector<std::uint32_t> colors, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

  std::size_t order() const { return colors_.size(); }
  std::size_t edge_count() const { return targets_.size() / 2; }
  const std::vector<std::uint32_t>& colors() const { return colors_; }
  std::span<const std::uint32_t> neighbours(std::uint32_t v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  bool adjacent(std::uint32_t a, std::uint32_t b) const;

  /// Same graph with vertex v renamed to perm[v].
  ColoredGraph relabeled(const Permutation& perm) const;

 private:
  std::vector<std::uint32_t> colors_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;  // sorted per vertex
};

/// Points 0..v-1 (colour 0) and blocks v..v+b-1 (colour 1), joined by incidence.
ColoredGraph encode_design(const IncidenceStructure& design);
ColoredGraph encode_graph(const UGraph& graph);

struct CanonOptions {
  std::size_t max_vertices = 10'000;
  std::uint64_t max_nodes = 2'000'000;  // search-tree nodes before giving up
};

struct CanonicalForm {
  std::vector<std::uint8_t> bytes;        // colour profile then canonically relabelled edges
  std::vector<std::uint32_t> labeling;    // labeling[v] = canonical position of v
  std::vector<Permutation> generators;    // automorphisms found by the search
  Integer aut_order;                      // product of first-path orbit lengths
  std::uint64_t nodes = 0;

  std::string digest() const;  // SHA-256, hex
};

/// Canonical labelling by individualisation-refinement: equitable refinement,
/// target cell the first smallest non-singleton cell, pruning by refinement
/// traces and by automorphisms.
CanonicalForm canonical_form(const ColoredGraph& graph, const CanonOptions& options = {});

std::string sha256_hex(std::span<const std::uint8_t> bytes);

struct AutReport {
  Integer order;                // of the automorphism group acting on points
  bool orbit_product_agrees = false;  // matches the search's own count
  bool contains_construction = true;  // every supplied generator preserves the blocks
  std::vector<Permutation> point_generators;
};

/// Automorphism group of a design on its points. `construction` lists point
/// permutations that must be automorphisms (the constructing group's image).
AutReport aut_order_report(const IncidenceStructure& design, std::span<const Permutation> construction = {},
                           const CanonOptions& options = {});
/// Same, from a canonical form of encode_design(design) computed earlier.
AutReport aut_order_report(const IncidenceStructure& design, const CanonicalForm& form,
                           std::span<const Permutation> construction = {});

/// Automorphism group of a graph; checks the search count against a BSGS.
AutReport aut_order_report(const UGraph& graph, const CanonOptions& options = {});
AutReport aut_order_report(const UGraph& graph, const CanonicalForm& form);

struct IsoClasses {
  std::vector<std::vector<std::size_t>> classes;  // indices into the input, each class sorted
  std::size_t unresolved_buckets = 0;             // buckets whose members could not all be canonised
  std::size_t min_count = 0, max_count = 0;       // equal unless something is unresolved
};

/// Partition by isomorphism: bucket by invariants (parameters, intersection
/// sizes, degrees in the square of the incidence graph), then compare
/// canonical forms inside buckets with more than one member. The result does
/// not depend on input order.
IsoClasses iso_classes(std::span<const IncidenceStructure> designs, const CanonOptions& options = {});

/// Same, with the canonical digest supplied by the caller (e.g. from a cache).
/// `digest` may throw BudgetExceeded to mark a member unresolved.
using DigestFn = std::function<std::string(std::size_t index)>;
IsoClasses iso_classes(std::span<const IncidenceStructure> designs, const DigestFn& digest);

}  // namespace atlas
