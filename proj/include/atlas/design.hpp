#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atlas/action.hpp"

namespace atlas {

/// Set of points below kCapacity, two machine words.
class PointMask {
 public:
  static constexpr std::size_t kCapacity = 128;

  PointMask() = default;
  static PointMask of(std::span<const Point> points);
  static PointMask below(std::size_t n);  // {0..n-1}

  void set(Point p) { w_[p >> 6] |= std::uint64_t{1} << (p & 63); }
  bool test(Point p) const { return (w_[p >> 6] >> (p & 63)) & 1; }
  std::size_t count() const { return static_cast<std::size_t>(std::popcount(w_[0]) + std::popcount(w_[1])); }
  bool empty() const { return (w_[0] | w_[1]) == 0; }
  std::uint64_t word(std::size_t i) const { return w_[i]; }

  PointMask& operator^=(const PointMask& o) {
    w_[0] ^= o.w_[0];
    w_[1] ^= o.w_[1];
    return *this;
  }
  PointMask& operator|=(const PointMask& o) {
    w_[0] |= o.w_[0];
    w_[1] |= o.w_[1];
    return *this;
  }
  friend PointMask operator&(PointMask a, const PointMask& b) {
    a.w_[0] &= b.w_[0];
    a.w_[1] &= b.w_[1];
    return a;
  }
  friend bool operator==(const PointMask&, const PointMask&) = default;

  /// Order of the sorted point lists, compared lexicographically.
  bool lex_less(const PointMask& o) const {
    for (std::size_t i = 0; i < 2; ++i)
      if (std::uint64_t d = w_[i] ^ o.w_[i]) return (w_[i] >> std::countr_zero(d)) & 1;
    return false;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < 2; ++i)
      for (std::uint64_t w = w_[i]; w; w &= w - 1) f(static_cast<Point>(i * 64 + std::countr_zero(w)));
  }
  std::vector<Point> points() const;
  PointMask image(const Permutation& g) const;
  std::size_t hash() const { return (w_[0] * 0x9e3779b97f4a7c15ull) ^ (w_[1] + (w_[0] >> 17)); }

 private:
  std::array<std::uint64_t, 2> w_{};
};

struct PointMaskHash {
  std::size_t operator()(const PointMask& m) const noexcept { return m.hash(); }
};

struct LexLess {
  bool operator()(const PointMask& a, const PointMask& b) const { return a.lex_less(b); }
};

/// Where a block system came from: the Ω1 point stabilizer G_α, the Ω2
/// action, and the G_α-orbits on Ω2 whose union is the base block.
struct Provenance {
  std::size_t stabilizer_class = 0;
  std::uint64_t stabilizer_order = 0;
  std::size_t point_class = 0;
  std::vector<std::size_t> orbit_subset;
  std::uint64_t merged = 1;  // orbit subsets seen that produce this block system

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct IncidenceStructure {
  std::size_t v = 0;
  std::size_t k = 0;
  std::vector<PointMask> blocks;  // distinct, in lex order
  bool degenerate = false;        // the single-block 1-(n,n,1) from Δ2 = Ω2
  Provenance provenance;

  std::size_t b() const { return blocks.size(); }
  /// Blocks through each point.
  std::vector<std::size_t> replication() const;
};

/// Undirected simple graph with dense bit rows.
class UGraph {
 public:
  UGraph() = default;
  explicit UGraph(std::size_t v) : v_(v), words_((v + 63) / 64), rows_(v * words_, 0) {}

  std::size_t order() const { return v_; }
  std::size_t words() const { return words_; }
  void add_edge(std::size_t a, std::size_t b) {
    add_arc(a, b);
    add_arc(b, a);
  }
  void add_arc(std::size_t a, std::size_t b) { rows_[a * words_ + (b >> 6)] |= std::uint64_t{1} << (b & 63); }
  bool is_symmetric() const;
  bool has_loops() const;
  bool adjacent(std::size_t a, std::size_t b) const { return (rows_[a * words_ + (b >> 6)] >> (b & 63)) & 1; }
  std::span<const std::uint64_t> row(std::size_t a) const { return {rows_.data() + a * words_, words_}; }
  std::size_t degree(std::size_t a) const;
  std::vector<std::size_t> neighbours(std::size_t a) const;
  UGraph complement() const;

 private:
  std::size_t v_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;
};

PointMask orbit_union(const std::vector<std::vector<Point>>& orbits, std::span<const std::size_t> subset);

/// Images of `base` under `group`, sorted. Throws BudgetExceeded past `cap`.
std::vector<PointMask> block_orbit(const PermGroup& group, const PointMask& base, std::uint64_t cap = 1'000'000);

/// Design with blocks the images of the union of the chosen orbits. `orbits`
/// are the orbits of some G_α on the points of `omega2`.
IncidenceStructure build_design(const GroupAction& omega2, const std::vector<std::vector<Point>>& orbits,
                                std::span<const std::size_t> subset);
IncidenceStructure build_design(const GroupAction& omega1, const GroupAction& omega2, std::size_t alpha,
                                std::span<const std::size_t> subset);

struct Thm1Parameters {
  std::uint64_t n = 0, k = 0, r = 0, b = 0;
  friend bool operator==(const Thm1Parameters&, const Thm1Parameters&) = default;
};

/// (n, k, r, b) from the group data alone: b = m|G_α|/|G_Δ2| and
/// r = |G_α|/|G_Δ2| · Σ|αG_δi| with δ_i a representative of each chosen orbit.
Thm1Parameters thm1_parameters(const GroupAction& omega2, const PermGroup& stabilizer,
                               const std::vector<std::vector<Point>>& orbits, std::span<const std::size_t> subset);
Thm1Parameters thm1_parameters(const GroupAction& omega1, const GroupAction& omega2, std::size_t alpha,
                               std::span<const std::size_t> subset);

struct SweepOptions {
  std::size_t max_suborbits = 24;             // 2^s cap for unrestricted sweeps
  std::optional<std::size_t> block_size;      // only unions of exactly this many points
  std::optional<std::uint64_t> block_count;   // only block systems with this many blocks
  std::uint64_t subset_budget = 50'000'000;   // unions examined when block_size is set
};

/// One block system found by a sweep, identified by its least block.
struct DesignSeed {
  PointMask least_block;
  std::size_t k = 0;
  std::uint64_t b = 0;
  Provenance provenance;  // the first orbit subset that produced it
};

/// Enumerates block systems {Δ2 g} with Δ2 a nonempty proper union of
/// G_α-orbits on Ω2, for any number of stabilizers G_α, merging systems
/// reached more than once. Below 25 points every subset of Ω2 gets a slot
/// in a dense table, so each block system is traversed once.
class DesignSweep {
 public:
  DesignSweep(const GroupAction& omega2, std::size_t point_class = 0);
  DesignSweep(GroupAction&&, std::size_t = 0) = delete;  // keeps a pointer to the action

  void add_stabilizer(const PermGroup& stabilizer, std::size_t class_id, const SweepOptions& options = {});

  /// Seeds in discovery order. With a block_count filter, systems of other
  /// sizes may be missing; with only a block_size filter, none are.
  const std::vector<DesignSeed>& seeds() const { return seeds_; }
  bool truncated() const { return truncated_; }
  std::uint64_t subsets_examined() const { return examined_; }

  IncidenceStructure build(const DesignSeed& seed) const;

 private:
  void record(const PointMask& block, const PermGroup& stabilizer, std::size_t class_id,
              const std::function<std::vector<std::size_t>()>& subset, const SweepOptions& options);

  const GroupAction* omega2_;
  std::size_t point_class_;
  std::size_t n_;
  std::vector<DesignSeed> seeds_;
  std::unordered_map<PointMask, std::size_t, PointMaskHash> by_least_;
  std::vector<std::uint32_t> dense_;                        // seed id + 1 for every subset, n < 25
  std::vector<std::array<std::array<std::uint32_t, 256>, 3>> byte_images_;  // per generator
  std::unordered_map<PointMask, std::size_t, PointMaskHash> local_;  // invariant unions of the current G_α
  std::vector<Permutation> local_generators_;
  bool truncated_ = false;
  std::uint64_t examined_ = 0;
};

std::vector<DesignSeed> enumerate_designs(const GroupAction& omega2, const PermGroup& stabilizer,
                                          const SweepOptions& options = {});

/// Graph on the points of `omega` joining x and y when y lies in the union
/// of the chosen suborbits of α carried to x. Rejected (nullopt) unless the
/// subset avoids {α} and is closed under pairing.
std::optional<UGraph> build_graph_candidate(const GroupAction& omega, std::size_t alpha,
                                            const std::vector<std::vector<Point>>& orbits,
                                            std::span<const std::size_t> subset);

/// `v b k` then one block per line.
std::string format_design(const IncidenceStructure& design);
IncidenceStructure parse_design(std::string_view text);

}  // namespace atlas
