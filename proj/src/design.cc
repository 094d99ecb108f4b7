#include "atlas/design.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

namespace atlas {

PointMask PointMask::of(std::span<const Point> points) {
  PointMask m;
  for (Point p : points) {
    if (p >= kCapacity) throw Error("point " + std::to_string(p) + " beyond point-set capacity");
    m.set(p);
  }
  return m;
}

PointMask PointMask::below(std::size_t n) {
  if (n > kCapacity) throw Error("point-set capacity exceeded");
  PointMask m;
  for (Point p = 0; p < n; ++p) m.set(p);
  return m;
}

std::vector<Point> PointMask::points() const {
  std::vector<Point> out;
  for_each([&](Point p) { out.push_back(p); });
  return out;
}

PointMask PointMask::image(const Permutation& g) const {
  PointMask out;
  for_each([&](Point p) { out.set(g[p]); });
  return out;
}

std::vector<std::size_t> IncidenceStructure::replication() const {
  std::vector<std::size_t> r(v, 0);
  for (const auto& block : blocks) block.for_each([&](Point p) { ++r[p]; });
  return r;
}

std::size_t UGraph::degree(std::size_t a) const {
  std::size_t d = 0;
  for (auto w : row(a)) d += static_cast<std::size_t>(std::popcount(w));
  return d;
}

std::vector<std::size_t> UGraph::neighbours(std::size_t a) const {
  std::vector<std::size_t> out;
  auto r = row(a);
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::uint64_t w = r[i]; w; w &= w - 1) out.push_back(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
  return out;
}

bool UGraph::is_symmetric() const {
  for (std::size_t a = 0; a < v_; ++a)
    for (std::size_t b : neighbours(a))
      if (!adjacent(b, a)) return false;
  return true;
}

bool UGraph::has_loops() const {
  for (std::size_t a = 0; a < v_; ++a)
    if (adjacent(a, a)) return true;
  return false;
}

UGraph UGraph::complement() const {
  UGraph c(v_);
  for (std::size_t a = 0; a < v_; ++a)
    for (std::size_t b = 0; b < v_; ++b)
      if (a != b && !adjacent(a, b)) c.add_arc(a, b);
  return c;
}

namespace {

void check_subset(std::size_t orbit_count, std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error("empty orbit subset");
  std::vector<bool> seen(orbit_count, false);
  for (std::size_t i : subset) {
    if (i >= orbit_count) throw Error("orbit index " + std::to_string(i) + " out of range");
    if (seen[i]) throw Error("orbit index " + std::to_string(i) + " repeated");
    seen[i] = true;
  }
}

std::vector<Permutation> images_in(const GroupAction& action, const PermGroup& subgroup) {
  std::vector<Permutation> out;
  for (const auto& g : subgroup.generators()) out.push_back(action.image_of(g));
  return out;
}

bool lex_less32(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t d = a ^ b;
  return d && (a & d & (~d + 1));
}

}  // namespace

PointMask orbit_union(const std::vector<std::vector<Point>>& orbits, std::span<const std::size_t> subset) {
  check_subset(orbits.size(), subset);
  PointMask m;
  for (std::size_t i : subset) m |= PointMask::of(orbits[i]);
  return m;
}

std::vector<PointMask> block_orbit(const PermGroup& group, const PointMask& base, std::uint64_t cap) {
  std::unordered_set<PointMask, PointMaskHash> seen{base};
  std::vector<PointMask> out{base};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto& g : group.generators()) {
      PointMask img = out[i].image(g);
      if (seen.insert(img).second) {
        if (out.size() >= cap) throw BudgetExceeded("block orbit exceeds " + std::to_string(cap));
        out.push_back(img);
      }
    }
  std::sort(out.begin(), out.end(), LexLess{});
  return out;
}

IncidenceStructure build_design(const GroupAction& omega2, const std::vector<std::vector<Point>>& orbits,
                                std::span<const std::size_t> subset) {
  if (omega2.degree() > PointMask::kCapacity) throw Error("design on more than 128 points");
  const PointMask delta = orbit_union(orbits, subset);
  IncidenceStructure d;
  d.v = omega2.degree();
  d.k = delta.count();
  d.provenance.orbit_subset.assign(subset.begin(), subset.end());
  std::sort(d.provenance.orbit_subset.begin(), d.provenance.orbit_subset.end());
  if (d.k == d.v) {
    d.degenerate = true;
    d.blocks = {delta};
    return d;
  }
  d.blocks = block_orbit(omega2.image_group(), delta);
  return d;
}

IncidenceStructure build_design(const GroupAction& omega1, const GroupAction& omega2, std::size_t alpha,
                                std::span<const std::size_t> subset) {
  IncidenceStructure d = build_design(omega2, suborbits(omega1, alpha, omega2), subset);
  d.provenance.stabilizer_order = omega1.subgroup_order();
  return d;
}

Thm1Parameters thm1_parameters(const GroupAction& omega2, const PermGroup& stabilizer,
                               const std::vector<std::vector<Point>>& orbits, std::span<const std::size_t> subset) {
  const PointMask delta = orbit_union(orbits, subset);
  const ElementIndex& idx = omega2.index();
  Thm1Parameters p;
  p.n = omega2.degree();
  p.k = delta.count();
  if (p.k == p.n) {
    p.r = p.b = 1;
    return p;
  }
  const std::uint64_t g_alpha = stabilizer.order_u64();
  const std::uint64_t m = idx.size() / g_alpha;
  const std::vector<Point> pts = delta.points();
  const std::uint64_t g_delta = setwise_stabilizer(omega2.image_group(), pts).order_u64() * omega2.kernel_order();

  // Ω1 is realised as the cosets of G_α, with α the coset G_α itself.
  const CosetTable omega1 = coset_table(idx, stabilizer);
  const std::vector<ElementId> point_stabilizer = idx.elements_of(omega2.subgroup()).to_vector();
  std::uint64_t sum = 0;
  for (std::size_t i : subset) {
    // G_δ = r^-1 K r for δ the coset K r; count the cosets α g, g in G_δ.
    const ElementId r = omega2.representative(orbits[i].front());
    std::unordered_set<std::uint32_t> reached;
    for (ElementId x : point_stabilizer) reached.insert(omega1.coset_of_element[idx.conjugate(x, r)]);
    sum += reached.size();
  }
  if ((g_alpha * sum) % g_delta != 0 || (m * g_alpha) % g_delta != 0)
    throw Error("non-integral design parameters; inconsistent group data");
  p.r = g_alpha * sum / g_delta;
  p.b = m * g_alpha / g_delta;
  return p;
}

Thm1Parameters thm1_parameters(const GroupAction& omega1, const GroupAction& omega2, std::size_t alpha,
                               std::span<const std::size_t> subset) {
  PermGroup stabilizer(omega1.stabilizer_generators(alpha));
  return thm1_parameters(omega2, stabilizer, suborbits(omega1, alpha, omega2), subset);
}

DesignSweep::DesignSweep(const GroupAction& omega2, std::size_t point_class)
    : omega2_(&omega2), point_class_(point_class), n_(omega2.degree()) {
  if (n_ > PointMask::kCapacity) throw Error("design sweep on more than 128 points");
  if (n_ >= 25) return;
  dense_.assign(std::size_t{1} << n_, 0);
  for (const auto& g : omega2.image_generators()) {
    std::array<std::array<std::uint32_t, 256>, 3> table{};
    for (std::size_t byte = 0; byte < 3; ++byte)
      for (std::uint32_t value = 0; value < 256; ++value) {
        std::uint32_t img = 0;
        for (std::uint32_t bit = 0; bit < 8; ++bit) {
          const std::size_t p = byte * 8 + bit;
          if ((value >> bit) & 1 && p < n_) img |= std::uint32_t{1} << g[static_cast<Point>(p)];
        }
        table[byte][value] = img;
      }
    byte_images_.push_back(table);
  }
}

void DesignSweep::record(const PointMask& block, const PermGroup& stabilizer, std::size_t class_id,
                         const std::function<std::vector<std::size_t>()>& subset, const SweepOptions& options) {
  auto new_seed = [&](const PointMask& least, std::uint64_t b) {
    DesignSeed seed;
    seed.least_block = least;
    seed.k = block.count();
    seed.b = b;
    seed.provenance.stabilizer_class = class_id;
    seed.provenance.stabilizer_order = stabilizer.order_u64();
    seed.provenance.point_class = point_class_;
    seed.provenance.orbit_subset = subset();
    seeds_.push_back(std::move(seed));
    by_least_.emplace(least, seeds_.size() - 1);
    return seeds_.size() - 1;
  };

  if (!dense_.empty()) {
    const auto mask = static_cast<std::uint32_t>(block.word(0));
    if (std::uint32_t id = dense_[mask]) {
      ++seeds_[id - 1].provenance.merged;
      return;
    }
    const auto id = static_cast<std::uint32_t>(seeds_.size() + 1);
    std::vector<std::uint32_t> orbit{mask};
    dense_[mask] = id;
    std::uint32_t least = mask;
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (const auto& t : byte_images_) {
        const std::uint32_t m = orbit[i];
        const std::uint32_t img = t[0][m & 255] | t[1][(m >> 8) & 255] | t[2][(m >> 16) & 255];
        if (dense_[img]) continue;
        dense_[img] = id;
        orbit.push_back(img);
        if (lex_less32(img, least)) least = img;
      }
    PointMask least_mask;
    for (std::uint32_t w = least; w; w &= w - 1) least_mask.set(static_cast<Point>(std::countr_zero(w)));
    new_seed(least_mask, orbit.size());
    return;
  }

  if (auto it = local_.find(block); it != local_.end()) {
    ++seeds_[it->second].provenance.merged;
    return;
  }
  const PermGroup& image = omega2_->image_group();
  if (options.block_count) {
    const std::vector<Point> pts = block.points();
    const std::uint64_t b = image.order_u64() / setwise_stabilizer(image, pts).order_u64();
    if (b != *options.block_count) return;
  }
  std::vector<PointMask> orbit = block_orbit(image, block);
  const PointMask& least = orbit.front();
  std::size_t id;
  if (auto it = by_least_.find(least); it != by_least_.end()) {
    id = it->second;
    ++seeds_[id].provenance.merged;
  } else {
    id = new_seed(least, orbit.size());
  }
  // Other G_α-invariant members of the orbit will come up later in this sweep.
  for (const auto& member : orbit) {
    bool invariant = std::all_of(local_generators_.begin(), local_generators_.end(),
                                 [&](const Permutation& g) { return member.image(g) == member; });
    if (invariant) local_.emplace(member, id);
  }
}

void DesignSweep::add_stabilizer(const PermGroup& stabilizer, std::size_t class_id, const SweepOptions& options) {
  local_.clear();
  local_generators_ = images_in(*omega2_, stabilizer);
  const auto orbits = orbit_partition(n_, local_generators_);
  const std::size_t s = orbits.size();
  std::vector<PointMask> masks;
  for (const auto& o : orbits) masks.push_back(PointMask::of(o));

  if (!options.block_size) {
    if (s > options.max_suborbits || s >= 63)
      throw BudgetExceeded("orbit-subset sweep over s=" + std::to_string(s) + " orbits exceeds cap " +
                           std::to_string(options.max_suborbits));
    const std::uint64_t full = (std::uint64_t{1} << s) - 1;
    PointMask current;
    for (std::uint64_t i = 1; i <= full; ++i) {
      const auto flip = static_cast<std::size_t>(std::countr_zero(i));
      current ^= masks[flip];
      const std::uint64_t gray = i ^ (i >> 1);
      if (gray == full) continue;
      ++examined_;
      record(current, stabilizer, class_id, [&] {
        std::vector<std::size_t> subset;
        for (std::size_t j = 0; j < s; ++j)
          if ((gray >> j) & 1) subset.push_back(j);
        return subset;
      }, options);
    }
    return;
  }

  // Unions of exactly block_size points, depth first over the orbits.
  const std::size_t k = *options.block_size;
  if (k == 0 || k >= n_) return;
  std::vector<std::size_t> remaining(s + 1, 0);
  for (std::size_t i = s; i-- > 0;) remaining[i] = remaining[i + 1] + orbits[i].size();
  std::vector<std::size_t> chosen;
  PointMask current;
  bool stop = false;
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t i, std::size_t size) {
    if (stop) return;
    if (size == k) {
      if (++examined_ > options.subset_budget) {
        truncated_ = stop = true;
        return;
      }
      record(current, stabilizer, class_id, [&] { return chosen; }, options);
      return;
    }
    if (i == s || size + remaining[i] < k) return;
    if (size + orbits[i].size() <= k) {
      chosen.push_back(i);
      current ^= masks[i];
      dfs(i + 1, size + orbits[i].size());
      current ^= masks[i];
      chosen.pop_back();
    }
    dfs(i + 1, size);
  };
  dfs(0, 0);
}

IncidenceStructure DesignSweep::build(const DesignSeed& seed) const {
  IncidenceStructure d;
  d.v = n_;
  d.k = seed.k;
  d.blocks = block_orbit(omega2_->image_group(), seed.least_block);
  d.provenance = seed.provenance;
  return d;
}

std::vector<DesignSeed> enumerate_designs(const GroupAction& omega2, const PermGroup& stabilizer,
                                          const SweepOptions& options) {
  DesignSweep sweep(omega2);
  sweep.add_stabilizer(stabilizer, 0, options);
  return sweep.seeds();
}

std::optional<UGraph> build_graph_candidate(const GroupAction& omega, std::size_t alpha,
                                            const std::vector<std::vector<Point>>& orbits,
                                            std::span<const std::size_t> subset) {
  check_subset(orbits.size(), subset);
  const std::size_t n = omega.degree();
  std::vector<std::size_t> orbit_of(n, orbits.size());
  for (std::size_t i = 0; i < orbits.size(); ++i)
    for (Point p : orbits[i]) orbit_of.at(p) = i;
  std::vector<bool> chosen(orbits.size(), false);
  for (std::size_t i : subset) chosen[i] = true;
  if (chosen[orbit_of.at(alpha)]) return std::nullopt;
  const auto pairing = orbit_pairing(omega, alpha, orbits);
  for (std::size_t i : subset)
    if (!chosen[pairing[i]]) return std::nullopt;

  std::vector<Point> delta;
  for (std::size_t i : subset) delta.insert(delta.end(), orbits[i].begin(), orbits[i].end());
  Orbit transversal(n, static_cast<Point>(alpha));
  transversal.close(omega.image_generators());
  UGraph g(n);
  for (Point x = 0; x < n; ++x) {
    const Permutation& t = transversal.witness(x);
    for (Point y : delta) g.add_arc(x, t[y]);
  }
  if (!g.is_symmetric() || g.has_loops()) return std::nullopt;
  return g;
}

std::string format_design(const IncidenceStructure& design) {
  std::ostringstream out;
  out << design.v << ' ' << design.b() << ' ' << design.k << '\n';
  for (const auto& block : design.blocks) {
    bool first = true;
    block.for_each([&](Point p) {
      out << (first ? "" : " ") << p;
      first = false;
    });
    out << '\n';
  }
  return out.str();
}

IncidenceStructure parse_design(std::string_view text) {
  std::istringstream in{std::string(text)};
  IncidenceStructure d;
  std::size_t b = 0;
  if (!(in >> d.v >> b >> d.k)) throw ParseError("design header must be `v b k`");
  if (d.v > PointMask::kCapacity || d.k > d.v) throw ParseError("design header out of range");
  for (std::size_t i = 0; i < b; ++i) {
    PointMask block;
    for (std::size_t j = 0; j < d.k; ++j) {
      std::size_t p = 0;
      if (!(in >> p)) throw ParseError("design block " + std::to_string(i) + " is short");
      if (p >= d.v) throw ParseError("design point " + std::to_string(p) + " out of range");
      if (block.test(static_cast<Point>(p))) throw ParseError("design block repeats point " + std::to_string(p));
      block.set(static_cast<Point>(p));
    }
    d.blocks.push_back(block);
  }
  std::string trailing;
  if (in >> trailing) throw ParseError("trailing data after design blocks");
  std::sort(d.blocks.begin(), d.blocks.end(), LexLess{});
  if (std::adjacent_find(d.blocks.begin(), d.blocks.end()) != d.blocks.end()) throw ParseError("repeated block");
  d.degenerate = b == 1 && d.k == d.v;
  return d;
}

}  // namespace atlas
