#include "atlas/perm_group.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_set>

namespace atlas {

Orbit::Orbit(std::size_t degree, Point start) : index_(degree, -1) {
  if (start >= degree) throw Error("orbit start point out of range");
  points_.push_back(start);
  index_[start] = 0;
  transversal_.emplace_back(degree);
  inverse_transversal_.emplace_back(degree);
}

void Orbit::close(std::span<const Permutation> gens) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (const auto& s : gens) {
      Point image = s[points_[i]];
      if (index_[image] >= 0) continue;
      index_[image] = static_cast<std::int64_t>(points_.size());
      points_.push_back(image);
      Permutation w = transversal_[i] * s;
      inverse_transversal_.push_back(w.inverse());
      transversal_.push_back(std::move(w));
    }
  }
}

PermGroup::PermGroup(std::vector<Permutation> generators, std::span<const Point> base_prefix)
    : generators_(std::move(generators)) {
  if (generators_.empty()) throw Error("a permutation group needs at least one generator");
  degree_ = generators_.front().degree();
  if (degree_ == 0) throw Error("permutation degree must be positive");
  for (const auto& g : generators_)
    if (g.degree() != degree_) throw Error("generators have different degrees");
  build(base_prefix);
}

PermGroup PermGroup::trivial(std::size_t degree) { return PermGroup({Permutation(degree)}); }

std::vector<Point> PermGroup::base() const {
  std::vector<Point> out;
  for (const auto& l : levels_) out.push_back(l.base_point);
  return out;
}

std::vector<std::size_t> PermGroup::fundamental_orbit_lengths() const {
  std::vector<std::size_t> out;
  for (const auto& l : levels_) out.push_back(l.orbit.size());
  return out;
}

Integer PermGroup::order() const {
  Integer result = 1;
  for (const auto& l : levels_) result *= l.orbit.size();
  return result;
}

void PermGroup::rebuild_level(std::size_t l) {
  Level& level = levels_[l];
  level.generator_ids.clear();
  std::vector<Permutation> gens;
  for (std::size_t id = 0; id < strong_.size(); ++id) {
    bool fixes = true;
    for (std::size_t j = 0; j < l && fixes; ++j) fixes = strong_[id][levels_[j].base_point] == levels_[j].base_point;
    if (fixes) {
      level.generator_ids.push_back(id);
      gens.push_back(strong_[id]);
    }
  }
  level.orbit = Orbit(degree_, level.base_point);
  level.orbit.close(gens);
}

void PermGroup::build(std::span<const Point> base_prefix) {
  std::unordered_set<Permutation> seen;
  for (const auto& g : generators_)
    if (!g.is_identity() && seen.insert(g).second) strong_.push_back(g);

  std::vector<Point> base;
  for (Point p : base_prefix) {
    if (p >= degree_) throw Error("base point out of range");
    if (std::find(base.begin(), base.end(), p) == base.end()) base.push_back(p);
  }
  for (const auto& s : strong_) {
    bool moves_base = std::any_of(base.begin(), base.end(), [&](Point b) { return s[b] != b; });
    if (!moves_base) base.push_back(s.first_moved_point());
  }
  levels_.clear();
  for (Point b : base) levels_.push_back(Level{b, Orbit(degree_, b), {}});
  for (std::size_t l = 0; l < levels_.size(); ++l) rebuild_level(l);

  // Deterministic Schreier-Sims: every Schreier generator of every level is
  // sifted through the levels below it.
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(levels_.size()) - 1;
  while (i >= 0) {
    bool extended = false;
    const std::size_t li = static_cast<std::size_t>(i);
    for (std::size_t idx = 0; idx < levels_[li].orbit.size() && !extended; ++idx) {
      const Point beta = levels_[li].orbit.points()[idx];
      const std::vector<std::size_t> gen_ids = levels_[li].generator_ids;
      for (std::size_t gid : gen_ids) {
        const Permutation& s = strong_[gid];
        const Point gamma = s[beta];
        Permutation h = levels_[li].orbit.witness_at(idx) * s *
                        levels_[li].orbit.inverse_witness_at(levels_[li].orbit.index_of(gamma));
        if (h.is_identity()) continue;
        auto [residue, j] = sift(h, li + 1);
        if (residue.is_identity()) continue;
        strong_.push_back(std::move(residue));
        if (j == levels_.size()) {
          Point b = strong_.back().first_moved_point();
          levels_.push_back(Level{b, Orbit(degree_, b), {}});
        }
        for (std::size_t l = 0; l <= j; ++l) {
          if (l <= li) {
            levels_[l].generator_ids.push_back(strong_.size() - 1);
          } else {
            rebuild_level(l);
          }
        }
        i = static_cast<std::ptrdiff_t>(j);
        extended = true;
        break;
      }
    }
    if (!extended) --i;
  }

  // Drop base points fixed by the whole group.
  std::vector<Level> kept;
  for (auto& level : levels_)
    if (level.orbit.size() > 1) kept.push_back(std::move(level));
  levels_ = std::move(kept);
}

std::pair<Permutation, std::size_t> PermGroup::sift(const Permutation& g, std::size_t from_level) const {
  if (g.degree() != degree_) throw Error("degree mismatch in sift");
  Permutation h = g;
  for (std::size_t l = from_level; l < levels_.size(); ++l) {
    const Point beta = h[levels_[l].base_point];
    if (!levels_[l].orbit.contains(beta)) return {std::move(h), l};
    h = h * levels_[l].orbit.inverse_witness_at(levels_[l].orbit.index_of(beta));
  }
  return {std::move(h), levels_.size()};
}

bool PermGroup::contains(const Permutation& g) const {
  if (g.degree() != degree_) return false;
  auto [residue, level] = sift(g);
  return level == levels_.size() && residue.is_identity();
}

bool PermGroup::contains_group(const PermGroup& other) const {
  return std::all_of(other.generators().begin(), other.generators().end(),
                     [&](const Permutation& g) { return contains(g); });
}

void PermGroup::for_each_element(const std::function<void(const Permutation&)>& visit, std::uint64_t cap) const {
  if (order() > cap) throw BudgetExceeded("group of order " + order().str() + " exceeds enumeration cap");
  std::function<void(std::size_t, const Permutation&)> rec = [&](std::size_t l, const Permutation& right) {
    if (l == levels_.size()) {
      visit(right);
      return;
    }
    const Orbit& orbit = levels_[l].orbit;
    for (std::size_t i = 0; i < orbit.size(); ++i) rec(l + 1, orbit.witness_at(i) * right);
  };
  rec(0, Permutation(degree_));
}

PermGroup PermGroup::with_base(std::span<const Point> prefix) const { return PermGroup(strong_.empty() ? generators_ : strong_, prefix); }

Orbit orbit_of(const PermGroup& group, Point point) {
  if (point >= group.degree()) throw Error("point " + std::to_string(point) + " out of range");
  Orbit orbit(group.degree(), point);
  orbit.close(group.generators());
  return orbit;
}

std::vector<std::vector<Point>> orbit_partition(std::size_t degree, std::span<const Permutation> gens) {
  std::vector<Point> parent(degree);
  std::iota(parent.begin(), parent.end(), Point{0});
  auto find = [&](Point x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& g : gens)
    for (Point x = 0; x < degree; ++x) {
      Point a = find(x), b = find(g[x]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<Point, std::vector<Point>> classes;
  for (Point x = 0; x < degree; ++x) classes[find(x)].push_back(x);
  std::vector<std::vector<Point>> out;
  for (auto& [root, members] : classes) out.push_back(std::move(members));
  return out;
}

std::vector<std::vector<Point>> orbit_partition(const PermGroup& group) {
  return orbit_partition(group.degree(), group.generators());
}

bool is_transitive(const PermGroup& group) { return orbit_of(group, 0).size() == group.degree(); }

PermGroup point_stabilizer(const PermGroup& group, Point point) {
  if (point >= group.degree()) throw Error("point " + std::to_string(point) + " out of range");
  const Point prefix[] = {point};
  PermGroup rebased = group.with_base(prefix);
  std::vector<Permutation> gens;
  for (const auto& s : rebased.strong_generators())
    if (s[point] == point) gens.push_back(s);
  if (gens.empty()) return PermGroup::trivial(group.degree());
  auto base = rebased.base();
  if (!base.empty() && base.front() == point) base.erase(base.begin());
  return PermGroup(std::move(gens), base);
}

namespace {

std::vector<bool> membership(std::size_t degree, std::span<const Point> pointset) {
  std::vector<bool> in(degree, false);
  for (Point p : pointset) {
    if (p >= degree) throw Error("point " + std::to_string(p) + " out of range");
    in[p] = true;
  }
  return in;
}

bool stabilizes(const Permutation& g, std::span<const Point> pointset, const std::vector<bool>& in) {
  return std::all_of(pointset.begin(), pointset.end(), [&](Point p) { return in[g[p]]; });
}

class SetStabilizerSearch {
 public:
  SetStabilizerSearch(const PermGroup& group, std::span<const Point> pointset)
      : group_(group), set_(pointset.begin(), pointset.end()), in_(membership(group.degree(), pointset)) {}

  PermGroup run() {
    const auto& levels = group_.levels();
    parent_.resize(group_.degree());
    std::iota(parent_.begin(), parent_.end(), Point{0});
    for (std::size_t i = levels.size(); i-- > 0;) {
      const Point b = levels[i].base_point;
      std::vector<Point> processed;
      for (Point gamma : levels[i].orbit.points()) {
        if (gamma == b || in_[gamma] != in_[b]) continue;
        if (find(gamma) == find(b)) continue;
        bool covered = std::any_of(processed.begin(), processed.end(), [&](Point p) { return find(p) == find(gamma); });
        if (covered) continue;
        processed.push_back(gamma);
        const Permutation& u = levels[i].orbit.witness(gamma);
        if (auto g = descend(i + 1, u)) add(*g);
      }
    }
    if (found_.empty()) return PermGroup::trivial(group_.degree());
    return PermGroup(found_);
  }

 private:
  std::optional<Permutation> descend(std::size_t l, const Permutation& suffix) {
    const auto& levels = group_.levels();
    if (l == levels.size()) {
      if (stabilizes(suffix, set_, in_)) return suffix;
      return std::nullopt;
    }
    const Point b = levels[l].base_point;
    const Orbit& orbit = levels[l].orbit;
    for (std::size_t idx = 0; idx < orbit.size(); ++idx) {
      if (in_[suffix[orbit.points()[idx]]] != in_[b]) continue;
      if (auto g = descend(l + 1, orbit.witness_at(idx) * suffix)) return g;
    }
    return std::nullopt;
  }

  Point find(Point x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  void add(const Permutation& g) {
    found_.push_back(g);
    for (Point x = 0; x < group_.degree(); ++x) {
      Point a = find(x), c = find(g[x]);
      if (a != c) parent_[std::max(a, c)] = std::min(a, c);
    }
  }

  const PermGroup& group_;
  std::vector<Point> set_;
  std::vector<bool> in_;
  std::vector<Point> parent_;
  std::vector<Permutation> found_;
};

}  // namespace

PermGroup setwise_stabilizer(const PermGroup& group, std::span<const Point> pointset) {
  std::vector<Point> sorted(pointset.begin(), pointset.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty() || sorted.size() == group.degree()) return group;
  PermGroup rebased = group.with_base(sorted);
  return SetStabilizerSearch(rebased, sorted).run();
}

PermGroup setwise_stabilizer_by_enumeration(const PermGroup& group, std::span<const Point> pointset,
                                            std::uint64_t cap) {
  auto in = membership(group.degree(), pointset);
  if (pointset.empty()) return group;
  std::vector<Permutation> members;
  group.for_each_element(
      [&](const Permutation& g) {
        if (!g.is_identity() && stabilizes(g, pointset, in)) members.push_back(g);
      },
      cap);
  if (members.empty()) return PermGroup::trivial(group.degree());
  // Keep only generators that enlarge the group built so far.
  std::vector<Permutation> gens;
  PermGroup current = PermGroup::trivial(group.degree());
  for (const auto& g : members) {
    if (current.contains(g)) continue;
    gens.push_back(g);
    current = PermGroup(gens);
  }
  return current;
}

PermGroup normal_closure(const PermGroup& group, std::span<const Permutation> elements) {
  std::vector<Permutation> gens;
  for (const auto& e : elements)
    if (!e.is_identity()) gens.push_back(e);
  if (gens.empty()) return PermGroup::trivial(group.degree());
  PermGroup closure(gens);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (const auto& g : group.generators()) {
      Permutation c = gens[i].conjugate_by(g);
      if (closure.contains(c)) continue;
      gens.push_back(std::move(c));
      closure = PermGroup(gens);
    }
  }
  return closure;
}

PermGroup derived_subgroup(const PermGroup& group) {
  std::vector<Permutation> commutators;
  const auto& gens = group.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      commutators.push_back(gens[i].inverse() * gens[j].inverse() * gens[i] * gens[j]);
  return normal_closure(group, commutators);
}

std::pair<std::size_t, bool> derived_series(const PermGroup& group) {
  PermGroup current = group;
  std::size_t steps = 0;
  while (!current.is_trivial()) {
    PermGroup next = derived_subgroup(current);
    if (next.order() == current.order()) return {steps, false};
    current = std::move(next);
    ++steps;
  }
  return {steps, true};
}

OrderCounts element_order_counts(const PermGroup& group, std::uint64_t cap) {
  std::map<std::uint64_t, std::uint64_t> counts;
  group.for_each_element([&](const Permutation& g) { ++counts[g.order()]; }, cap);
  return {counts.begin(), counts.end()};
}

std::optional<Permutation> are_conjugate(const PermGroup& group, const PermGroup& H, const PermGroup& K,
                                         std::uint64_t cap) {
  if (!group.contains_group(H) || !group.contains_group(K)) throw Error("are_conjugate: argument is not a subgroup");
  if (H.order() != K.order()) return std::nullopt;
  if (element_order_counts(H, cap) != element_order_counts(K, cap)) return std::nullopt;
  std::optional<Permutation> witness;
  // Enumeration cannot stop early through the visitor, so remember the first hit.
  group.for_each_element(
      [&](const Permutation& g) {
        if (witness) return;
        for (const auto& h : H.generators())
          if (!K.contains(h.conjugate_by(g))) return;
        witness = g;
      },
      cap);
  return witness;
}

std::size_t transitivity_degree(const PermGroup& group) {
  const std::size_t n = group.degree();
  if (n <= 1) return 0;
  std::vector<bool> removed(n, false);
  PermGroup current = group;
  std::size_t t = 0;
  for (std::size_t remaining = n; remaining > 0; --remaining) {
    Point p = 0;
    while (removed[p]) ++p;
    if (orbit_of(current, p).size() != remaining) break;
    ++t;
    current = point_stabilizer(current, p);
    removed[p] = true;
  }
  return t;
}

}  // namespace atlas
