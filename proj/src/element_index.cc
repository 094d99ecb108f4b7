#include "atlas/element_index.hpp"

#include <algorithm>

namespace atlas {

ElementIndex::ElementIndex(PermGroup group, std::uint64_t cap) : group_(std::move(group)) {
  if (group_.order() > cap)
    throw BudgetExceeded("group of order " + group_.order().str() + " exceeds element table cap " +
                         std::to_string(cap));
  size_ = group_.order_u64();
  degree_ = group_.degree();
  for (const auto& level : group_.levels()) radix_.push_back(level.orbit.size());
  elements_.reserve(size_ * degree_);
  group_.for_each_element([&](const Permutation& g) {
    auto im = g.images();
    elements_.insert(elements_.end(), im.begin(), im.end());
  });

  inverses_.resize(size_);
  orders_.resize(size_);
  std::vector<Point> inv(degree_);
  for (ElementId e = 0; e < size_; ++e) {
    auto im = images(e);
    for (std::size_t x = 0; x < degree_; ++x) inv[im[x]] = static_cast<Point>(x);
    inverses_[e] = rank(inv);
    orders_[e] = static_cast<std::uint32_t>(element(e).order());
  }
}

ElementId ElementIndex::rank(std::span<const Point> images) const {
  thread_local std::vector<Point> h;
  h.assign(images.begin(), images.end());
  std::size_t r = 0;
  const auto& levels = group_.levels();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Orbit& orbit = levels[l].orbit;
    const Point beta = h[levels[l].base_point];
    if (!orbit.contains(beta)) throw Error("permutation is not an element of the group");
    const std::size_t idx = orbit.index_of(beta);
    r = r * radix_[l] + idx;
    const auto inv = orbit.inverse_witness_at(idx).images();
    for (auto& x : h) x = inv[x];
  }
  for (std::size_t x = 0; x < h.size(); ++x)
    if (h[x] != x) throw Error("permutation is not an element of the group");
  return static_cast<ElementId>(r);
}

ElementId ElementIndex::rank(const Permutation& g) const {
  if (g.degree() != degree_) throw Error("degree mismatch in element rank");
  return rank(g.images());
}

Permutation ElementIndex::element(ElementId id) const {
  auto im = images(id);
  return Permutation::from_images(std::vector<Point>(im.begin(), im.end()));
}

ElementId ElementIndex::multiply(ElementId a, ElementId b) const {
  thread_local std::vector<Point> prod;
  prod.resize(degree_);
  auto ia = images(a);
  auto ib = images(b);
  for (std::size_t x = 0; x < degree_; ++x) prod[x] = ib[ia[x]];
  return rank(prod);
}

ElementSet ElementIndex::closure(std::span<const ElementId> gens) const {
  ElementSet set(size_);
  std::vector<ElementId> queue{0};
  set.insert(0);
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (ElementId g : gens) {
      ElementId p = multiply(queue[i], g);
      if (!set.contains(p)) {
        set.insert(p);
        queue.push_back(p);
      }
    }
  return set;
}

ElementSet ElementIndex::elements_of(const PermGroup& subgroup) const {
  std::vector<ElementId> gens;
  for (const auto& g : subgroup.generators()) gens.push_back(rank(g));
  return closure(gens);
}

std::vector<std::vector<ElementId>> ElementIndex::conjugacy_classes() const {
  std::vector<ElementId> gens;
  for (const auto& g : group_.generators()) gens.push_back(rank(g));
  std::vector<bool> seen(size_, false);
  std::vector<std::vector<ElementId>> classes;
  for (ElementId e = 0; e < size_; ++e) {
    if (seen[e]) continue;
    std::vector<ElementId> cls{e};
    seen[e] = true;
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (ElementId g : gens) {
        ElementId c = conjugate(cls[i], g);
        if (!seen[c]) {
          seen[c] = true;
          cls.push_back(c);
        }
      }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

}  // namespace atlas
