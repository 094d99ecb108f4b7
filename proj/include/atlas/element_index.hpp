#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "atlas/perm_group.hpp"

namespace atlas {

using ElementId = std::uint32_t;

/// Dense bitset over the elements of an enumerated group.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  std::size_t universe() const { return universe_; }
  void insert(ElementId e) { words_[e >> 6] |= std::uint64_t{1} << (e & 63); }
  bool contains(ElementId e) const { return (words_[e >> 6] >> (e & 63)) & 1; }
  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      for (std::uint64_t w = words_[i]; w; w &= w - 1)
        f(static_cast<ElementId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
  }
  std::vector<ElementId> to_vector() const {
    std::vector<ElementId> out;
    for_each([&](ElementId e) { out.push_back(e); });
    return out;
  }

  /// Order of the sorted element lists, compared lexicographically.
  bool lex_less(const ElementSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t diff = words_[i] ^ other.words_[i];
      if (diff) return (words_[i] >> std::countr_zero(diff)) & 1;
    }
    return false;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : words_) h = (h ^ w) * 0x100000001b3ull + (h >> 29);
    return h;
  }

  friend bool operator==(const ElementSet&, const ElementSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const noexcept { return s.hash(); }
};

/// Enumerated finite permutation group. Elements are numbered by their
/// mixed-radix position in the stabilizer chain, so the identity is 0 and
/// ranks follow the group's base.
class ElementIndex {
 public:
  explicit ElementIndex(PermGroup group, std::uint64_t cap = 100'000);

  const PermGroup& group() const { return group_; }
  std::size_t size() const { return size_; }
  std::size_t degree() const { return degree_; }

  ElementId rank(const Permutation& g) const;
  ElementId rank(std::span<const Point> images) const;
  Permutation element(ElementId id) const;
  std::span<const Point> images(ElementId id) const {
    return {elements_.data() + static_cast<std::size_t>(id) * degree_, degree_};
  }

  ElementId multiply(ElementId a, ElementId b) const;
  ElementId inverse(ElementId a) const { return inverses_[a]; }
  ElementId conjugate(ElementId a, ElementId by) const { return multiply(multiply(inverses_[by], a), by); }
  std::uint32_t element_order(ElementId a) const { return orders_[a]; }

  /// Subgroup generated by `gens`, as an element set.
  ElementSet closure(std::span<const ElementId> gens) const;
  ElementSet elements_of(const PermGroup& subgroup) const;

  /// Conjugacy classes of elements, each sorted, ordered by minimal element.
  std::vector<std::vector<ElementId>> conjugacy_classes() const;

 private:
  PermGroup group_;
  std::size_t size_ = 0;
  std::size_t degree_ = 0;
  std::vector<Point> elements_;
  std::vector<ElementId> inverses_;
  std::vector<std::uint32_t> orders_;
  std::vector<std::size_t> radix_;
};

}  // namespace atlas
