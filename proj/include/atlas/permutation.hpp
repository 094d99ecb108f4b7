#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atlas {

using Point = std::uint32_t;

/// A bijection of {0, ..., degree-1}. Groups act on the right: the image of
/// point p under g is g[p], and (g * h)[p] = h[g[p]].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::size_t degree);

  /// Validates that `images` is a bijection.
  static Permutation from_images(std::vector<Point> images);

  std::size_t degree() const { return images_.size(); }
  Point operator[](Point p) const { return images_[p]; }
  std::span<const Point> images() const { return images_; }

  bool is_identity() const;
  Permutation inverse() const;
  Permutation pow(std::int64_t exponent) const;
  std::uint64_t order() const;

  /// Conjugate g^-1 * this * g.
  Permutation conjugate_by(const Permutation& g) const;

  /// Smallest moved point, or degree() for the identity.
  Point first_moved_point() const;

  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation& a, const Permutation& b) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) = default;

 private:
  std::vector<Point> images_;
};

/// Parses disjoint-cycle notation "(0,1,2)(3,4)" or "()" and image-list
/// notation "[1,2,0,3]". Points are 0-based.
Permutation parse_permutation(std::string_view text, std::size_t degree);

/// Disjoint-cycle notation with 0-based points, "()" for the identity.
std::string to_cycle_string(const Permutation& p);

std::ostream& operator<<(std::ostream& os, const Permutation& p);

/// Group file: first line `degree <n>`, then one permutation per line.
/// Blank lines and lines starting with '#' are ignored.
std::vector<Permutation> parse_generator_file(std::string_view text);

std::string format_generator_file(std::span<const Permutation> gens);

/// Multiset of element orders as sorted (order, count) pairs.
using OrderCounts = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

}  // namespace atlas

template <>
struct std::hash<atlas::Permutation> {
  std::size_t operator()(const atlas::Permutation& p) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto x : p.images()) h = (h ^ x) * 0x100000001b3ull;
    return h;
  }
};
