#pragma once

#include <random>
#include <unordered_set>
#include <vector>

#include "atlas/permutation.hpp"

namespace atlas::testing {

inline Permutation random_permutation(std::size_t degree, std::mt19937_64& rng) {
  std::vector<Point> images(degree);
  for (std::size_t i = 0; i < degree; ++i) images[i] = static_cast<Point>(i);
  std::shuffle(images.begin(), images.end(), rng);
  return Permutation::from_images(std::move(images));
}

/// Brute-force closure of a generating set; independent of the BSGS code.
inline std::unordered_set<Permutation> brute_force_closure(const std::vector<Permutation>& gens) {
  std::unordered_set<Permutation> seen{Permutation(gens.front().degree())};
  std::vector<Permutation> queue(seen.begin(), seen.end());
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& g : gens) {
      Permutation p = queue[i] * g;
      if (seen.insert(p).second) queue.push_back(p);
    }
  return seen;
}

}  // namespace atlas::testing
