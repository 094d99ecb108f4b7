#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"

#include "atlas/design.hpp"
#include "atlas/errors.hpp"

namespace atlas {

struct TDesignProfile {
  std::size_t t = 0;
  std::uint64_t lambda = 0;          // λ_t
  std::vector<std::uint64_t> lambdas;  // λ_s for s = 0..t, λ_0 = b and λ_1 = r
};

/// Largest t ≤ t_cap for which every t-subset of points lies in the same
/// number of blocks, by counting. Throws if the structure is not a 1-design.
TDesignProfile max_t_lambda(const IncidenceStructure& design, std::size_t t_cap);

struct LambdaCascade {
  std::vector<Integer> lambdas;  // λ_s for s = 0..t
  bool integral = true;          // false: no design with these parameters exists
};

/// λ_s = λ_t C(v-s, t-s) / C(k-s, t-s). Non-integral entries are rounded down
/// and flagged.
LambdaCascade lambda_cascade(std::size_t t, std::size_t v, std::size_t k, const Integer& lambda);

struct IntersectionProfile {
  std::map<std::size_t, std::uint64_t> counts;  // |B ∩ B'| over unordered pairs of distinct blocks
  bool quasi_symmetric = false;                 // one or two distinct sizes
  std::size_t x = 0, y = 0;                     // least and greatest size
};

IntersectionProfile intersection_numbers(const IncidenceStructure& design, std::size_t max_blocks = 20'000);

struct SrgParameters {
  std::uint64_t v = 0, k = 0, lambda = 0, mu = 0;
  friend auto operator<=>(const SrgParameters&, const SrgParameters&) = default;
};

struct SrgVerdict {
  enum class Kind { not_regular, not_strongly_regular, degenerate, strongly_regular };
  Kind kind = Kind::not_regular;
  SrgParameters parameters;  // meaningful for degenerate and strongly_regular
  bool ok() const { return kind == Kind::strongly_regular; }
};

/// Empty and complete graphs, disjoint unions of cliques (μ = 0) and complete
/// multipartite graphs (μ = k) are reported as degenerate.
SrgVerdict srg_check(const UGraph& graph);

/// (λ, μ) with k(k-λ-1) = (v-k-1)μ, μ ≥ 1, and integral positive eigenvalue
/// multiplicities.
std::vector<std::pair<std::uint64_t, std::uint64_t>> srg_feasibility(std::uint64_t v, std::uint64_t k);

struct DesignAnalytics {
  std::size_t v = 0, b = 0, k = 0, r = 0;
  TDesignProfile profile;
  std::optional<IntersectionProfile> intersections;  // absent when over the block cap
};

DesignAnalytics analyze_design(const IncidenceStructure& design, std::size_t t_cap,
                               std::size_t max_blocks_for_intersections = 20'000);

/// Default t cap: 5 up to 22 points, 3 beyond.
std::size_t default_t_cap(std::size_t v);

nlohmann::json analytics_to_json(const DesignAnalytics& a, const std::optional<SrgParameters>& srg = std::nullopt);

}  // namespace atlas
