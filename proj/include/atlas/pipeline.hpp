#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "atlas/canon.hpp"
#include "atlas/subgroup_atlas.hpp"

namespace atlas {

/// Restricts reported rows; unset fields match anything. Written either as a
/// full tuple "2-(55,3,4)" or as "k=3,lambda=4" (keys t, v, k, lambda).
struct RowFilter {
  std::optional<std::size_t> t, v, k;
  std::optional<std::uint64_t> lambda;

  bool matches(std::size_t t_, std::size_t v_, std::size_t k_, std::uint64_t lambda_) const;
  std::string str() const;
  friend bool operator==(const RowFilter&, const RowFilter&) = default;
};

RowFilter parse_row_filter(std::string_view text);

struct RunConfig {
  std::string group = "M11";  // embedded generators, or a generator file path
  std::vector<std::size_t> degrees;
  std::optional<std::size_t> t_cap;  // default_t_cap(v) when unset
  std::size_t max_suborbits = 24;
  std::uint64_t subset_budget = 50'000'000;
  CanonOptions canon;
  std::size_t srg_max_degree = 450;
  std::uint64_t srg_node_budget = 500'000'000;
  std::filesystem::path output_dir = "atlas-out";
  std::size_t workers = 1;  // accepted for config compatibility; runs are sequential
  bool cache = true;
  std::vector<RowFilter> filters;

  void validate() const;
};

/// Keys: group, degrees, t_cap, max_suborbits, subset_budget, canon_max_vertices,
/// canon_max_nodes, srg_max_degree, srg_node_budget, output_dir, workers, cache,
/// filters (strings). Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// Group, lattice and classes shared by every run.
struct Atlas {
  PermGroup group;
  std::unique_ptr<SubgroupLattice> lattice;
  std::vector<SubgroupClass> classes;

  std::shared_ptr<const ElementIndex> index() const { return lattice->shared_index(); }
};

/// Loads the configured group; the embedded M11 must pass validate_m11.
Atlas load_atlas(const RunConfig& config);

struct ReportRow {
  std::string parameters;  // "t-(v,k,λ)" or "(v,k,λ,μ)"
  std::uint64_t blocks = 0;
  std::size_t count = 0;
  bool lower_bound = false;  // count is only a lower bound
  std::size_t count_max = 0;  // differs from count only when canonization gave up
  std::vector<std::string> aut_orders;  // one per class, decimal
  std::vector<std::string> provenance;  // one per class

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct Report {
  std::string kind;  // "designs" or "srg"
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  bool budget_exceeded = false;

  friend bool operator==(const Report&, const Report&) = default;
};

class Cache;

/// Sweeps every (Ω1, Ω2) pair for the configured degrees and reports the
/// t-designs with t >= 2 and 3 <= k <= v/2, one row per (v, t, k, λ), sorted by
/// v, then t descending, then k and λ. Above 24 points every filter must fix
/// k; when it also fixes λ only stabilizers of order |G|/b are swept.
Report run_design_classification(const Atlas& atlas, const RunConfig& config, Cache* cache = nullptr);

/// Strongly regular orbital graphs of every action of degree at most
/// srg_max_degree (or of the configured degrees), one row per isomorphism
/// class, counted up to complement and excluding imprimitive graphs.
Report run_srg_search(const Atlas& atlas, const RunConfig& config, Cache* cache = nullptr);

enum class ReportFormat { csv, json, markdown };
ReportFormat parse_report_format(std::string_view name);
std::string render_report(const Report& report, ReportFormat format);
nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
/// Writes <dir>/<stem>.<ext>, creating dir; returns the path written.
std::filesystem::path emit_report(const Report& report, ReportFormat format, const std::filesystem::path& dir,
                                  const std::string& stem);

/// Content-addressed JSON store. Entries carry a format version and their own
/// key; anything unreadable or stale is discarded with a warning. Writes go
/// through a temporary file and a rename, so interrupted runs leave no torn
/// entries.
class Cache {
 public:
  static constexpr int kVersion = 1;

  explicit Cache(std::filesystem::path dir);

  std::optional<nlohmann::json> get(const std::string& key);
  void put(const std::string& key, const nlohmann::json& value);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t discarded() const { return discarded_; }
  std::filesystem::path path_of(const std::string& key) const;

 private:
  std::filesystem::path dir_;
  std::size_t hits_ = 0, misses_ = 0, discarded_ = 0;
};

/// Expected rows transcribed from published tables: columns
/// parameters,blocks,relation,count,aut_order with relation "=" or ">=";
/// blocks and aut_order may be empty.
struct ExpectedRow {
  std::string parameters;
  std::optional<std::uint64_t> blocks;
  bool lower_bound = false;
  std::size_t count = 0;
  std::optional<std::string> aut_order;
};

std::vector<ExpectedRow> parse_expected_csv(std::string_view text);

/// Differences between a report and expected rows; empty means matched. With
/// `complete`, rows missing from the expectation are differences too.
std::vector<std::string> diff_report(const Report& report, const std::vector<ExpectedRow>& expected, bool complete);

/// The RowFilter that selects an expected row, e.g. "2-(55,3,4)".
RowFilter filter_for(const ExpectedRow& row);

}  // namespace atlas
