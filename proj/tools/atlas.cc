// atlas: subgroup atlas, designs and strongly regular graphs from a
// transitive permutation group (M11 by default).

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "atlas/action.hpp"
#include "atlas/pipeline.hpp"

#ifndef ATLAS_DATA_DIR
#define ATLAS_DATA_DIR "data"
#endif

namespace {

using namespace atlas;

constexpr int kMatched = 0, kMismatch = 1, kBudget = 2, kFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Flags {
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> formats;
  std::size_t workers = 0;
  bool no_cache = false;
  std::string log_level = "warn";

  std::vector<std::size_t> degrees;
  std::vector<std::string> filters;
  std::size_t t_cap = 0;
  std::uint64_t subset_budget = 0;
  std::size_t max_suborbits = 0;
  std::uint64_t canon_max_nodes = 0;
  std::size_t srg_max_degree = 0;
  std::string group;
};

// Config file first; every flag given on the command line wins.
RunConfig resolve(const Flags& f, const CLI::App& root, const CLI::App& sub) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  auto given = [&](const char* name) {
    for (const CLI::App* app : {&root, &sub})
      if (const CLI::Option* o = app->get_option_no_throw(name); o && o->count() > 0) return true;
    return false;
  };
  if (given("--output-dir")) c.output_dir = f.output_dir;
  if (given("--workers")) c.workers = f.workers;
  if (given("--no-cache")) c.cache = false;
  if (given("--group")) c.group = f.group;
  if (given("--degrees")) c.degrees = f.degrees;
  if (given("--filter")) {
    c.filters.clear();
    for (const auto& s : f.filters) c.filters.push_back(parse_row_filter(s));
  }
  if (given("--t-cap")) c.t_cap = f.t_cap;
  if (given("--subset-budget")) c.subset_budget = f.subset_budget;
  if (given("--max-suborbits")) c.max_suborbits = f.max_suborbits;
  if (given("--canon-max-nodes")) c.canon.max_nodes = f.canon_max_nodes;
  if (given("--max-degree")) c.srg_max_degree = f.srg_max_degree;
  c.validate();
  return c;
}

void write_reports(const Report& report, const RunConfig& config, const Flags& f, const std::string& stem) {
  std::vector<std::string> formats = f.formats.empty() ? std::vector<std::string>{"csv", "json", "markdown"} : f.formats;
  for (const auto& name : formats) {
    const auto path = emit_report(report, parse_report_format(name), config.output_dir, stem);
    spdlog::info("wrote {}", path.string());
  }
  std::cout << render_report(report, ReportFormat::markdown);
}

int finish(const Report& report) { return report.budget_exceeded ? kBudget : kMatched; }

int report_diffs(const std::vector<std::string>& diffs, bool budget) {
  for (const auto& d : diffs) std::cout << "MISMATCH " << d << '\n';
  if (budget) {
    std::cout << "budget exceeded; results incomplete\n";
    return kBudget;
  }
  if (!diffs.empty()) return kMismatch;
  std::cout << "all rows matched\n";
  return kMatched;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transitive designs and strongly regular graphs from a permutation group"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--output-dir", f.output_dir, "directory for reports and the cache");
  app.add_option("--format", f.formats, "csv, json or markdown (repeatable; default all)");
  app.add_option("--workers", f.workers, "worker count (accepted; runs are sequential)");
  app.add_option("--group", f.group, "M11 or a generator file");
  app.add_flag("--no-cache", f.no_cache, "do not read or write the cache");
  app.add_option("--log-level", f.log_level, "trace, debug, info, warn, error");

  auto* subgroups = app.add_subcommand("subgroups", "conjugacy classes of subgroups");
  std::string expected_path = std::string(ATLAS_DATA_DIR) + "/table1.csv";
  subgroups->add_option("--expected", expected_path, "order,index,multiplicity CSV to compare against");

  auto* actions = app.add_subcommand("actions", "transitive actions and their suborbits");
  actions->add_option("--max-degree", f.srg_max_degree, "largest degree listed");

  auto* designs = app.add_subcommand("designs", "t-designs with a transitive group action");
  designs->add_option("--degrees", f.degrees, "degrees of the point action")->delimiter(',');
  designs->add_option("--filter", f.filters, "row filter: 2-(55,3,4) or k=3,lambda=4 (repeatable)");
  designs->add_option("--t-cap", f.t_cap, "largest t tested");
  designs->add_option("--subset-budget", f.subset_budget, "orbit unions examined per stabilizer");
  designs->add_option("--max-suborbits", f.max_suborbits, "largest orbit count for a full union sweep");
  designs->add_option("--canon-max-nodes", f.canon_max_nodes, "search nodes per canonization");

  auto* srg = app.add_subcommand("srg", "strongly regular orbital graphs");
  srg->add_option("--degrees", f.degrees, "restrict to these degrees")->delimiter(',');
  srg->add_option("--max-degree", f.srg_max_degree, "largest degree searched");
  srg->add_option("--canon-max-nodes", f.canon_max_nodes, "search nodes per canonization");

  auto* verify = app.add_subcommand("verify", "compare against transcribed tables");
  std::string table, fixture;
  verify->add_option("table", table, "table1, table2, table5, spot or bounds")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table5", "spot", "bounds"}));
  verify->add_option("--fixture", fixture, "expected-rows CSV (default: the shipped one)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("atlas"));
  spdlog::set_level(spdlog::level::from_str(f.log_level));

  try {
    CLI::App* active = app.get_subcommands().front();
    const RunConfig config = resolve(f, app, *active);
    const Atlas atlas = load_atlas(config);
    std::optional<Cache> cache;
    if (config.cache) cache.emplace(config.output_dir / "cache");
    Cache* cache_ptr = cache ? &*cache : nullptr;

    if (active == subgroups) {
      std::filesystem::create_directories(config.output_dir);
      std::ofstream(config.output_dir / "subgroups.json") << atlas_to_json(atlas.classes).dump(2) << '\n';
      std::cout << "order,index,class_size,solvable\n";
      for (const auto& c : atlas.classes)
        std::cout << c.order << ',' << c.index << ',' << c.class_size << ',' << (c.solvable ? 1 : 0) << '\n';
      const AtlasReport diff = verify_atlas(atlas.classes, parse_atlas_csv(read_file(expected_path)));
      std::cout << atlas.classes.size() << " classes; " << (diff.matches() ? "matches " : "differs from ")
                << expected_path << '\n';
      return diff.matches() ? kMatched : kMismatch;
    }
    if (active == actions) {
      const std::size_t max_degree = actions->count("--max-degree") ? f.srg_max_degree : 450;
      std::cout << "class,order,degree,rank,transitivity,suborbits\n";
      for (std::size_t i = 0; i < atlas.classes.size(); ++i) {
        const auto& c = atlas.classes[i];
        if (c.index > max_degree) continue;
        const GroupAction a = coset_action(atlas.index(), c.representative, std::max(kDefaultActionCap, c.index));
        const auto orbits = suborbits(a, 0);
        std::cout << 'H' << i << ',' << c.order << ',' << c.index << ',' << orbits.size() << ','
                  << transitivity_degree(a) << ',';
        for (std::size_t j = 0; j < orbits.size(); ++j) std::cout << (j ? " " : "") << orbits[j].size();
        std::cout << '\n';
      }
      return kMatched;
    }
    if (active == designs) {
      const Report report = run_design_classification(atlas, config, cache_ptr);
      write_reports(report, config, f, "designs");
      return finish(report);
    }
    if (active == srg) {
      const Report report = run_srg_search(atlas, config, cache_ptr);
      write_reports(report, config, f, "srg");
      return finish(report);
    }
    // verify
    if (table == "table1") {
      const std::string path = fixture.empty() ? std::string(ATLAS_DATA_DIR) + "/table1.csv" : fixture;
      const AtlasReport diff = verify_atlas(atlas.classes, parse_atlas_csv(read_file(path)));
      std::vector<std::string> lines;
      for (const auto& m : diff.mismatches)
        lines.push_back("order " + std::to_string(m.order) + " index " + std::to_string(m.index) + ": " +
                        std::to_string(m.computed) + " classes, expected " + std::to_string(m.expected));
      return report_diffs(lines, false);
    }
    const std::map<std::string, std::string> shipped{{"table2", "table2.csv"},
                                                     {"table5", "table5.csv"},
                                                     {"spot", "spot_rows.csv"},
                                                     {"bounds", "bound_rows.csv"}};
    const std::string path = fixture.empty() ? std::string(ATLAS_DATA_DIR) + "/" + shipped.at(table) : fixture;
    const auto expected = parse_expected_csv(read_file(path));
    if (table == "table2") {
      RunConfig c = config;
      c.degrees = {11, 12, 22};
      c.filters.clear();
      const Report report = run_design_classification(atlas, c, cache_ptr);
      emit_report(report, ReportFormat::markdown, c.output_dir, "verify-table2");
      return report_diffs(diff_report(report, expected, true), report.budget_exceeded);
    }
    if (table == "table5") {
      RunConfig c = config;
      c.degrees.clear();
      const Report report = run_srg_search(atlas, c, cache_ptr);
      emit_report(report, ReportFormat::markdown, c.output_dir, "verify-table5");
      return report_diffs(diff_report(report, expected, true), report.budget_exceeded);
    }
    std::vector<std::string> diffs;
    bool budget = false;
    for (const auto& row : expected) {
      RunConfig c = config;
      const RowFilter filter = filter_for(row);
      c.degrees = {*filter.v};
      c.filters = {filter};
      const Report report = run_design_classification(atlas, c, cache_ptr);
      budget |= report.budget_exceeded;
      for (const auto& r : report.rows) std::cout << r.parameters << ": " << r.count << '\n';
      auto d = diff_report(report, {row}, false);
      diffs.insert(diffs.end(), d.begin(), d.end());
    }
    return report_diffs(diffs, budget);
  } catch (const BudgetExceeded& e) {
    spdlog::error("{}", e.what());
    return kBudget;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
}
