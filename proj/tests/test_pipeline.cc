#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "atlas/pipeline.hpp"

using namespace atlas;
namespace fs = std::filesystem;

namespace {

const Atlas& shared_atlas() {
  static const Atlas atlas = load_atlas(RunConfig{});
  return atlas;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("atlas-test-" + name + "-" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("row filters") {
  const RowFilter full = parse_row_filter("2-(55,3,4)");
  CHECK(full.t == 2u);
  CHECK(full.v == 55u);
  CHECK(full.k == 3u);
  CHECK(full.lambda == 4u);
  CHECK(full.str() == "2-(55,3,4)");
  CHECK(full.matches(2, 55, 3, 4));
  CHECK_FALSE(full.matches(2, 55, 3, 8));

  const RowFilter partial = parse_row_filter("k=3, lambda=4");
  CHECK_FALSE(partial.t.has_value());
  CHECK(partial.matches(2, 55, 3, 4));
  CHECK(partial.matches(3, 12, 3, 4));
  CHECK(parse_row_filter(partial.str()) == partial);

  CHECK_THROWS_AS(parse_row_filter(""), ParseError);
  CHECK_THROWS_AS(parse_row_filter("q=3"), ParseError);
  CHECK_THROWS_AS(parse_row_filter("2-(55,3)"), ParseError);
}

TEST_CASE("configuration round trip and validation") {
  RunConfig c;
  c.degrees = {55, 66};
  c.t_cap = 3;
  c.filters = {parse_row_filter("2-(55,3,4)"), parse_row_filter("k=13")};
  c.canon.max_nodes = 1234;
  c.cache = false;
  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(back.degrees == c.degrees);
  CHECK(back.t_cap == c.t_cap);
  CHECK(back.filters == c.filters);
  CHECK(back.canon.max_nodes == 1234);
  CHECK_FALSE(back.cache);
  CHECK(config_to_json(back) == config_to_json(c));

  CHECK_THROWS_AS(config_from_json({{"colour", 3}}), ParseError);
  CHECK_THROWS_AS(config_from_json({{"degrees", "eleven"}}), ParseError);
  CHECK_THROWS_AS(config_from_json({{"subset_budget", 0}}), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ParseError);
}

TEST_CASE("design classification on 11 points") {
  RunConfig c;
  c.degrees = {11};
  const Report r = run_design_classification(shared_atlas(), c);
  REQUIRE(r.rows.size() == 4);
  // t descending within v.
  CHECK(r.rows[0].parameters == "4-(11,4,1)");
  CHECK(r.rows[3].parameters == "3-(11,3,1)");
  for (const auto& row : r.rows) {
    CHECK(row.count == 1);
    CHECK_FALSE(row.lower_bound);
    CHECK(row.provenance.size() == 1);
  }
  CHECK_FALSE(r.budget_exceeded);

  c.degrees.clear();
  CHECK(run_design_classification(shared_atlas(), c).rows.empty());
  c.degrees = {13};
  CHECK_THROWS_AS(run_design_classification(shared_atlas(), c), Error);
}

TEST_CASE("design classification with a k filter above 24 points") {
  RunConfig c;
  c.degrees = {55};
  c.filters = {parse_row_filter("k=3")};
  const Report r = run_design_classification(shared_atlas(), c);
  REQUIRE(!r.rows.empty());
  CHECK(r.rows[0].parameters == "2-(55,3,4)");
  CHECK(r.rows[0].count == 1);
  CHECK(r.rows[0].aut_orders == std::vector<std::string>{"7920"});
  // Triple systems with larger block orbits exist too; see the oracle below.
  std::vector<std::string> params;
  for (const auto& row : r.rows) params.push_back(row.parameters);
  CHECK(params == std::vector<std::string>{"2-(55,3,4)", "2-(55,3,8)", "2-(55,3,16)"});

  c.filters = {parse_row_filter("2-(55,3,4)")};
  const Report exact = run_design_classification(shared_atlas(), c);
  REQUIRE(exact.rows.size() == 1);
  CHECK(exact.rows[0].blocks == 1980);

  c.filters.clear();
  const Report none = run_design_classification(shared_atlas(), c);
  CHECK(none.rows.empty());
  CHECK_FALSE(none.warnings.empty());
}

TEST_CASE("every triple orbit on 55 points is a 2-design") {
  // Oracle: pair coverage counted over explicit triples, independent of the
  // analytics module.
  const Atlas& atlas = shared_atlas();
  std::optional<GroupAction> omega;
  for (const auto& c : atlas.classes)
    if (c.index == 55) omega = coset_action(atlas.index(), c.representative);
  REQUIRE(omega);
  DesignSweep sweep(*omega);
  SweepOptions o;
  o.block_size = 3;
  for (const auto& c : atlas.classes) sweep.add_stabilizer(c.representative, 0, o);
  std::map<std::uint64_t, std::set<std::uint64_t>> lambdas_by_b;
  for (const auto& seed : sweep.seeds()) {
    if (seed.k != 3) continue;
    const IncidenceStructure d = sweep.build(seed);
    std::vector<std::uint64_t> pair_count(55 * 55, 0);
    for (const auto& block : d.blocks) {
      const auto pts = block.points();
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          if (i != j) ++pair_count[pts[i] * 55 + pts[j]];
    }
    std::set<std::uint64_t> values;
    for (std::size_t x = 0; x < 55; ++x)
      for (std::size_t y = 0; y < 55; ++y)
        if (x != y) values.insert(pair_count[x * 55 + y]);
    if (values.size() == 1) lambdas_by_b[d.b()].insert(*values.begin());
  }
  CHECK(lambdas_by_b == std::map<std::uint64_t, std::set<std::uint64_t>>{{1980, {4}}, {3960, {8}}, {7920, {16}}});
}

TEST_CASE("subset budget marks rows as lower bounds") {
  RunConfig c;
  c.degrees = {55};
  c.filters = {parse_row_filter("2-(55,6,40)")};
  c.subset_budget = 50;
  const Report r = run_design_classification(shared_atlas(), c);
  CHECK(r.budget_exceeded);
  for (const auto& row : r.rows) CHECK(row.lower_bound);
}

TEST_CASE("orbital graph search by degree") {
  RunConfig c;
  c.degrees = {11};
  CHECK(run_srg_search(shared_atlas(), c).rows.empty());
  c.degrees = {144};
  const Report r = run_srg_search(shared_atlas(), c);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].parameters == "(144,55,22,20)");
  CHECK(r.rows[1].parameters == "(144,66,30,30)");
  CHECK(r.rows[0].aut_orders == std::vector<std::string>{"7920"});
  CHECK(r.rows[1].aut_orders == std::vector<std::string>{"190080"});
  c.degrees = {500};
  CHECK_THROWS_AS(run_srg_search(shared_atlas(), c), Error);
}

TEST_CASE("report emission") {
  Report r;
  r.kind = "designs";
  const fs::path dir = scratch_dir("emit");
  CHECK(slurp(emit_report(r, ReportFormat::csv, dir, "empty")) ==
        "parameters,blocks,count,lower_bound,count_max,aut_orders,provenance\n");

  r.rows.push_back({"2-(22,7,360)", 3960, 3, false, 3, {"7920", "7920", "7920"}, {"a", "b", "c"}});
  r.rows.push_back({"2-(55,6,40)", 3960, 14, true, 14, {"7920"}, {"omega2=H1 orbits=1 2"}});
  r.warnings = {"something, with a comma"};
  CHECK(report_from_json(nlohmann::json::parse(render_report(r, ReportFormat::json))) == r);

  const std::string md = render_report(r, ReportFormat::markdown);
  CHECK(md.find("| Parameters of designs | # of blocks | # non-isomorphic | Full automorphism group order |") == 0);
  CHECK(md.find("| 2-(55,6,40) | 3960 | >= 14 | 7920 |") != std::string::npos);
  CHECK(render_report(r, ReportFormat::csv).find("\"2-(22,7,360)\",3960,3,0,3,7920;7920;7920,a;b;c") !=
        std::string::npos);
  CHECK(render_report(r, ReportFormat::csv) == render_report(r, ReportFormat::csv));
  CHECK_THROWS_AS(parse_report_format("xml"), ParseError);
  CHECK_THROWS_AS(report_from_json({{"kind", "designs"}}), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("expected rows and diffs") {
  const auto rows = parse_expected_csv(
      "parameters,blocks,relation,count,aut_order\n# comment\n\"2-(55,3,4)\",1980,=,1,7920\n\"2-(55,6,40)\",,>=,14,\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].blocks == 1980u);
  CHECK(rows[1].lower_bound);
  CHECK_FALSE(rows[1].blocks.has_value());
  CHECK(filter_for(rows[0]) == parse_row_filter("2-(55,3,4)"));

  Report r;
  r.rows.push_back({"2-(55,3,4)", 1980, 1, false, 1, {"7920"}, {""}});
  r.rows.push_back({"2-(55,6,40)", 3960, 66, false, 66, {"7920"}, {""}});
  CHECK(diff_report(r, rows, true).empty());
  r.rows[1].count = r.rows[1].count_max = 13;
  CHECK(diff_report(r, rows, true).size() == 1);
  r.rows[1].count = r.rows[1].count_max = 66;
  r.rows[0].aut_orders = {"15840"};
  CHECK(diff_report(r, rows, true).size() == 1);
  r.rows[0].aut_orders = {"7920"};
  r.rows[0].lower_bound = true;
  CHECK(diff_report(r, rows, true).size() == 1);
  r.rows[0].lower_bound = false;
  r.rows.push_back({"2-(55,4,8)", 1980, 1, false, 1, {}, {}});
  CHECK(diff_report(r, rows, true).size() == 1);
  CHECK(diff_report(r, rows, false).empty());
  r.rows.erase(r.rows.begin());
  CHECK(diff_report(r, rows, false) == std::vector<std::string>{"2-(55,3,4): missing"});

  CHECK_THROWS_AS(parse_expected_csv("a,b\n"), ParseError);
  CHECK_THROWS_AS(parse_expected_csv("parameters,blocks,relation,count,aut_order\nx,1,~,1,\n"), ParseError);
  CHECK_THROWS_AS(parse_expected_csv("parameters,blocks,relation,count,aut_order\n\"x,1,=,1,\n"), ParseError);
}

TEST_CASE("cache entries") {
  const fs::path dir = scratch_dir("cache");
  Cache cache(dir);
  CHECK_FALSE(cache.get("k1").has_value());
  cache.put("k1", {{"digest", "abc"}});
  REQUIRE(cache.get("k1").has_value());
  CHECK((*cache.get("k1"))["digest"] == "abc");
  CHECK(cache.hits() == 2);

  std::ofstream(cache.path_of("k2")) << "{not json";
  CHECK_FALSE(cache.get("k2").has_value());
  CHECK_FALSE(fs::exists(cache.path_of("k2")));

  std::ofstream(cache.path_of("k3")) << nlohmann::json{{"version", Cache::kVersion + 1}, {"key", "k3"}, {"value", 1}};
  CHECK_FALSE(cache.get("k3").has_value());

  std::ofstream(cache.path_of("k4")) << nlohmann::json{{"version", Cache::kVersion}, {"key", "k1"}, {"value", 1}};
  CHECK_FALSE(cache.get("k4").has_value());
  CHECK(cache.discarded() == 3);
  fs::remove_all(dir);
}

TEST_CASE("cached runs reproduce the report") {
  const fs::path dir = scratch_dir("runs");
  RunConfig c;
  c.degrees = {12};
  Cache first(dir);
  const Report a = run_design_classification(shared_atlas(), c, &first);
  CHECK(first.misses() > 0);
  Cache second(dir);
  const Report b = run_design_classification(shared_atlas(), c, &second);
  CHECK(second.misses() == 0);
  CHECK(second.hits() == first.misses());
  CHECK(render_report(a, ReportFormat::json) == render_report(b, ReportFormat::json));

  // A tampered entry is discarded and recomputed.
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ofstream(entry.path()) << "garbage";
    break;
  }
  Cache third(dir);
  const Report c3 = run_design_classification(shared_atlas(), c, &third);
  CHECK(third.discarded() == 1);
  CHECK(render_report(c3, ReportFormat::json) == render_report(a, ReportFormat::json));

  fs::remove_all(dir);
  const Report d = run_design_classification(shared_atlas(), c);
  CHECK(render_report(d, ReportFormat::json) == render_report(a, ReportFormat::json));
}
