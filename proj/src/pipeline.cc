#include "atlas/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "atlas/analytics.hpp"
#include "atlas/m11.hpp"
#include "atlas/srg_search.hpp"

namespace atlas {

bool RowFilter::matches(std::size_t t_, std::size_t v_, std::size_t k_, std::uint64_t lambda_) const {
  return (!t || *t == t_) && (!v || *v == v_) && (!k || *k == k_) && (!lambda || *lambda == lambda_);
}

std::string RowFilter::str() const {
  if (t && v && k && lambda)
    return std::to_string(*t) + "-(" + std::to_string(*v) + "," + std::to_string(*k) + "," + std::to_string(*lambda) +
           ")";
  std::string out;
  auto add = [&](const char* name, auto value) {
    if (!value) return;
    if (!out.empty()) out += ",";
    out += name + std::string("=") + std::to_string(*value);
  };
  add("t", t);
  add("v", v);
  add("k", k);
  add("lambda", lambda);
  return out.empty() ? "*" : out;
}

RowFilter parse_row_filter(std::string_view text) {
  const std::string s(text);
  static const std::regex tuple(R"(\s*(\d+)\s*-\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
  std::smatch m;
  RowFilter f;
  if (std::regex_match(s, m, tuple)) {
    f.t = std::stoull(m[1]);
    f.v = std::stoull(m[2]);
    f.k = std::stoull(m[3]);
    f.lambda = std::stoull(m[4]);
    return f;
  }
  static const std::regex pair(R"(\s*(t|v|k|lambda)\s*=\s*(\d+)\s*)");
  std::stringstream parts(s);
  std::string part;
  bool any = false;
  while (std::getline(parts, part, ',')) {
    if (!std::regex_match(part, m, pair)) throw ParseError("bad row filter '" + s + "'");
    const std::uint64_t value = std::stoull(m[2]);
    if (m[1] == "t") f.t = value;
    else if (m[1] == "v") f.v = value;
    else if (m[1] == "k") f.k = value;
    else f.lambda = value;
    any = true;
  }
  if (!any) throw ParseError("empty row filter");
  return f;
}

void RunConfig::validate() const {
  if (max_suborbits == 0 || subset_budget == 0 || canon.max_vertices == 0 || canon.max_nodes == 0 ||
      srg_max_degree == 0 || srg_node_budget == 0 || workers == 0)
    throw Error("configuration caps must be positive");
  if (t_cap && *t_cap == 0) throw Error("t_cap must be positive");
  for (std::size_t d : degrees)
    if (d == 0) throw Error("degree 0 requested");
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("configuration must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "group") c.group = value.get<std::string>();
      else if (key == "degrees") c.degrees = value.get<std::vector<std::size_t>>();
      else if (key == "t_cap") c.t_cap = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
      else if (key == "max_suborbits") c.max_suborbits = value.get<std::size_t>();
      else if (key == "subset_budget") c.subset_budget = value.get<std::uint64_t>();
      else if (key == "canon_max_vertices") c.canon.max_vertices = value.get<std::size_t>();
      else if (key == "canon_max_nodes") c.canon.max_nodes = value.get<std::uint64_t>();
      else if (key == "srg_max_degree") c.srg_max_degree = value.get<std::size_t>();
      else if (key == "srg_node_budget") c.srg_node_budget = value.get<std::uint64_t>();
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "workers") c.workers = value.get<std::size_t>();
      else if (key == "cache") c.cache = value.get<bool>();
      else if (key == "filters") {
        c.filters.clear();
        for (const auto& f : value) c.filters.push_back(parse_row_filter(f.get<std::string>()));
      } else {
        throw ParseError("unknown configuration key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("configuration key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["group"] = c.group;
  j["degrees"] = c.degrees;
  j["t_cap"] = c.t_cap ? nlohmann::json(*c.t_cap) : nlohmann::json(nullptr);
  j["max_suborbits"] = c.max_suborbits;
  j["subset_budget"] = c.subset_budget;
  j["canon_max_vertices"] = c.canon.max_vertices;
  j["canon_max_nodes"] = c.canon.max_nodes;
  j["srg_max_degree"] = c.srg_max_degree;
  j["srg_node_budget"] = c.srg_node_budget;
  j["output_dir"] = c.output_dir.string();
  j["workers"] = c.workers;
  j["cache"] = c.cache;
  j["filters"] = nlohmann::json::array();
  for (const auto& f : c.filters) j["filters"].push_back(f.str());
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read configuration " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Atlas load_atlas(const RunConfig& config) {
  std::vector<Permutation> gens;
  if (config.group == "M11") {
    gens = m11_generators();
  } else {
    std::ifstream in(config.group);
    if (!in) throw Error("cannot read generator file " + config.group);
    std::stringstream text;
    text << in.rdbuf();
    gens = parse_generator_file(text.str());
  }
  Atlas atlas;
  atlas.group = PermGroup(gens);
  if (config.group == "M11") {
    const GroupValidation check = validate_m11(atlas.group);
    if (!check.ok()) throw Error("embedded M11 generators failed validation: " + check.detail);
  }
  atlas.lattice = std::make_unique<SubgroupLattice>(atlas.group);
  atlas.classes = enumerate_subgroup_classes(atlas.group);
  return atlas;
}

namespace {

std::string join(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t x : xs) out += (out.empty() ? "" : " ") + std::to_string(x);
  return out;
}

std::string design_parameters(std::size_t t, std::size_t v, std::size_t k, std::uint64_t lambda) {
  return std::to_string(t) + "-(" + std::to_string(v) + "," + std::to_string(k) + "," + std::to_string(lambda) + ")";
}

std::string to_string(const Integer& x) { return x.str(); }

std::string sha256_of(const std::string& text) {
  return sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

// C(n, r) exactly.
Integer binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  Integer out = 1;
  for (std::size_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

std::vector<std::size_t> classes_of_degree(const Atlas& atlas, std::size_t degree) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < atlas.classes.size(); ++i)
    if (atlas.classes[i].index == degree) out.push_back(i);
  return out;
}

struct RowKey {
  std::size_t v, t, k;
  std::uint64_t lambda;
  // v ascending, t descending, then k and λ ascending.
  bool operator<(const RowKey& o) const {
    if (v != o.v) return v < o.v;
    if (t != o.t) return t > o.t;
    if (k != o.k) return k < o.k;
    return lambda < o.lambda;
  }
};

struct CanonSummary {
  std::string digest;
  std::string aut_order;
};

nlohmann::json summary_json(const CanonSummary& s) { return {{"digest", s.digest}, {"aut_order", s.aut_order}}; }

std::optional<CanonSummary> summary_from(const std::optional<nlohmann::json>& j) {
  if (!j || !j->is_object() || !j->contains("digest") || !j->contains("aut_order")) return std::nullopt;
  return CanonSummary{(*j)["digest"].get<std::string>(), (*j)["aut_order"].get<std::string>()};
}

}  // namespace

Report run_design_classification(const Atlas& atlas, const RunConfig& config, Cache* cache) {
  config.validate();
  Report report;
  report.kind = "designs";
  const std::uint64_t group_order = atlas.group.order_u64();

  std::map<RowKey, std::vector<IncidenceStructure>> rows;
  std::set<std::pair<std::size_t, std::size_t>> truncated;  // (v, k); k = 0 for every k
  std::map<std::size_t, GroupAction> actions;

  std::vector<std::size_t> degrees = config.degrees;
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());

  for (std::size_t degree : degrees) {
    const auto omega2_classes = classes_of_degree(atlas, degree);
    if (omega2_classes.empty()) throw Error("no transitive action of degree " + std::to_string(degree));

    struct Plan {
      SweepOptions options;
      std::vector<std::size_t> stabilizers;
    };
    std::vector<Plan> plans;
    std::vector<std::size_t> all_classes(atlas.classes.size());
    // Largest stabilizers first, so provenance names the biggest one.
    for (std::size_t i = 0; i < all_classes.size(); ++i) all_classes[i] = all_classes.size() - 1 - i;
    if (degree < 25) {
      Plan p;
      p.options.max_suborbits = config.max_suborbits;
      p.options.subset_budget = config.subset_budget;
      p.stabilizers = all_classes;
      plans.push_back(std::move(p));
    } else {
      if (config.filters.empty())
        report.warnings.push_back("degree " + std::to_string(degree) + ": above 24 points a filter fixing k is required");
      for (const auto& f : config.filters) {
        if (f.v && *f.v != degree) continue;
        if (!f.k) {
          report.warnings.push_back("filter " + f.str() + " does not fix k; skipped on " + std::to_string(degree) +
                                    " points");
          continue;
        }
        Plan p;
        p.options.max_suborbits = config.max_suborbits;
        p.options.subset_budget = config.subset_budget;
        p.options.block_size = *f.k;
        if (f.lambda) {
          const std::size_t t = f.t.value_or(2);
          const Integer num = Integer(*f.lambda) * binomial(degree, t);
          const Integer den = binomial(*f.k, t);
          if (den == 0 || num % den != 0 || Integer(group_order) % (num / den) != 0) continue;
          const std::uint64_t b = to_u64(num / den);
          p.options.block_count = b;
          for (std::size_t i : all_classes)
            if (atlas.classes[i].order * b == group_order) p.stabilizers.push_back(i);
        } else {
          p.stabilizers = all_classes;
        }
        plans.push_back(std::move(p));
      }
    }

    for (std::size_t oc : omega2_classes) {
      auto [it, inserted] = actions.try_emplace(
          oc, coset_action(atlas.index(), atlas.classes[oc].representative, std::max(kDefaultActionCap, degree)));
      const GroupAction& action = it->second;
      for (const Plan& plan : plans) {
        const std::size_t k_mark = plan.options.block_size.value_or(0);
        DesignSweep sweep(action, oc);
        try {
          for (std::size_t sc : plan.stabilizers)
            sweep.add_stabilizer(atlas.classes[sc].representative, sc, plan.options);
        } catch (const BudgetExceeded& e) {
          report.budget_exceeded = true;
          truncated.emplace(degree, k_mark);
          report.warnings.push_back("degree " + std::to_string(degree) + ": " + e.what());
        }
        if (sweep.truncated()) {
          report.budget_exceeded = true;
          truncated.emplace(degree, k_mark);
          report.warnings.push_back("degree " + std::to_string(degree) + ", k=" + std::to_string(k_mark) +
                                    ": subset budget reached, counts are lower bounds");
        }
        spdlog::info("degree {} (class {}): {} block systems from {} subsets", degree, oc, sweep.seeds().size(),
                     sweep.subsets_examined());
        for (const auto& seed : sweep.seeds()) {
          if (seed.k < 3 || 2 * seed.k > degree) continue;
          if (plan.options.block_size && seed.k != *plan.options.block_size) continue;
          if (plan.options.block_count && seed.b != *plan.options.block_count) continue;
          IncidenceStructure d = sweep.build(seed);
          const std::size_t t_cap = config.t_cap.value_or(default_t_cap(degree));
          const TDesignProfile profile = max_t_lambda(d, t_cap);
          if (profile.t < 2) continue;
          if (!config.filters.empty() &&
              std::none_of(config.filters.begin(), config.filters.end(),
                           [&](const RowFilter& f) { return f.matches(profile.t, degree, seed.k, profile.lambda); }))
            continue;
          rows[{degree, profile.t, seed.k, profile.lambda}].push_back(std::move(d));
        }
      }
    }
  }

  for (auto& [key, designs] : rows) {
    std::vector<std::optional<CanonSummary>> summaries(designs.size());
    auto summary = [&](std::size_t i) -> const CanonSummary& {
      if (summaries[i]) return *summaries[i];
      const IncidenceStructure& d = designs[i];
      const std::string cache_key = sha256_of("design\n" + format_design(d));
      if (cache) summaries[i] = summary_from(cache->get(cache_key));
      if (!summaries[i]) {
        const CanonicalForm cf = canonical_form(encode_design(d), config.canon);
        const GroupAction& action = actions.at(d.provenance.point_class);
        const AutReport aut = aut_order_report(d, cf, action.image_generators());
        if (!aut.orbit_product_agrees) throw Error("automorphism group order cross-check failed");
        summaries[i] = CanonSummary{cf.digest(), to_string(aut.order)};
        if (cache) cache->put(cache_key, summary_json(*summaries[i]));
      }
      return *summaries[i];
    };
    const IsoClasses classes = iso_classes(designs, [&](std::size_t i) { return summary(i).digest; });
    ReportRow row;
    row.parameters = design_parameters(key.t, key.v, key.k, key.lambda);
    row.blocks = designs.front().b();
    row.count = classes.min_count;
    row.count_max = classes.max_count;
    row.lower_bound = truncated.count({key.v, 0}) || truncated.count({key.v, key.k});
    if (classes.unresolved_buckets) {
      report.warnings.push_back(row.parameters + ": " + std::to_string(classes.unresolved_buckets) +
                                " bucket(s) exceeded the canonization budget");
      report.budget_exceeded = true;
    }
    for (const auto& cls : classes.classes) {
      const IncidenceStructure& rep = designs[cls.front()];
      try {
        row.aut_orders.push_back(summary(cls.front()).aut_order);
      } catch (const BudgetExceeded&) {
        row.aut_orders.push_back("?");
        report.budget_exceeded = true;
      }
      std::size_t merged = 0;
      for (std::size_t i : cls) merged += designs[i].provenance.merged;
      row.provenance.push_back("omega2=H" + std::to_string(rep.provenance.point_class) + " stabilizer=H" +
                               std::to_string(rep.provenance.stabilizer_class) + " orbits=" +
                               join(rep.provenance.orbit_subset) + " systems=" + std::to_string(cls.size()) +
                               " subsets=" + std::to_string(merged));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Report run_srg_search(const Atlas& atlas, const RunConfig& config, Cache* cache) {
  config.validate();
  Report report;
  report.kind = "srg";
  std::set<std::size_t> degrees(config.degrees.begin(), config.degrees.end());
  for (std::size_t d : degrees)
    if (d > config.srg_max_degree)
      throw Error("degree " + std::to_string(d) + " exceeds srg_max_degree " + std::to_string(config.srg_max_degree));

  struct Found {
    SrgParameters parameters;
    std::string aut_order;
    std::string provenance;
  };
  std::map<std::string, Found> by_digest;
  SrgSearchOptions options;
  options.node_budget = config.srg_node_budget;

  for (std::size_t c = 0; c < atlas.classes.size(); ++c) {
    const std::size_t degree = atlas.classes[c].index;
    if (degree < 3 || degree > config.srg_max_degree) continue;
    if (!degrees.empty() && !degrees.count(degree)) continue;
    const GroupAction action = coset_action(atlas.index(), atlas.classes[c].representative,
                                            std::max(kDefaultActionCap, degree));
    std::vector<SrgCandidate> candidates;
    try {
      candidates = srg_orbit_graphs(action, options);
    } catch (const BudgetExceeded& e) {
      report.budget_exceeded = true;
      report.warnings.push_back("action H" + std::to_string(c) + ": " + e.what());
      continue;
    }
    spdlog::info("degree {} (class {}): {} strongly regular orbital graphs", degree, c, candidates.size());
    for (const auto& cand : candidates) {
      std::string edges;
      for (std::size_t a = 0; a < cand.graph.order(); ++a)
        for (std::size_t b : cand.graph.neighbours(a))
          if (a < b) edges += std::to_string(a) + " " + std::to_string(b) + "\n";
      const std::string cache_key = sha256_of("graph " + std::to_string(cand.graph.order()) + "\n" + edges);
      std::optional<CanonSummary> s;
      if (cache) s = summary_from(cache->get(cache_key));
      if (!s) {
        const CanonicalForm cf = canonical_form(encode_graph(cand.graph), config.canon);
        const AutReport aut = aut_order_report(cand.graph, cf);
        if (!aut.orbit_product_agrees) throw Error("automorphism group order cross-check failed");
        std::string digest = cf.digest();
        // A graph and its complement share one class when the valencies tie.
        if (2 * cand.parameters.k == cand.parameters.v - 1)
          digest = std::min(digest, canonical_form(encode_graph(cand.graph.complement()), config.canon).digest());
        s = CanonSummary{digest, to_string(aut.order)};
        if (cache) cache->put(cache_key, summary_json(*s));
      }
      by_digest.try_emplace(s->digest, Found{cand.parameters, s->aut_order,
                                             "action=H" + std::to_string(c) + " orbits=" + join(cand.orbit_subset)});
    }
  }

  std::map<SrgParameters, ReportRow> rows;
  std::map<SrgParameters, std::vector<std::pair<std::string, std::string>>> members;
  for (const auto& [digest, f] : by_digest) members[f.parameters].emplace_back(f.provenance, f.aut_order);
  for (auto& [p, list] : members) {
    std::sort(list.begin(), list.end());
    ReportRow row;
    row.parameters = "(" + std::to_string(p.v) + "," + std::to_string(p.k) + "," + std::to_string(p.lambda) + "," +
                     std::to_string(p.mu) + ")";
    row.count = row.count_max = list.size();
    for (auto& [prov, aut] : list) {
      row.provenance.push_back(prov);
      row.aut_orders.push_back(aut);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

std::filesystem::path Cache::path_of(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<nlohmann::json> Cache::get(const std::string& key) {
  const auto path = path_of(key);
  std::ifstream in(path);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::string problem;
  try {
    const nlohmann::json entry = nlohmann::json::parse(in);
    if (!entry.is_object() || entry.value("version", -1) != kVersion) problem = "version mismatch";
    else if (entry.value("key", std::string()) != key) problem = "key mismatch";
    else if (!entry.contains("value")) problem = "no value";
    else {
      ++hits_;
      return entry["value"];
    }
  } catch (const nlohmann::json::exception& e) {
    problem = e.what();
  }
  in.close();
  spdlog::warn("discarding cache entry {}: {}", path.string(), problem);
  std::error_code ec;
  std::filesystem::remove(path, ec);
  ++discarded_;
  ++misses_;
  return std::nullopt;
}

void Cache::put(const std::string& key, const nlohmann::json& value) {
  const auto path = path_of(key);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp);
    out << nlohmann::json{{"version", kVersion}, {"key", key}, {"value", value}}.dump();
    if (!out) throw Error("cannot write cache entry " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace atlas
