#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "atlas/pipeline.hpp"

namespace atlas {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote in '" + line + "'");
  return fields;
}

std::string joined(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::string count_text(const ReportRow& r) {
  if (r.count_max != r.count) return std::to_string(r.count) + "-" + std::to_string(r.count_max);
  return (r.lower_bound ? ">= " : "") + std::to_string(r.count);
}

// Distinct values, in first-seen order.
std::vector<std::string> distinct(const std::vector<std::string>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return out;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  throw ParseError("unknown report format '" + std::string(name) + "'");
}

nlohmann::json report_to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"parameters", r.parameters},
                    {"blocks", r.blocks},
                    {"count", r.count},
                    {"lower_bound", r.lower_bound},
                    {"count_max", r.count_max},
                    {"aut_orders", r.aut_orders},
                    {"provenance", r.provenance}});
  return {{"kind", report.kind},
          {"rows", rows},
          {"warnings", report.warnings},
          {"budget_exceeded", report.budget_exceeded}};
}

Report report_from_json(const nlohmann::json& j) {
  try {
    Report report;
    report.kind = j.at("kind").get<std::string>();
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    report.budget_exceeded = j.at("budget_exceeded").get<bool>();
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.parameters = r.at("parameters").get<std::string>();
      row.blocks = r.at("blocks").get<std::uint64_t>();
      row.count = r.at("count").get<std::size_t>();
      row.lower_bound = r.at("lower_bound").get<bool>();
      row.count_max = r.at("count_max").get<std::size_t>();
      row.aut_orders = r.at("aut_orders").get<std::vector<std::string>>();
      row.provenance = r.at("provenance").get<std::vector<std::string>>();
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string render_report(const Report& report, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::json:
      out << report_to_json(report).dump(2) << '\n';
      break;
    case ReportFormat::csv:
      out << "parameters,blocks,count,lower_bound,count_max,aut_orders,provenance\n";
      for (const auto& r : report.rows)
        out << csv_field(r.parameters) << ',' << r.blocks << ',' << r.count << ',' << (r.lower_bound ? 1 : 0) << ','
            << r.count_max << ',' << csv_field(joined(r.aut_orders, ";")) << ','
            << csv_field(joined(r.provenance, ";")) << '\n';
      break;
    case ReportFormat::markdown:
      if (report.kind == "srg") {
        out << "| Parameters | # non-isomorphic | Aut order |\n|---|---|---|\n";
        for (const auto& r : report.rows)
          out << "| " << r.parameters << " | " << count_text(r) << " | " << joined(distinct(r.aut_orders), ", ")
              << " |\n";
      } else {
        out << "| Parameters of designs | # of blocks | # non-isomorphic | Full automorphism group order |\n"
               "|---|---|---|---|\n";
        for (const auto& r : report.rows)
          out << "| " << r.parameters << " | " << r.blocks << " | " << count_text(r) << " | "
              << joined(distinct(r.aut_orders), ", ") << " |\n";
      }
      for (const auto& w : report.warnings) out << "\n> warning: " << w << '\n';
      break;
  }
  return out.str();
}

std::filesystem::path emit_report(const Report& report, ReportFormat format, const std::filesystem::path& dir,
                                  const std::string& stem) {
  static const std::map<ReportFormat, std::string> ext{
      {ReportFormat::csv, ".csv"}, {ReportFormat::json, ".json"}, {ReportFormat::markdown, ".md"}};
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  const auto path = dir / (stem + ext.at(format));
  std::ofstream out(path, std::ios::trunc);
  out << render_report(report, format);
  if (!out) throw Error("cannot write " + path.string());
  return path;
}

std::vector<ExpectedRow> parse_expected_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<ExpectedRow> rows;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_line(line);
    if (!header) {
      if (f != std::vector<std::string>{"parameters", "blocks", "relation", "count", "aut_order"})
        throw ParseError("expected header parameters,blocks,relation,count,aut_order");
      header = true;
      continue;
    }
    if (f.size() != 5) throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields");
    ExpectedRow row;
    try {
      row.parameters = f[0];
      if (!f[1].empty()) row.blocks = std::stoull(f[1]);
      if (f[2] == ">=") row.lower_bound = true;
      else if (f[2] != "=") throw ParseError("relation must be = or >=");
      row.count = std::stoull(f[3]);
      if (!f[4].empty()) row.aut_order = f[4];
    } catch (const std::logic_error&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad number");
    }
    rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("missing header");
  return rows;
}

std::vector<std::string> diff_report(const Report& report, const std::vector<ExpectedRow>& expected, bool complete) {
  std::vector<std::string> diffs;
  std::map<std::string, const ReportRow*> by_params;
  for (const auto& r : report.rows) by_params[r.parameters] = &r;
  std::set<std::string> seen;
  for (const auto& e : expected) {
    seen.insert(e.parameters);
    auto it = by_params.find(e.parameters);
    if (it == by_params.end()) {
      diffs.push_back(e.parameters + ": missing");
      continue;
    }
    const ReportRow& r = *it->second;
    if (e.blocks && *e.blocks != r.blocks)
      diffs.push_back(e.parameters + ": blocks " + std::to_string(r.blocks) + ", expected " + std::to_string(*e.blocks));
    if (e.lower_bound) {
      if (r.count < e.count)
        diffs.push_back(e.parameters + ": count " + std::to_string(r.count) + ", expected at least " +
                        std::to_string(e.count));
    } else if (r.count != e.count || r.count_max != e.count || r.lower_bound) {
      diffs.push_back(e.parameters + ": count " + count_text(r) + ", expected " + std::to_string(e.count));
    }
    if (e.aut_order)
      for (const auto& a : r.aut_orders)
        if (a != *e.aut_order) {
          diffs.push_back(e.parameters + ": aut order " + a + ", expected " + *e.aut_order);
          break;
        }
  }
  if (complete)
    for (const auto& r : report.rows)
      if (!seen.count(r.parameters)) diffs.push_back(r.parameters + ": not expected");
  return diffs;
}

RowFilter filter_for(const ExpectedRow& row) {
  const RowFilter f = parse_row_filter(row.parameters);
  if (!f.t || !f.v || !f.k || !f.lambda) throw ParseError("expected row '" + row.parameters + "' is not t-(v,k,lambda)");
  return f;
}

}  // namespace atlas
