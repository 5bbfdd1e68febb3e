#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "otsurf/cli.hpp"

namespace otsurf {

namespace {

using nlohmann::json;

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_into(const json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::number_float:
      out += number(j.get<double>());
      return;
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",", out += nl;
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += nl + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",", out += nl;
        out += pad;
        dump_into(j[k], indent, depth + 1, out);
      }
      out += nl + close + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string cell(const json& v) {
  if (v.is_number_float()) return number(v.get<double>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// Scalar columns in the order they first appear (keys within a row are sorted).
std::string table_csv(const json& rows) {
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& row : rows)
    for (auto it = row.begin(); it != row.end(); ++it)
      if (!it.value().is_structured() && seen.insert(it.key()).second) cols.push_back(it.key());
  std::string out;
  for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + cols[c];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ",";
      if (row.contains(cols[c])) out += cell(row.at(cols[c]));
    }
    out += "\n";
  }
  return out;
}

struct PlotSpec {
  const char* scenario;
  const char* file;
  const char* x;
  const char* y;
};

constexpr PlotSpec kPlots[] = {
    {"sphere_sanity", "plot_n_vs_w2.csv", "N", "W2"},
    {"monge_regime", "plot_w2_vs_spread.csv", "W2", "max_spread"},
    {"lens_counterexample", "plot_k_vs_w2.csv", "k", "W2"},
    {"approximation_pipeline", "plot_radius_vs_w2.csv", "hull_radius", "W2"},
};

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

json ExperimentRecord::to_json() const {
  return {{"config", config}, {"scenario", scenario}, {"version", version},
          {"results", results}, {"summary", summary}, {"timing", timing}};
}

std::vector<std::string> emit_report(const ExperimentRecord& record, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  const fs::path root(dir);
  write_file(root / "record.json", dump_json(record.to_json()) + "\n");
  written.push_back((root / "record.json").string());
  write_file(root / "results.csv", table_csv(record.results));
  written.push_back((root / "results.csv").string());
  for (const auto& p : kPlots) {
    if (record.scenario != p.scenario) continue;
    std::string text = "x,y\n";
    for (const auto& row : record.results)
      if (row.contains(p.x) && row.contains(p.y)) text += cell(row.at(p.x)) + "," + cell(row.at(p.y)) + "\n";
    write_file(root / p.file, text);
    written.push_back((root / p.file).string());
  }
  return written;
}

}  // namespace otsurf
