#include "sccs/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace sccs {

std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_sig12(double v) { return std::strtod(format_sig12(v).c_str(), nullptr); }

std::vector<TrendPoint> report_trend(const ExperimentReport& report) {
  std::map<unsigned, std::vector<double>> by_n;
  for (const auto& r : report.rows) by_n[r.n].push_back(r.tv);
  std::vector<TrendPoint> out;
  for (const auto& [n, vals] : by_n) {
    TrendPoint p;
    p.n = n;
    p.count = vals.size();
    double s = 0;
    for (double v : vals) s += v;
    p.mean = s / static_cast<double>(vals.size());
    double ss = 0;
    for (double v : vals) ss += (v - p.mean) * (v - p.mean);
    p.std_error = vals.size() > 1
                      ? std::sqrt(ss / (static_cast<double>(vals.size()) - 1.0) /
                                  static_cast<double>(vals.size()))
                      : 0.0;
    out.push_back(p);
  }
  return out;
}

namespace {

// RFC-4180-style: CRLF line endings, header row mandatory. No field in our
// output needs quoting (numbers and [A-Za-z0-9_;=] generator tags only).
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ArgumentError("cannot open '" + path + "' for writing");
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

nlohmann::json rows_json(const ExperimentReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json jr;
    jr["seed"] = r.seed;
    jr["n"] = r.n;
    jr["trial"] = r.trial;
    jr["tv"] = round_sig12(r.tv);
    for (const auto& [k, v] : r.extra) jr[k] = round_sig12(v);
    rows.push_back(jr);
  }
  return rows;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  CsvWriter csv(path);
  std::vector<std::string> header = {"seed", "n", "trial", "tv"};
  header.insert(header.end(), report.extra_columns.begin(),
                report.extra_columns.end());
  csv.row(header);
  for (const auto& r : report.rows) {
    std::vector<std::string> f = {std::to_string(r.seed), std::to_string(r.n),
                                  std::to_string(r.trial), format_sig12(r.tv)};
    for (const auto& col : report.extra_columns) {
      double v = 0.0;
      for (const auto& [k, val] : r.extra)
        if (k == col) v = val;
      f.push_back(format_sig12(v));
    }
    csv.row(f);
  }
}

void write_report_json(const std::string& path, const ExperimentReport& report) {
  nlohmann::json j;
  j["kind"] = report.kind;
  j["version"] = report.version;
  j["config"] = report.config_echo;
  j["rows"] = rows_json(report);
  nlohmann::json trend = nlohmann::json::array();
  for (const auto& p : report_trend(report)) {
    trend.push_back({{"n", p.n},
                     {"mean_tv", round_sig12(p.mean)},
                     {"std_error", round_sig12(p.std_error)},
                     {"count", p.count}});
  }
  j["trend"] = trend;
  write_text(path, j.dump(2) + "\n");
}

void write_frontier_csv(const std::string& path, const RegionFrontier& frontier) {
  CsvWriter csv(path);
  std::vector<std::string> header = {"generator"};
  header.insert(header.end(), frontier.axes.begin(), frontier.axes.end());
  csv.row(header);
  const auto& rows = frontier.raw.empty() ? frontier.corners : frontier.raw;
  for (const auto& c : rows) {
    std::vector<std::string> f = {c.generator};
    for (double v : c.x) f.push_back(format_sig12(v));
    csv.row(f);
  }
}

void write_frontier_json(const std::string& path, const RegionFrontier& frontier,
                         const nlohmann::json& config_echo,
                         const nlohmann::json& metadata) {
  nlohmann::json j;
  j["version"] = kVersionString;
  j["config"] = config_echo;
  j["axes"] = frontier.axes;
  j["raw_corner_count"] = frontier.raw_corner_count;
  auto corner_json = [](const Corner& c) {
    nlohmann::json jc;
    jc["generator"] = c.generator;
    nlohmann::json x = nlohmann::json::array();
    for (double v : c.x) x.push_back(round_sig12(v));
    jc["x"] = x;
    return jc;
  };
  nlohmann::json raw = nlohmann::json::array();
  for (const auto& c : frontier.raw) raw.push_back(corner_json(c));
  j["corners"] = raw;
  nlohmann::json pareto = nlohmann::json::array();
  for (const auto& c : frontier.corners) pareto.push_back(corner_json(c));
  j["pareto_corners"] = pareto;
  nlohmann::json hull;
  hull["dimension"] = frontier.hull_dimension;
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& f : frontier.facets) {
    nlohmann::json jf;
    jf["vertices"] = f.vertices;
    nlohmann::json nrm = nlohmann::json::array();
    for (double v : f.normal) nrm.push_back(round_sig12(v));
    jf["normal"] = nrm;
    jf["offset"] = round_sig12(f.offset);
    facets.push_back(jf);
  }
  hull["facets"] = facets;
  j["hull"] = hull;
  if (!metadata.empty()) j["metadata"] = metadata;
  write_text(path, j.dump(2) + "\n");
}

}  // namespace sccs
