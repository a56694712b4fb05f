#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sccs/frontier.hpp"

namespace sccs {

inline constexpr const char* kVersionString = "sccs 0.1.0";

/// Format with 12 significant digits (the file format contract).
std::string format_sig12(double v);
/// Round through the 12-significant-digit representation.
double round_sig12(double v);

struct ExperimentRow {
  std::uint64_t seed = 0;
  unsigned n = 0;
  unsigned trial = 0;
  double tv = 0.0;
  std::vector<std::pair<std::string, double>> extra;
};

struct ExperimentReport {
  std::string kind;
  nlohmann::json config_echo;
  std::vector<ExperimentRow> rows;
  std::vector<std::string> extra_columns;  // stable CSV column order
  double wall_seconds = 0.0;               // logged, never written to data files
  std::string version = kVersionString;
};

struct TrendPoint {
  unsigned n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

std::vector<TrendPoint> report_trend(const ExperimentReport& report);

void write_report_csv(const std::string& path, const ExperimentReport& report);
void write_report_json(const std::string& path, const ExperimentReport& report);

void write_frontier_csv(const std::string& path, const RegionFrontier& frontier);
void write_frontier_json(const std::string& path, const RegionFrontier& frontier,
                         const nlohmann::json& config_echo,
                         const nlohmann::json& metadata = nlohmann::json::object());

}  // namespace sccs
