#pragma once

#include <map>
#include <string>
#include <vector>

#include "dmx/config.hpp"
#include "dmx/oracle.hpp"

namespace dmx {

// exit codes: 0 success, 1 validation, 2 solver failure, 3 comparison failure
int run_scenario(const ScenarioConfig& cfg);

struct CsvSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvSeries read_csv(const std::string& path);

struct CompareSpec {
  double rel = 1e-6;
  double abs_floor = 1e-30;
  bool interpolate = false;  // linear interpolation of B onto A's timestamps
  std::map<std::string, double> per_column;
  // "rel=1e-3,abs=1e-12,interp" plus optional "col:NAME=tol" entries
  static CompareSpec parse(const std::string& text);
};

struct CompareReport {
  std::vector<std::string> columns;
  std::vector<double> max_rel;
  bool pass = false;
};

CompareReport compare_runs(const CsvSeries& a, const CsvSeries& b, const CompareSpec& spec);

// flat binary snapshot: magic, dims, extent, then row-major doubles
void write_snapshot(const std::string& path, const VelocityGrid& g, const DistField& f);
DistField read_snapshot(const std::string& path, int& n, double& vmax);

int selftest();

}  // namespace dmx
