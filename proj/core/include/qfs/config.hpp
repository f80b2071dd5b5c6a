#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfs/params.hpp"
#include "qfs/scenarios.hpp"

namespace qfs {

// A run is a scenario name, an explicit seed, a scenario-specific parameter
// section, and output options. Config files are INI-style:
//
//   scenario = many_worlds_bs
//   seed = 42
//   # optional:
//   output_dir = out
//   formats = json,csv
//
//   [many_worlds_bs]
//   n = 10000
//   transmit_prob = 0.7
struct RunConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  ParamMap params;
  std::string output_dir = ".";
  std::vector<std::string> formats = {"json"};
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Full summary object {scenario, seed, params, results, version}.
Json run_scenario(const RunConfig& config);

// Writes <output_dir>/<scenario>_summary.json and any CSV tables; returns
// the paths written. Outputs are byte-identical for identical (config, seed).
std::vector<std::string> run_scenario_to_files(const RunConfig& config);

}  // namespace qfs
