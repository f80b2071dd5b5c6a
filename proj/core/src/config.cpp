#include "qfs/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qfs/errors.hpp"
#include "qfs/version.hpp"

namespace qfs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::map<std::string, std::string> top;
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string current;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
      current = trim(t.substr(1, t.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (current.empty())
      top[key] = value;
    else
      sections[current][key] = value;
  }

  for (const auto& [key, value] : top) {
    if (key == "scenario") {
      config.scenario = value;
    } else if (key == "seed") {
      try {
        config.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ConfigError("seed is not an integer: " + value);
      }
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "formats") {
      config.formats.clear();
      std::istringstream fs(value);
      std::string fmt;
      while (std::getline(fs, fmt, ',')) {
        fmt = trim(fmt);
        if (fmt != "json" && fmt != "csv")
          throw ConfigError("unknown format: " + fmt);
        config.formats.push_back(fmt);
      }
    } else {
      throw ConfigError("unknown top-level key: " + key);
    }
  }

  if (config.scenario.empty()) throw ConfigError("config must set 'scenario'");
  if (top.find("seed") == top.end())
    throw ConfigError("config must set 'seed' explicitly");
  if (config.formats.empty()) config.formats = {"json"};

  for (const auto& [name, kv] : sections) {
    if (name != config.scenario)
      throw ConfigError("section [" + name + "] does not match scenario " +
                        config.scenario);
    config.params = ParamMap(kv);
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << f.rdbuf();
  return parse_config_text(buffer.str());
}

Json run_scenario(const RunConfig& config) {
  const ScenarioInfo* info = find_scenario(config.scenario);
  if (!info) throw ConfigError("unknown scenario: " + config.scenario);
  std::vector<std::string> allowed;
  for (const auto& spec : info->params) allowed.push_back(spec.name);
  config.params.require_known(allowed, config.scenario);

  const ScenarioResult result = info->run(config.params, config.seed);

  Json summary;
  summary["scenario"] = config.scenario;
  summary["seed"] = config.seed;
  Json params = Json::object();
  for (const auto& [k, v] : config.params.raw()) params[k] = v;
  summary["params"] = params;
  summary["results"] = result.summary;
  summary["version"] = kVersion;
  return summary;
}

std::vector<std::string> run_scenario_to_files(const RunConfig& config) {
  const ScenarioInfo* info = find_scenario(config.scenario);
  if (!info) throw ConfigError("unknown scenario: " + config.scenario);
  std::vector<std::string> allowed;
  for (const auto& spec : info->params) allowed.push_back(spec.name);
  config.params.require_known(allowed, config.scenario);

  const ScenarioResult result = info->run(config.params, config.seed);

  Json summary;
  summary["scenario"] = config.scenario;
  summary["seed"] = config.seed;
  Json params = Json::object();
  for (const auto& [k, v] : config.params.raw()) params[k] = v;
  summary["params"] = params;
  summary["results"] = result.summary;
  summary["version"] = kVersion;

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + config.output_dir);

  std::vector<std::string> written;
  const bool want_json = std::find(config.formats.begin(), config.formats.end(),
                                   "json") != config.formats.end();
  const bool want_csv = std::find(config.formats.begin(), config.formats.end(),
                                  "csv") != config.formats.end();

  if (want_json) {
    const std::string path =
        (fs::path(config.output_dir) / (config.scenario + "_summary.json")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << summary.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
    written.push_back(path);
  }
  if (want_csv) {
    for (const auto& [name, body] : result.csv_tables) {
      const std::string path =
          (fs::path(config.output_dir) / (config.scenario + "_" + name + ".csv"))
              .string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw IoError("cannot write " + path);
      out << body;
      if (!out) throw IoError("write failed: " + path);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace qfs
