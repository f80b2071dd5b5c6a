// Scenario runner: `qfsim run <config>` executes one experiment from an
// INI-style config and writes structured outputs; `qfsim list` prints the
// registry. Exit codes: 0 success, 2 config error, 3 numerical-contract
// violation, 4 I/O failure.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>
#include <string>

#include "qfs/config.hpp"
#include "qfs/errors.hpp"
#include "qfs/version.hpp"

namespace {

void print_listing(bool markdown) {
  const auto& registry = qfs::scenario_registry();
  if (markdown) {
    std::cout << "| scenario | reproduces | parameters |\n";
    std::cout << "|---|---|---|\n";
    for (const auto& info : registry) {
      std::cout << "| `" << info.name << "` | " << info.anchor << " | ";
      for (std::size_t i = 0; i < info.params.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << '`' << info.params[i].name << '=' << info.params[i].default_value
                  << '`';
      }
      if (info.params.empty()) std::cout << "none";
      std::cout << " |\n";
    }
    return;
  }
  for (const auto& info : registry) {
    std::cout << info.name << "  [" << info.anchor << "]\n";
    std::cout << "    " << info.description << '\n';
    for (const auto& p : info.params)
      std::cout << "    " << p.name << " (" << p.type << ", default "
                << p.default_value << "): " << p.help << '\n';
  }
  std::cout << registry.size() << " scenarios registered\n";
}

qfs::Json error_object(const std::string& kind, const std::string& message) {
  qfs::Json e;
  e["error"] = kind;
  e["message"] = message;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale quantum foundations scenario runner"};
  app.set_version_flag("--version", qfs::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string format_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "run a scenario from a config file");
  run->add_option("config", config_path, "path to the config file")->required();
  auto* seed_opt = run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--out", out_override, "override the output directory");
  run->add_option("--format", format_override, "comma list: json,csv");

  bool markdown = false;
  auto* list = app.add_subcommand("list", "list registered scenarios");
  list->add_flag("--markdown", markdown, "emit a markdown table");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  if (list->parsed()) {
    print_listing(markdown);
    return 0;
  }

  try {
    qfs::RunConfig config = qfs::parse_config_file(config_path);
    if (seed_given) config.seed = seed_override;
    if (!out_override.empty()) config.output_dir = out_override;
    if (!format_override.empty()) {
      config.formats.clear();
      std::string fmt;
      std::istringstream fs(format_override);
      while (std::getline(fs, fmt, ','))
        if (!fmt.empty()) config.formats.push_back(fmt);
    }
    const auto written = qfs::run_scenario_to_files(config);
    for (const auto& path : written) std::cout << path << '\n';
    return 0;
  } catch (const qfs::ConfigError& e) {
    std::cerr << error_object("config", e.what()).dump() << '\n';
    return 2;
  } catch (const qfs::NumericalError& e) {
    std::cerr << error_object("numerical", e.what()).dump() << '\n';
    return 3;
  } catch (const qfs::IoError& e) {
    std::cerr << error_object("io", e.what()).dump() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << error_object("config", e.what()).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_object("internal", e.what()).dump() << '\n';
    return 1;
  }
}
