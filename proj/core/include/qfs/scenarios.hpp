#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfs/bohm.hpp"
#include "qfs/grw.hpp"
#include "qfs/params.hpp"

namespace qfs {

using Json = nlohmann::ordered_json;

struct ScenarioResult {
  Json summary;                                   // scenario-specific results
  std::map<std::string, std::string> csv_tables;  // name -> CSV body
};

using ScenarioFn = ScenarioResult (*)(const ParamMap&, std::uint64_t seed);

struct ScenarioInfo {
  std::string name;
  std::string anchor;  // figure/equation the scenario reproduces
  std::string description;
  std::vector<ParamSpec> params;
  ScenarioFn run = nullptr;
};

const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo* find_scenario(const std::string& name);

// ---- direct entry points used by tests and by the registry wrappers ----

enum class Spot { Lower, Upper };
enum class SpinLabel { Down, Up };

struct SternGerlachBohmResult {
  Spot final_spot = Spot::Lower;
  SpinLabel outcome = SpinLabel::Down;
  Trajectory trajectory;
};

// The position-variable analogue of the spin measurement: a packet split
// 50/50 at a splitter; the device orientation (magnet_sign) decides which
// spot is labeled which outcome, the trajectory decides the spot.
SternGerlachBohmResult stern_gerlach_bohm(int magnet_sign, double initial_fraction);

struct SternGerlachGrwResult {
  CollapseReport report;
  bool collapsed_after_first_hit = false;
  double weight_shift_after_10_hits = 0.0;
};

enum class DisplayKind { Pointer, Screen };
SternGerlachGrwResult stern_gerlach_grw(DisplayKind display, const PointerModel& model,
                                        const GRWParams& params, double duration,
                                        std::uint64_t seed);

struct GhzBohmOptions {
  int orientation_a = +1;  // unused by the dynamics, part of the sweep
  int orientation_b = +1;
  int orientation_c = +1;
  bool c_before_b = false;        // measurement order of the two y-sites
  double fraction_a = 0.25;       // quantile of each particle within its packet
  double fraction_b = 0.25;
  double fraction_c = 0.25;
  bool all_x = false;             // measure x at every site instead (Eq-5 run)
  bool start_right = false;       // place positions in the x=+1 packets (no support)
};

struct GhzBohmResult {
  int outcome_a = 0;  // x_A (or per-site x in the all_x variant)
  int outcome_b = 0;  // y_B
  int outcome_c = 0;  // y_C
  int parity = 0;     // product of the three outcomes
};

// Guidance dynamics on the entangled GHZ packet state with all positions in
// the x=-1 packets; conditional waves steer each measured site.
GhzBohmResult ghz_bohm(const GhzBohmOptions& opts);

struct ManyWorldsBsResult {
  double transmitted_fraction = 0.0;
  long long crossings = 0;
  std::vector<double> initial_positions;
  std::vector<double> final_positions;
  std::vector<Trajectory> fan;  // decimated trajectories for a subset
};

ManyWorldsBsResult many_worlds_bs(int n, double transmit_prob, std::uint64_t seed,
                                  int fan_size = 0);

// Born ensemble transported through the splitter flow; KS distance to
// |psi_t|^2 at the requested checkpoint times.
struct EquivarianceResult {
  std::vector<double> checkpoint_times;
  std::vector<double> ks_values;
};
EquivarianceResult equivariance_check(int n, double transmit_prob, std::uint64_t seed);

struct IfmResult {
  double p_bright = 0.0;
  double p_dark = 0.0;
  double p_absorbed = 0.0;
};

// Mach-Zehnder mode algebra, dark port exactly dark at phase = 0 without the
// object; the object sits in the transmitted arm as a flagged absorber mode.
IfmResult ifm(bool object_present, double reflectivity = 0.5, double phase = 0.0);
// Same experiment on the spatial grid with packet modes (the oracle route).
IfmResult ifm_grid_oracle(bool object_present);

struct TraceReport {
  // Marker excitation probability per segment.
  std::map<std::string, double> excitation;
  std::string post_selection;  // D1 | D2 | D3 | UNIVERSE
  double post_selection_probability = 1.0;
};

// Nested interferometer with two-level markers rotated by epsilon along each
// traversed segment; inner pair tuned dark toward the exit continuation.
TraceReport nested_mzi_trace(double epsilon, const std::string& post_selection);

struct AlienBetResult {
  double mu_world = 0.0;
  double mu_parallel = 0.0;
  double p_min = 0.0;  // achievable dark-port probability range under the
  double p_max = 0.0;  // externally controlled phase
};
AlienBetResult alien_bet(double mu_world);

}  // namespace qfs
