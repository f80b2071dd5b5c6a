#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "qfs/rng.hpp"
#include "qfs/wavepacket.hpp"

namespace qfs {

struct GRWParams {
  double tau = 1.0;  // mean time between hits per particle
  double d = 1.0;    // localization width
};

// The paper-scale values (cgs): tau = 1e8 years in seconds, d = 1e-5 cm,
// pointer spacing l = 5 cm, electron cloud D = 1e-8 cm. Only usable through
// the log-space factors.
struct PhysicalPreset {
  static constexpr double tau_seconds = 1.0e8 * 365.25 * 24 * 3600;
  static constexpr double d_cm = 1.0e-5;
  static constexpr double l_cm = 5.0;
  static constexpr double cloud_cm = 1.0e-8;
};

struct ScheduledHit {
  double time = 0.0;
  int particle = 0;
};

struct HitEvent {
  double time = 0.0;
  int particle = 0;
  double center = 0.0;
};

// Per-particle Poisson process of rate 1/tau over [0, duration), merged and
// sorted by time.
std::vector<ScheduledHit> sample_hit_schedule(int n_particles, double duration,
                                              const GRWParams& params, Rng& rng);

// Hit center drawn from the marginal position density of one particle.
double sample_hit_center(const WaveFunction& psi, int particle, Rng& rng);

// Multiply the wave function by exp(-(r_i - center)^2 / (2 d^2)) along one
// coordinate and renormalize. With this amplitude convention a two-branch
// superposition at separation l has its branch ratio multiplied by
// exp(-l^2 / (2 d^2)), the closed form of tail_ratio.
WaveFunction apply_hit(const WaveFunction& psi, int particle, double center,
                       double d);

double tail_ratio(double l, double d);          // exp(-l^2 / 2d^2)
double log_tail_ratio(double l, double d);      // -l^2 / 2d^2
double tail_disturbance(double l, double cloud, double d);      // exp(-l*D/d^2)
double log_tail_disturbance(double l, double cloud, double d);  // -l*D/d^2

// Macroscopic body in a superposition of two readings, compressed to branch
// log-amplitudes plus a rigid per-particle displacement between readings.
struct PointerModel {
  int n_particles = 1000;
  double separation = 100.0;     // per-particle displacement between readings
  double internal_width = 0.0;   // electron-cloud scale for disturbance bookkeeping
};

struct PointerState {
  PointerModel model;
  std::array<double, 2> log_amplitude{std::log(1.0 / std::sqrt(2.0)),
                                      std::log(1.0 / std::sqrt(2.0))};

  // log(|a_1| / |a_0|)
  double log_ratio() const { return log_amplitude[1] - log_amplitude[0]; }
  std::array<double, 2> weights() const;
  void renormalize();
};

struct CollapseReport {
  PointerState final_state;
  std::vector<HitEvent> hits;
  std::vector<std::pair<double, double>> log_ratio_vs_time;
  // Accumulated log of the internal-disturbance factor suffered by the
  // suppressed branch (0 when internal_width is 0).
  double tail_log_disturbance = 0.0;
};

// Applies one hit to the compressed state: the center lands on the hit
// particle's position in a Born-chosen branch; the other branch's amplitude
// picks up the tail factor for the rigid displacement.
void apply_pointer_hit(PointerState& state, const GRWParams& params, Rng& rng,
                       CollapseReport* report, double time, int particle);

CollapseReport run_collapse(const PointerState& initial, const GRWParams& params,
                            double duration, Rng& rng);
// Same, with an externally fixed schedule (shared-schedule comparisons).
CollapseReport run_collapse_with_schedule(const PointerState& initial,
                                          const GRWParams& params,
                                          const std::vector<ScheduledHit>& schedule,
                                          Rng& rng);

// Mean kinetic-energy change per hit on a grid state, hits sampled from the
// state itself. A diagnostic; no threshold attached.
double mean_kinetic_drift_per_hit(const WaveFunction& psi, const GRWParams& params,
                                  int n_hits, Rng& rng);

}  // namespace qfs
