#include "qfs/grw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfs/errors.hpp"

namespace qfs {

std::vector<ScheduledHit> sample_hit_schedule(int n_particles, double duration,
                                              const GRWParams& params, Rng& rng) {
  if (n_particles < 1) throw std::invalid_argument("need n_particles >= 1");
  if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
  if (!(params.tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  std::vector<ScheduledHit> hits;
  for (int p = 0; p < n_particles; ++p) {
    double t = rng.exponential(params.tau);
    while (t < duration) {
      hits.push_back({t, p});
      t += rng.exponential(params.tau);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.time < b.time;
  });
  return hits;
}

double sample_hit_center(const WaveFunction& psi, int particle, Rng& rng) {
  psi.check_normalized();
  if (particle < 0 || particle >= psi.axes())
    throw std::out_of_range("particle index out of range");
  const Grid& g = psi.grid(particle);
  std::vector<double> marginal(g.n_points, 0.0);

  std::vector<std::size_t> strides(psi.axes(), 1);
  for (int a = psi.axes() - 2; a >= 0; --a)
    strides[a] = strides[a + 1] * psi.grid(a + 1).n_points;
  for (std::size_t flat = 0; flat < psi.size(); ++flat) {
    const int j = static_cast<int>((flat / strides[particle]) % g.n_points);
    marginal[j] += std::norm(psi.values()[flat]);
  }
  const std::size_t cell = rng.discrete(marginal);
  const double jitter = rng.uniform() - 0.5;
  return std::clamp(g.x(static_cast<int>(cell)) + jitter * g.spacing(),
                    g.x_min, g.x_max);
}

WaveFunction apply_hit(const WaveFunction& psi, int particle, double center,
                       double d) {
  if (!(d > 0.0)) throw std::invalid_argument("d must be > 0");
  if (particle < 0 || particle >= psi.axes())
    throw std::out_of_range("particle index out of range");
  const Grid& g = psi.grid(particle);
  if (center < g.x_min || center > g.x_max)
    throw std::invalid_argument("hit center outside grid");

  WaveFunction out = psi;
  std::vector<std::size_t> strides(psi.axes(), 1);
  for (int a = psi.axes() - 2; a >= 0; --a)
    strides[a] = strides[a + 1] * psi.grid(a + 1).n_points;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const int j = static_cast<int>((flat / strides[particle]) % g.n_points);
    const double dx = g.x(j) - center;
    out.values()[flat] *= std::exp(-dx * dx / (2.0 * d * d));
  }
  const double n = out.norm();
  if (n < 1e-150) throw NumericalError("hit annihilates the state");
  for (auto& z : out.values()) z /= n;
  return out;
}

double tail_ratio(double l, double d) {
  if (!(l > 0.0) || !(d > 0.0)) throw std::invalid_argument("l, d must be > 0");
  return std::exp(log_tail_ratio(l, d));
}

double log_tail_ratio(double l, double d) {
  if (!(l > 0.0) || !(d > 0.0)) throw std::invalid_argument("l, d must be > 0");
  return -l * l / (2.0 * d * d);
}

double tail_disturbance(double l, double cloud, double d) {
  return std::exp(log_tail_disturbance(l, cloud, d));
}

double log_tail_disturbance(double l, double cloud, double d) {
  if (!(l > 0.0) || !(d > 0.0) || cloud < 0.0)
    throw std::invalid_argument("bad tail-disturbance parameters");
  return -l * cloud / (d * d);
}

std::array<double, 2> PointerState::weights() const {
  const double m = std::max(log_amplitude[0], log_amplitude[1]);
  const double w0 = std::exp(2.0 * (log_amplitude[0] - m));
  const double w1 = std::exp(2.0 * (log_amplitude[1] - m));
  return {w0 / (w0 + w1), w1 / (w0 + w1)};
}

void PointerState::renormalize() {
  const auto w = weights();
  log_amplitude[0] = 0.5 * std::log(std::max(w[0], 1e-300));
  log_amplitude[1] = 0.5 * std::log(std::max(w[1], 1e-300));
}

void apply_pointer_hit(PointerState& state, const GRWParams& params, Rng& rng,
                       CollapseReport* report, double time, int particle) {
  const auto w = state.weights();
  const int branch = rng.uniform() < w[0] ? 0 : 1;
  const double displacement = state.model.separation;
  // Center at the hit particle's position in the chosen branch; the other
  // branch's particle sits `displacement` away.
  state.log_amplitude[1 - branch] +=
      log_tail_ratio(std::max(displacement, 1e-300), params.d);
  state.renormalize();
  if (report) {
    const double center = (branch == 0) ? 0.0 : displacement;
    report->hits.push_back({time, particle, center});
    report->log_ratio_vs_time.emplace_back(time, state.log_ratio());
    if (state.model.internal_width > 0.0)
      report->tail_log_disturbance +=
          log_tail_disturbance(displacement, state.model.internal_width, params.d);
  }
}

CollapseReport run_collapse_with_schedule(const PointerState& initial,
                                          const GRWParams& params,
                                          const std::vector<ScheduledHit>& schedule,
                                          Rng& rng) {
  CollapseReport report;
  report.final_state = initial;
  report.log_ratio_vs_time.emplace_back(0.0, initial.log_ratio());
  for (const auto& hit : schedule)
    apply_pointer_hit(report.final_state, params, rng, &report, hit.time,
                      hit.particle);
  return report;
}

CollapseReport run_collapse(const PointerState& initial, const GRWParams& params,
                            double duration, Rng& rng) {
  const auto schedule =
      sample_hit_schedule(initial.model.n_particles, duration, params, rng);
  return run_collapse_with_schedule(initial, params, schedule, rng);
}

double mean_kinetic_drift_per_hit(const WaveFunction& psi, const GRWParams& params,
                                  int n_hits, Rng& rng) {
  if (n_hits < 1) throw std::invalid_argument("need n_hits >= 1");
  double drift = 0.0;
  WaveFunction state = psi;
  for (int h = 0; h < n_hits; ++h) {
    const double before = kinetic_energy(state);
    const double center = sample_hit_center(state, 0, rng);
    state = apply_hit(state, 0, center, params.d);
    drift += kinetic_energy(state) - before;
  }
  return drift / n_hits;
}

}  // namespace qfs
