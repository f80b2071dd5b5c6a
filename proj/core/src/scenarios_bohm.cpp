#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qfs/errors.hpp"
#include "qfs/gaussian_mode.hpp"
#include "qfs/rng.hpp"
#include "qfs/scenarios.hpp"

namespace qfs {

namespace {

// Shared 1D splitter flow: a packet rides into the splitter at x = 0, the
// mode map fires when its center arrives, transmitted and reflected packets
// depart with +-u. Real coefficients (the Eq-3 sign convention); for a 50/50
// split the post-map field is antisymmetric about the splitter, so the
// median of the incident packet is the exact transmitted/reflected cut.
struct SplitFlow {
  GaussianMode incident;
  double transmit_amp = 0.0;
  double reflect_amp = 0.0;
  double t_map = 0.0;
  double t_end = 0.0;
  double dt = 2.5e-4;

  ModeSum at(double t) const {
    ModeSum s;
    if (t < t_map) {
      s.terms.emplace_back(1.0, incident);
    } else {
      GaussianMode trans = incident.rebased(t_map);
      GaussianMode refl = trans;
      refl.momentum = -trans.momentum;
      s.terms.emplace_back(transmit_amp, trans);
      s.terms.emplace_back(reflect_amp, refl);
    }
    return s;
  }
};

SplitFlow make_split_flow(double transmit_prob, int reflected_sign,
                          double sigma = 0.35, double speed = 30.0,
                          double start_center = -1.5) {
  if (!(transmit_prob >= 0.0) || !(transmit_prob <= 1.0))
    throw std::invalid_argument("transmit_prob must be in [0, 1]");
  SplitFlow f;
  f.incident = {start_center, speed, sigma, 0.0};
  f.transmit_amp = std::sqrt(transmit_prob);
  f.reflect_amp = reflected_sign * std::sqrt(1.0 - transmit_prob);
  f.t_map = -start_center / speed;
  f.t_end = f.t_map + 1.2 / speed;  // outputs separated by ~2.4 at the end
  return f;
}

// Integrate one particle through the flow, landing exactly on t_map.
Trajectory run_split_trajectory(const SplitFlow& flow, double x0,
                                const IntegrateOptions& opts = {}) {
  auto state_at = [flow](double t) { return flow.at(t); };
  const FlowField field = mode_flow(state_at);
  Trajectory first =
      integrate(field, {{x0}}, flow.dt, 0.0, flow.t_map, opts);
  Trajectory second = integrate(field, first.configurations.back(), flow.dt,
                                flow.t_map, flow.t_end, opts);
  for (std::size_t i = 1; i < second.times.size(); ++i) {
    first.times.push_back(second.times[i]);
    first.configurations.push_back(second.configurations[i]);
  }
  return first;
}

}  // namespace

SternGerlachBohmResult stern_gerlach_bohm(int magnet_sign, double initial_fraction) {
  if (magnet_sign != 1 && magnet_sign != -1)
    throw std::invalid_argument("magnet_sign must be +1 or -1");
  if (!(initial_fraction > 0.0) || !(initial_fraction < 1.0))
    throw std::invalid_argument("initial_fraction must be in (0, 1)");
  if (std::abs(initial_fraction - 0.5) < 1e-9)
    throw std::invalid_argument("initial position on the exact symmetry line");

  // Flipping the device reroutes the +1 eigenstate to the other port, which
  // flips the reflected-mode sign; the 50/50 spatial split is unchanged.
  const SplitFlow flow = make_split_flow(0.5, -magnet_sign);
  const double x0 = packet_quantile(flow.incident, 0.0, initial_fraction);

  SternGerlachBohmResult result;
  IntegrateOptions opts;
  opts.store_every = 8;
  result.trajectory = run_split_trajectory(flow, x0, opts);
  const bool transmitted = result.trajectory.final_position() > 0.0;
  result.final_spot = transmitted ? Spot::Upper : Spot::Lower;
  // Device labeling: with magnet_sign = +1 the lower spot reads DOWN.
  const bool lower = !transmitted;
  if (magnet_sign == +1)
    result.outcome = lower ? SpinLabel::Down : SpinLabel::Up;
  else
    result.outcome = lower ? SpinLabel::Up : SpinLabel::Down;
  return result;
}

ManyWorldsBsResult many_worlds_bs(int n, double transmit_prob, std::uint64_t seed,
                                  int fan_size) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  const SplitFlow flow = make_split_flow(transmit_prob, -1);

  Rng rng = Rng::substream(seed, "many_worlds_bs");
  ManyWorldsBsResult result;
  result.initial_positions.reserve(n);
  for (int m = 0; m < n; ++m)
    result.initial_positions.push_back(
        packet_quantile(flow.incident, 0.0, rng.uniform()));

  auto state_at = [flow](double t) { return flow.at(t); };
  const FlowField field = mode_flow(state_at);
  std::vector<BohmConfiguration> members;
  members.reserve(n);
  for (double x : result.initial_positions) members.push_back({{x}});

  IntegrateOptions opts;
  opts.store_every = 1 << 30;  // endpoints only for the bulk ensemble
  auto first = integrate_ensemble(field, members, flow.dt, 0.0, flow.t_map, opts);
  std::vector<BohmConfiguration> mid;
  mid.reserve(n);
  for (auto& t : first) mid.push_back(t.configurations.back());
  auto second =
      integrate_ensemble(field, mid, flow.dt, flow.t_map, flow.t_end, opts);

  int transmitted = 0;
  result.final_positions.reserve(n);
  for (auto& t : second) {
    const double x = t.final_position();
    result.final_positions.push_back(x);
    if (x > 0.0) ++transmitted;
  }
  result.transmitted_fraction = static_cast<double>(transmitted) / n;
  result.crossings = crossing_pairs(result.initial_positions, result.final_positions);

  IntegrateOptions fan_opts;
  fan_opts.store_every = 10;
  for (int m = 0; m < std::min(fan_size, n); ++m) {
    const int pick = m * n / std::max(1, std::min(fan_size, n));
    result.fan.push_back(
        run_split_trajectory(flow, result.initial_positions[pick], fan_opts));
  }
  return result;
}

EquivarianceResult equivariance_check(int n, double transmit_prob,
                                      std::uint64_t seed) {
  const SplitFlow flow = make_split_flow(transmit_prob, -1);
  Rng rng = Rng::substream(seed, "equivariance");

  std::vector<BohmConfiguration> members;
  members.reserve(n);
  for (int m = 0; m < n; ++m)
    members.push_back({{packet_quantile(flow.incident, 0.0, rng.uniform())}});

  auto state_at = [flow](double t) { return flow.at(t); };
  const FlowField field = mode_flow(state_at);

  EquivarianceResult result;
  result.checkpoint_times = {0.6 * flow.t_map, flow.t_map + 0.15 / flow.incident.momentum,
                             flow.t_end};
  const Grid fine{-6.0, 6.0, 4096};
  IntegrateOptions opts;
  opts.store_every = 1 << 30;

  double t_prev = 0.0;
  for (double t_check : result.checkpoint_times) {
    auto trajs = integrate_ensemble(field, members, flow.dt, t_prev, t_check, opts);
    std::vector<double> xs;
    xs.reserve(n);
    members.clear();
    for (auto& tr : trajs) {
      members.push_back(tr.configurations.back());
      xs.push_back(tr.final_position());
    }
    const WaveFunction psi = flow.at(t_check).to_grid(fine, t_check);
    result.ks_values.push_back(ks_distance(xs, psi));
    t_prev = t_check;
  }
  return result;
}

namespace {

// ---- GHZ guidance dynamics -------------------------------------------------
//
// The entangled state is a sum of four product terms over per-site packet
// modes. Each site holds a mode table; a measurement episode re-aims that
// site's modes at the splitter, integrates the site's particle in its
// conditional wave, applies the splitter mode map when the packets meet,
// and parks the outputs back at x = +-1.

constexpr double kGhzSigma = 0.2;
constexpr double kGhzSpeed = 30.0;

enum ModeId : int { kMinus = 0, kPlus = 1, kOutLeft = 2, kOutRight = 3 };

struct SiteModes {
  std::array<GaussianMode, 4> table;
  SiteModes() {
    table[kMinus] = {-1.0, 0.0, kGhzSigma, 0.0};
    table[kPlus] = {+1.0, 0.0, kGhzSigma, 0.0};
  }
};

struct GhzTerm {
  Complex coeff;
  std::array<int, 3> label;  // mode id per site
};

struct GhzState {
  std::vector<GhzTerm> terms;
  std::array<SiteModes, 3> sites;

  GhzState() {
    terms.push_back({0.5, {kMinus, kPlus, kPlus}});
    terms.push_back({0.5, {kPlus, kMinus, kPlus}});
    terms.push_back({0.5, {kPlus, kPlus, kMinus}});
    terms.push_back({-0.5, {kMinus, kMinus, kMinus}});
  }

  Complex site_value(int site, int mode, double x, double t) const {
    return sites[site].table[mode].value(x, t);
  }

  // Conditional wave of `site` at time t with the other positions frozen.
  ModeSum conditional(int site, const std::array<double, 3>& positions,
                      double t) const {
    ModeSum cond;
    for (const auto& term : terms) {
      Complex weight = term.coeff;
      for (int j = 0; j < 3; ++j)
        if (j != site) weight *= site_value(j, term.label[j], positions[j], t);
      if (std::norm(weight) < 1e-120) continue;
      cond.terms.emplace_back(weight, sites[site].table[term.label[site]]);
    }
    return cond;
  }

  double density(const std::array<double, 3>& positions, double t) const {
    Complex amp(0.0, 0.0);
    for (const auto& term : terms) {
      Complex w = term.coeff;
      for (int j = 0; j < 3; ++j)
        w *= site_value(j, term.label[j], positions[j], t);
      amp += w;
    }
    return std::norm(amp);
  }
};

// One y-measurement episode at `site` with splitter orientation o.
// Returns the port sign (+1 right / -1 left) and advances time bookkeeping.
int run_episode(GhzState& state, int site, int orientation,
                std::array<double, 3>& positions, double t_start) {
  const double u = kGhzSpeed;
  const double t_map = t_start + 1.0 / u;
  const double t_end = t_map + 1.0 / u;
  const double dt = 2.0e-4;

  // Re-aim the site's packet modes at the splitter.
  auto& table = state.sites[site].table;
  table[kMinus] = table[kMinus].rebased(t_start);
  table[kMinus].momentum = +u;
  table[kMinus].freeze_time = std::numeric_limits<double>::infinity();
  table[kPlus] = table[kPlus].rebased(t_start);
  table[kPlus].momentum = -u;
  table[kPlus].freeze_time = std::numeric_limits<double>::infinity();

  auto integrate_phase = [&](double t0, double t1) {
    auto state_at = [&state, site, &positions](double t) {
      return state.conditional(site, positions, t);
    };
    const FlowField field = mode_flow(state_at);
    IntegrateOptions opts;
    opts.store_every = 1 << 30;
    const Trajectory tr = integrate(field, {{positions[site]}}, dt, t0, t1, opts);
    positions[site] = tr.final_position();
  };

  integrate_phase(t_start, t_map);

  // Splitter mode map: the packets have met at x = 0; outputs depart at +-u.
  GaussianMode out_right = table[kMinus].rebased(t_map);
  out_right.momentum = +u;
  GaussianMode out_left = out_right;
  out_left.momentum = -u;
  table[kOutRight] = out_right;
  table[kOutLeft] = out_left;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<GhzTerm> expanded;
  for (const auto& term : state.terms) {
    // |x=+1> -> (R + L)/sqrt2,  |x=-1> -> o (R - L)/sqrt2
    const int m = term.label[site];
    const double sign_l = (m == kPlus) ? +1.0 : -1.0;
    const double scale = (m == kPlus) ? 1.0 : orientation;
    GhzTerm right = term;
    right.coeff = term.coeff * scale * inv_sqrt2;
    right.label[site] = kOutRight;
    GhzTerm left = term;
    left.coeff = term.coeff * scale * sign_l * inv_sqrt2;
    left.label[site] = kOutLeft;
    expanded.push_back(right);
    expanded.push_back(left);
  }
  state.terms = std::move(expanded);

  integrate_phase(t_map, t_end);

  // Park the outputs at the rails.
  table[kOutRight] = table[kOutRight].rebased(t_end).frozen(t_end);
  table[kOutLeft] = table[kOutLeft].rebased(t_end).frozen(t_end);

  return positions[site] > 0.0 ? +1 : -1;
}

}  // namespace

GhzBohmResult ghz_bohm(const GhzBohmOptions& opts) {
  for (int o : {opts.orientation_a, opts.orientation_b, opts.orientation_c})
    if (o != 1 && o != -1)
      throw std::invalid_argument("orientations must be +1 or -1");

  GhzState state;
  std::array<double, 3> positions;
  const std::array<double, 3> fractions{opts.fraction_a, opts.fraction_b,
                                        opts.fraction_c};
  for (int s = 0; s < 3; ++s) {
    const int mode = opts.start_right ? kPlus : kMinus;
    positions[s] =
        packet_quantile(state.sites[s].table[mode], 0.0, fractions[s]);
  }
  const double reference_density = state.density({-1.0, -1.0, -1.0}, 0.0);
  if (state.density(positions, 0.0) <= 1e-12 * reference_density)
    throw NodeError("initial positions inconsistent with the GHZ support");

  GhzBohmResult result;
  if (opts.all_x) {
    result.outcome_a = positions[0] > 0.0 ? +1 : -1;
    result.outcome_b = positions[1] > 0.0 ? +1 : -1;
    result.outcome_c = positions[2] > 0.0 ? +1 : -1;
    result.parity = result.outcome_a * result.outcome_b * result.outcome_c;
    return result;
  }

  const int first_site = opts.c_before_b ? 2 : 1;
  const int second_site = opts.c_before_b ? 1 : 2;
  const int first_orient = opts.c_before_b ? opts.orientation_c : opts.orientation_b;
  const int second_orient = opts.c_before_b ? opts.orientation_b : opts.orientation_c;

  const int port_first = run_episode(state, first_site, first_orient, positions, 0.0);
  const int port_second =
      run_episode(state, second_site, second_orient, positions, 2.0 / kGhzSpeed);

  const int y_first = first_orient * port_first;
  const int y_second = second_orient * port_second;

  result.outcome_a = positions[0] > 0.0 ? +1 : -1;
  result.outcome_b = opts.c_before_b ? y_second : y_first;
  result.outcome_c = opts.c_before_b ? y_first : y_second;
  result.parity = result.outcome_a * result.outcome_b * result.outcome_c;
  return result;
}

}  // namespace qfs
