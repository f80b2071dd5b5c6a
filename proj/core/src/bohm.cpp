#include "qfs/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qfs/errors.hpp"
#include "qfs/rng.hpp"

namespace qfs {

namespace {

// Separable Catmull-Rom interpolation on the uniform grids. Per axis a
// 4-point stencil with clamped boundary indices; the same weights are used
// for full-field interpolation and for conditional slicing so the two
// guidance routes agree to rounding.
struct AxisStencil {
  int idx[4];
  double w[4];
};

AxisStencil axis_stencil(const Grid& g, double x) {
  if (x < g.x_min || x > g.x_max)
    throw std::invalid_argument("position outside grid");
  const double t = (x - g.x_min) / g.spacing();
  int i1 = static_cast<int>(std::floor(t));
  if (i1 > g.n_points - 2) i1 = g.n_points - 2;
  const double u = t - i1;
  const double u2 = u * u, u3 = u2 * u;
  AxisStencil s;
  s.w[0] = -0.5 * u3 + u2 - 0.5 * u;
  s.w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  s.w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  s.w[3] = 0.5 * u3 - 0.5 * u2;
  for (int k = 0; k < 4; ++k)
    s.idx[k] = std::clamp(i1 - 1 + k, 0, g.n_points - 1);
  return s;
}

std::vector<std::size_t> strides_of(const std::vector<Grid>& grids) {
  std::vector<std::size_t> strides(grids.size(), 1);
  for (int a = static_cast<int>(grids.size()) - 2; a >= 0; --a)
    strides[a] = strides[a + 1] * grids[a + 1].n_points;
  return strides;
}

Complex interpolate(const std::vector<Complex>& values,
                    const std::vector<Grid>& grids,
                    const std::vector<double>& point) {
  const auto strides = strides_of(grids);
  std::vector<AxisStencil> st;
  st.reserve(grids.size());
  for (std::size_t a = 0; a < grids.size(); ++a)
    st.push_back(axis_stencil(grids[a], point[a]));

  Complex acc(0.0, 0.0);
  const std::size_t combos = std::size_t(1) << (2 * grids.size());
  for (std::size_t c = 0; c < combos; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < grids.size(); ++a) {
      const int k = static_cast<int>((c >> (2 * a)) & 3);
      w *= st[a].w[k];
      flat += st[a].idx[k] * strides[a];
    }
    if (w != 0.0) acc += w * values[flat];
  }
  return acc;
}

std::vector<Complex> gradient_along(const WaveFunction& psi, int axis,
                                    GradientMethod method) {
  return method == GradientMethod::Spectral
             ? spectral_gradient(psi, axis)
             : finite_difference_gradient(psi, axis);
}

void check_cfg(const WaveFunction& psi, const BohmConfiguration& cfg) {
  if (static_cast<int>(cfg.positions.size()) != psi.axes())
    throw std::invalid_argument("configuration rank mismatch");
}

}  // namespace

double velocity(const WaveFunction& psi, const BohmConfiguration& cfg,
                int particle, GradientMethod method) {
  check_cfg(psi, cfg);
  if (particle < 0 || particle >= psi.axes())
    throw std::out_of_range("particle index out of range");
  const auto grad = gradient_along(psi, particle, method);
  const Complex z = interpolate(psi.values(), psi.grids(), cfg.positions);
  const Complex dz = interpolate(grad, psi.grids(), cfg.positions);
  const double dens = std::norm(z);
  if (dens <= kNodeGuard * psi.max_density())
    throw NodeError("guidance undefined near a node");
  return std::imag(std::conj(z) * dz) / dens;
}

ConditionalWave conditional_wavefunction(const WaveFunction& psi,
                                         const BohmConfiguration& cfg,
                                         int particle) {
  check_cfg(psi, cfg);
  if (psi.axes() < 2)
    throw std::invalid_argument("conditional wave needs N >= 2 particles");
  if (particle < 0 || particle >= psi.axes())
    throw std::out_of_range("particle index out of range");

  const auto& grids = psi.grids();
  const auto strides = strides_of(grids);
  std::vector<int> frozen;  // axes other than `particle`
  std::vector<AxisStencil> st;
  for (int a = 0; a < psi.axes(); ++a)
    if (a != particle) {
      frozen.push_back(a);
      st.push_back(axis_stencil(grids[a], cfg.positions[a]));
    }

  WaveFunction out(grids[particle]);
  const int n = grids[particle].n_points;
  const std::size_t combos = std::size_t(1) << (2 * frozen.size());
  for (std::size_t c = 0; c < combos; ++c) {
    double w = 1.0;
    std::size_t base = 0;
    for (std::size_t f = 0; f < frozen.size(); ++f) {
      const int k = static_cast<int>((c >> (2 * f)) & 3);
      w *= st[f].w[k];
      base += st[f].idx[k] * strides[frozen[f]];
    }
    if (w == 0.0) continue;
    const std::size_t stride_i = strides[particle];
    for (int j = 0; j < n; ++j)
      out.values()[j] += w * psi.values()[base + j * stride_i];
  }
  const double norm = out.norm();
  if (norm < 1e-300) throw NumericalError("conditional slice is null");
  return {std::move(out), norm};
}

double velocity_conditional(const WaveFunction& psi1d, double r,
                            GradientMethod method) {
  if (psi1d.axes() != 1)
    throw std::invalid_argument("conditional velocity acts on 1D waves");
  const auto grad = gradient_along(psi1d, 0, method);
  const std::vector<double> point{r};
  const Complex z = interpolate(psi1d.values(), psi1d.grids(), point);
  const Complex dz = interpolate(grad, psi1d.grids(), point);
  const double dens = std::norm(z);
  if (dens <= kNodeGuard * psi1d.max_density())
    throw NodeError("guidance undefined near a node");
  return std::imag(std::conj(z) * dz) / dens;
}

namespace {

// Draw a cell index from weights, then a uniform point within the cell.
double sample_axis(const std::vector<double>& weights, const Grid& g, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  std::size_t cell = weights.size() - 1;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    u -= weights[j];
    if (u < 0.0) {
      cell = j;
      break;
    }
  }
  const double jitter = rng.uniform() - 0.5;
  const double x = g.x(static_cast<int>(cell)) + jitter * g.spacing();
  return std::clamp(x, g.x_min, g.x_max);
}

}  // namespace

BohmEnsemble sample_born(const WaveFunction& psi, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("ensemble needs n >= 1");
  BohmEnsemble ens;
  ens.seed = seed;
  ens.members.reserve(n);
  const auto& grids = psi.grids();
  const auto strides = strides_of(grids);

  for (int m = 0; m < n; ++m) {
    Rng rng = Rng::substream(seed, "born", static_cast<std::uint64_t>(m));
    BohmConfiguration cfg;
    std::size_t base = 0;
    for (int a = 0; a < psi.axes(); ++a) {
      // Marginal over remaining axes with earlier axes fixed at their cells.
      std::size_t rest = 1;
      for (int b = a + 1; b < psi.axes(); ++b) rest *= grids[b].n_points;
      std::vector<double> weights(grids[a].n_points, 0.0);
      for (int j = 0; j < grids[a].n_points; ++j) {
        const Complex* row = psi.values().data() + base + j * strides[a];
        double s = 0.0;
        for (std::size_t r = 0; r < rest; ++r) s += std::norm(row[r]);
        weights[j] = s;
      }
      const double x = sample_axis(weights, grids[a], rng);
      cfg.positions.push_back(x);
      const int cell = std::clamp(
          static_cast<int>(std::lround((x - grids[a].x_min) / grids[a].spacing())),
          0, grids[a].n_points - 1);
      base += static_cast<std::size_t>(cell) * strides[a];
    }
    ens.members.push_back(std::move(cfg));
  }
  return ens;
}

namespace {

void rk4_step(const FlowField& field, std::vector<double>& pos, double t,
              double dt, std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
  const std::size_t n = pos.size();
  field.velocities(pos, t, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = pos[i] + 0.5 * dt * k1[i];
  field.velocities(tmp, t + 0.5 * dt, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = pos[i] + 0.5 * dt * k2[i];
  field.velocities(tmp, t + 0.5 * dt, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = pos[i] + dt * k3[i];
  field.velocities(tmp, t + dt, k4);
  for (std::size_t i = 0; i < n; ++i)
    pos[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

struct StepWorkspace {
  std::vector<double> k1, k2, k3, k4, tmp, full, half;
  explicit StepWorkspace(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), tmp(n), full(n), half(n) {}
};

// One adaptive step: full RK4 vs two half steps, recursing while they
// disagree. Keeps trajectories convergent through splitter interference
// zones without a globally tiny dt.
void adaptive_step(const FlowField& field, std::vector<double>& pos, double t,
                   double dt, const IntegrateOptions& opts, int depth,
                   StepWorkspace& ws) {
  ws.full = pos;
  rk4_step(field, ws.full, t, dt, ws.k1, ws.k2, ws.k3, ws.k4, ws.tmp);
  if (depth >= opts.max_halvings) {
    pos = ws.full;
    return;
  }
  ws.half = pos;
  rk4_step(field, ws.half, t, 0.5 * dt, ws.k1, ws.k2, ws.k3, ws.k4, ws.tmp);
  rk4_step(field, ws.half, t + 0.5 * dt, 0.5 * dt, ws.k1, ws.k2, ws.k3, ws.k4,
           ws.tmp);
  double err = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i)
    err = std::max(err, std::abs(ws.full[i] - ws.half[i]));
  if (err <= opts.refine_tol) {
    pos = ws.half;
    return;
  }
  adaptive_step(field, pos, t, 0.5 * dt, opts, depth + 1, ws);
  adaptive_step(field, pos, t + 0.5 * dt, 0.5 * dt, opts, depth + 1, ws);
}

}  // namespace

std::vector<Trajectory> integrate_ensemble(const FlowField& field,
                                           const std::vector<BohmConfiguration>& members,
                                           double dt, double t0, double t1,
                                           const IntegrateOptions& opts) {
  if (!(dt > 0.0) || t1 < t0) throw std::invalid_argument("bad time window");
  const long long steps = std::llround((t1 - t0) / dt);
  if (steps < 1) throw std::invalid_argument("window shorter than one step");

  std::vector<Trajectory> trajs(members.size());
  std::vector<std::vector<double>> pos(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (static_cast<int>(members[m].positions.size()) != field.particles)
      throw std::invalid_argument("member rank mismatch");
    pos[m] = members[m].positions;
    trajs[m].times.push_back(t0);
    trajs[m].configurations.push_back(members[m]);
  }

  StepWorkspace ws(field.particles);
  for (long long s = 0; s < steps; ++s) {
    const double t = t0 + s * dt;
    const double step = (s == steps - 1) ? (t1 - t) : dt;
    for (std::size_t m = 0; m < members.size(); ++m) {
      std::vector<double> before = pos[m];
      adaptive_step(field, pos[m], t, step, opts, 0, ws);
      for (std::size_t i = 0; i < before.size(); ++i)
        if (std::abs(pos[m][i] - before[i]) > opts.max_step_displacement)
          throw NumericalError("step displacement exceeds the CFL guard");
      if ((s + 1) % opts.store_every == 0 || s == steps - 1) {
        trajs[m].times.push_back(t + step);
        trajs[m].configurations.push_back({pos[m]});
      }
    }
  }
  return trajs;
}

Trajectory integrate(const FlowField& field, const BohmConfiguration& cfg0,
                     double dt, double t0, double t1,
                     const IntegrateOptions& opts) {
  return integrate_ensemble(field, {cfg0}, dt, t0, t1, opts)[0];
}

namespace {

struct GridFrame {
  WaveFunction psi;
  std::vector<std::vector<Complex>> grads;  // one per axis
  double max_density = 0.0;
  explicit GridFrame(WaveFunction p) : psi(std::move(p)) {}
};

struct GridFlowState {
  std::function<WaveFunction(double)> frame_at;
  GradientMethod method;
  std::vector<std::pair<double, std::shared_ptr<GridFrame>>> cache;

  std::shared_ptr<GridFrame> frame(double t) {
    for (const auto& [time, f] : cache)
      if (time == t) return f;
    auto f = std::make_shared<GridFrame>(frame_at(t));
    for (int a = 0; a < f->psi.axes(); ++a)
      f->grads.push_back(method == GradientMethod::Spectral
                             ? spectral_gradient(f->psi, a)
                             : finite_difference_gradient(f->psi, a));
    f->max_density = f->psi.max_density();
    cache.emplace_back(t, f);
    if (cache.size() > 64) cache.erase(cache.begin());
    return f;
  }
};

}  // namespace

FlowField grid_flow(std::function<WaveFunction(double)> frame_at, int particles,
                    GradientMethod method) {
  auto state = std::make_shared<GridFlowState>();
  state->frame_at = std::move(frame_at);
  state->method = method;
  FlowField ff;
  ff.particles = particles;
  ff.velocities = [state](const std::vector<double>& positions, double t,
                          std::vector<double>& out) {
    auto f = state->frame(t);
    out.resize(positions.size());
    const Complex z = interpolate(f->psi.values(), f->psi.grids(), positions);
    const double dens = std::norm(z);
    if (dens <= kNodeGuard * f->max_density)
      throw NodeError("guidance undefined near a node");
    for (std::size_t a = 0; a < positions.size(); ++a) {
      const Complex dz = interpolate(f->grads[a], f->psi.grids(), positions);
      out[a] = std::imag(std::conj(z) * dz) / dens;
    }
  };
  return ff;
}

namespace {

long long merge_count(std::vector<std::size_t>& ranks, std::size_t lo,
                      std::size_t hi, std::vector<std::size_t>& tmp) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = (lo + hi) / 2;
  long long inv = merge_count(ranks, lo, mid, tmp) + merge_count(ranks, mid, hi, tmp);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (ranks[i] <= ranks[j])
      tmp[k++] = ranks[i++];
    else {
      inv += static_cast<long long>(mid - i);
      tmp[k++] = ranks[j++];
    }
  }
  while (i < mid) tmp[k++] = ranks[i++];
  while (j < hi) tmp[k++] = ranks[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, ranks.begin() + lo);
  return inv;
}

}  // namespace

long long crossing_pairs(const std::vector<double>& initial,
                         const std::vector<double>& final_positions) {
  if (initial.size() != final_positions.size())
    throw std::invalid_argument("size mismatch");
  const std::size_t n = initial.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return initial[a] < initial[b];
  });
  std::vector<std::size_t> final_order(n);
  std::iota(final_order.begin(), final_order.end(), 0);
  std::sort(final_order.begin(), final_order.end(), [&](std::size_t a, std::size_t b) {
    return final_positions[a] < final_positions[b];
  });
  std::vector<std::size_t> rank_of(n);
  for (std::size_t r = 0; r < n; ++r) rank_of[final_order[r]] = r;
  std::vector<std::size_t> seq(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = rank_of[order[i]];
  std::vector<std::size_t> tmp(n);
  return merge_count(seq, 0, n, tmp);
}

std::vector<double> newtonian_acceleration(const RealField& rho,
                                           const RealField& potential,
                                           const BohmConfiguration& cfg) {
  if (rho.grids.empty()) throw std::invalid_argument("empty density field");
  WaveFunction sqrt_rho(rho.grids);
  double max_rho = 0.0;
  for (double r : rho.values) max_rho = std::max(max_rho, r);
  for (std::size_t i = 0; i < rho.values.size(); ++i)
    sqrt_rho.values()[i] = std::sqrt(std::max(0.0, rho.values[i]));

  const double rho_at =
      std::norm(interpolate(sqrt_rho.values(), rho.grids, cfg.positions));
  if (rho_at <= kNodeGuard * max_rho)
    throw NodeError("quantum potential undefined near a node");

  const auto lap = spectral_laplacian(sqrt_rho);
  WaveFunction u(rho.grids);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = sqrt_rho.values()[i].real();
    const double q = (s * s > kNodeGuard * max_rho)
                         ? -0.5 * lap[i].real() / s
                         : 0.0;
    const double v = potential.values.empty() ? 0.0 : potential.values[i];
    u.values()[i] = q + v;
  }

  std::vector<double> acc(rho.grids.size());
  for (std::size_t a = 0; a < rho.grids.size(); ++a) {
    const auto du = spectral_gradient(u, static_cast<int>(a));
    acc[a] = -interpolate(du, rho.grids, cfg.positions).real();
  }
  return acc;
}

double ks_distance(const std::vector<double>& samples, const WaveFunction& psi) {
  if (psi.axes() != 1) throw std::invalid_argument("KS distance is 1D");
  std::vector<double> xs = samples;
  std::sort(xs.begin(), xs.end());
  const Grid& g = psi.grid();
  // CDF of the cell-mass distribution, piecewise linear across cells.
  std::vector<double> cdf(g.n_points + 1, 0.0);
  for (int j = 0; j < g.n_points; ++j)
    cdf[j + 1] = cdf[j] + std::norm(psi.values()[j]) * g.spacing();
  const double total = cdf.back();
  auto model_cdf = [&](double x) {
    const double t = (x - (g.x_min - 0.5 * g.spacing())) / g.spacing();
    if (t <= 0.0) return 0.0;
    if (t >= g.n_points) return 1.0;
    const int cell = static_cast<int>(t);
    const double frac = t - cell;
    return (cdf[cell] + frac * (cdf[cell + 1] - cdf[cell])) / total;
  };
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = model_cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace qfs
