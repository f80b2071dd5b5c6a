#include "qfs/gaussian_mode.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qfs/errors.hpp"

namespace qfs {

namespace {
constexpr double kPi = std::numbers::pi;
}

Complex GaussianMode::value(double x, double t) const {
  const double tau = std::min(t, freeze_time) - birth_time;
  const double s2 = sigma * sigma;
  const Complex a(1.0, tau / (2.0 * s2));
  const double dx = x - center - momentum * tau;
  const Complex arg = -dx * dx / (4.0 * s2 * a) +
                      Complex(0.0, momentum * (x - center)) -
                      Complex(0.0, 0.5 * momentum * momentum * tau);
  const Complex prefactor =
      std::pow(2.0 * kPi * s2, -0.25) / std::sqrt(a);
  return prefactor * std::exp(arg);
}

Complex GaussianMode::gradient(double x, double t) const {
  const double tau = std::min(t, freeze_time) - birth_time;
  const double s2 = sigma * sigma;
  const Complex a(1.0, tau / (2.0 * s2));
  const double dx = x - center - momentum * tau;
  return value(x, t) * (-dx / (2.0 * s2 * a) + Complex(0.0, momentum));
}

double GaussianMode::center_at(double t) const {
  const double tau = std::min(t, freeze_time) - birth_time;
  return center + momentum * tau;
}

double GaussianMode::sigma_at(double t) const {
  const double tau = std::min(t, freeze_time) - birth_time;
  const double r = tau / (2.0 * sigma * sigma);
  return sigma * std::sqrt(1.0 + r * r);
}

GaussianMode GaussianMode::rebased(double t) const {
  GaussianMode m = *this;
  m.center = center_at(t);
  m.birth_time = t;
  // The spread accumulated so far is folded into an effective width; the
  // residual chirp is dropped, so rebasing is intended for event times where
  // the packet is close to minimum uncertainty.
  m.sigma = sigma_at(t);
  return m;
}

GaussianMode GaussianMode::frozen(double t) const {
  GaussianMode m = *this;
  m.freeze_time = t;
  return m;
}

Complex ModeSum::value(double x, double t) const {
  Complex s(0.0, 0.0);
  for (const auto& [c, m] : terms) s += c * m.value(x, t);
  return s;
}

Complex ModeSum::gradient(double x, double t) const {
  Complex s(0.0, 0.0);
  for (const auto& [c, m] : terms) s += c * m.gradient(x, t);
  return s;
}

double ModeSum::velocity(double x, double t) const {
  const Complex z = value(x, t);
  const double dens = std::norm(z);
  // Node guard relative to the scale of the packet peak.
  double scale = 0.0;
  for (const auto& [c, m] : terms)
    scale += std::norm(c) / (m.sigma_at(t) * std::sqrt(2.0 * kPi));
  if (dens <= kNodeGuard * scale)
    throw NodeError("guidance undefined near a node");
  return std::imag(std::conj(z) * gradient(x, t)) / dens;
}

WaveFunction ModeSum::to_grid(const Grid& grid, double t, bool normalize) const {
  WaveFunction psi(grid);
  for (int i = 0; i < grid.n_points; ++i)
    psi.values()[i] = value(grid.x(i), t);
  if (normalize) psi.normalize();
  return psi;
}

FlowField mode_flow(std::function<ModeSum(double)> state_at) {
  FlowField ff;
  ff.particles = 1;
  ff.velocities = [state_at = std::move(state_at)](
                      const std::vector<double>& positions, double t,
                      std::vector<double>& out) {
    out.resize(1);
    out[0] = state_at(t).velocity(positions[0], t);
  };
  return ff;
}

double packet_quantile(const GaussianMode& mode, double t, double fraction) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw std::invalid_argument("fraction must be in (0, 1)");
  // Inverse normal CDF via Newton on erf; |psi|^2 is N(center, sigma^2).
  double z = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
    const double step = (cdf - fraction) / std::max(pdf, 1e-300);
    z -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return mode.center_at(t) + z * mode.sigma_at(t);
}

}  // namespace qfs
