#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "qfs/bohm.hpp"
#include "qfs/wavepacket.hpp"

namespace qfs {

// Free-particle Gaussian packet in closed form (hbar = m = 1):
//   psi(x, t) = (2 pi s0^2)^{-1/4} a^{-1/2}
//               exp( -(x - c - k tau)^2 / (4 s0^2 a) + i k (x - c) - i k^2 tau / 2 )
// with a = 1 + i tau / (2 s0^2), tau = t - birth_time. A frozen mode stops
// its clock at freeze_time (a packet parked in an output port).
struct GaussianMode {
  double center = 0.0;
  double momentum = 0.0;
  double sigma = 0.1;
  double birth_time = 0.0;
  double freeze_time = std::numeric_limits<double>::infinity();

  Complex value(double x, double t) const;
  Complex gradient(double x, double t) const;
  double center_at(double t) const;
  double sigma_at(double t) const;

  // The same packet re-anchored at time t (for mode-map events).
  GaussianMode rebased(double t) const;
  GaussianMode frozen(double t) const;
};

// Linear combination of Gaussian modes: the analytic states scenarios evolve.
struct ModeSum {
  std::vector<std::pair<Complex, GaussianMode>> terms;

  Complex value(double x, double t) const;
  Complex gradient(double x, double t) const;
  double density(double x, double t) const { return std::norm(value(x, t)); }
  double velocity(double x, double t) const;  // guidance law; node-guarded

  // Sampled onto a grid (normalized when requested).
  WaveFunction to_grid(const Grid& grid, double t, bool normalize = true) const;
};

// Single-particle guidance field for a time-dependent mode sum, possibly
// piecewise (mode maps firing at event times).
FlowField mode_flow(std::function<ModeSum(double)> state_at);

// Quantile of the |mode|^2 distribution (Gaussian), for placing a particle
// at a stated fraction within a packet.
double packet_quantile(const GaussianMode& mode, double t, double fraction);

}  // namespace qfs
