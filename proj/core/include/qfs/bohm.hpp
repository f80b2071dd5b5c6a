#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "qfs/wavepacket.hpp"

namespace qfs {

// Relative node guard: guidance is undefined where |psi|^2 <= eps * max|psi|^2.
inline constexpr double kNodeGuard = 1e-12;

struct BohmConfiguration {
  std::vector<double> positions;  // one per particle
};

struct Trajectory {
  std::vector<double> times;
  std::vector<BohmConfiguration> configurations;

  double position(std::size_t step, int particle = 0) const {
    return configurations.at(step).positions.at(particle);
  }
  double final_position(int particle = 0) const {
    return configurations.back().positions.at(particle);
  }
};

struct BohmEnsemble {
  std::vector<BohmConfiguration> members;
  std::uint64_t seed = 0;
};

enum class GradientMethod { Spectral, CenteredDifference };

// Guidance velocity of one particle: Im[psi* grad_i psi / psi* psi] at the
// configuration, with separable cubic interpolation off grid nodes. Throws
// NodeError below the node guard.
double velocity(const WaveFunction& psi, const BohmConfiguration& cfg,
                int particle, GradientMethod method = GradientMethod::Spectral);

struct ConditionalWave {
  WaveFunction wave;  // 1-particle, unnormalized
  double norm = 0.0;
};

// One-particle wave obtained by freezing every other particle at its
// configuration position (interpolated). Requires N >= 2.
ConditionalWave conditional_wavefunction(const WaveFunction& psi,
                                         const BohmConfiguration& cfg,
                                         int particle);

// Single-particle guidance law applied to a (possibly unnormalized) 1D wave.
double velocity_conditional(const WaveFunction& psi1d, double r,
                            GradientMethod method = GradientMethod::Spectral);

// n independent configurations drawn proportional to |psi|^2 (cell-level
// inverse CDF; per-axis conditional sampling for N >= 2).
BohmEnsemble sample_born(const WaveFunction& psi, int n, std::uint64_t seed);

// Time-dependent velocity field for N particles.
struct FlowField {
  int particles = 1;
  std::function<void(const std::vector<double>& positions, double t,
                     std::vector<double>& velocities)>
      velocities;
};

struct IntegrateOptions {
  int store_every = 1;  // keep every k-th step in the trajectory
  double max_step_displacement = std::numeric_limits<double>::infinity();
  double refine_tol = 1e-9;  // per-step Richardson tolerance
  int max_halvings = 10;
};

// RK4 transport of one configuration through the field.
Trajectory integrate(const FlowField& field, const BohmConfiguration& cfg0,
                     double dt, double t0, double t1,
                     const IntegrateOptions& opts = {});

// Lockstep RK4 transport of an ensemble (deterministic; members independent).
std::vector<Trajectory> integrate_ensemble(const FlowField& field,
                                           const std::vector<BohmConfiguration>& members,
                                           double dt, double t0, double t1,
                                           const IntegrateOptions& opts = {});

// Adapter evaluating guidance velocities from wave-function frames supplied
// per time; frames and their gradients are cached. The returned field keeps
// the shared frame cache alive.
FlowField grid_flow(std::function<WaveFunction(double)> frame_at, int particles,
                    GradientMethod method = GradientMethod::Spectral);

// Number of pairs (i, j) whose relative order differs between the two
// position lists; zero iff the transport is non-crossing.
long long crossing_pairs(const std::vector<double>& initial,
                         const std::vector<double>& final_positions);

// Acceleration per particle from the quantum-potential form
// a_j = -d/dx_j [ sum_k (-1/2) (lap sqrt(rho)/sqrt(rho)) + V ].
std::vector<double> newtonian_acceleration(const RealField& rho,
                                           const RealField& potential,
                                           const BohmConfiguration& cfg);

// Kolmogorov-Smirnov distance between sampled 1D positions and the CDF of
// |psi|^2 on its grid.
double ks_distance(const std::vector<double>& samples, const WaveFunction& psi);

}  // namespace qfs
