#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace qfs {

using Complex = std::complex<double>;

// Natural units throughout: hbar = m = 1.

inline constexpr double kNormTol = 1e-9;
inline constexpr double kTailTol = 1e-8;

struct Grid {
  double x_min = -8.0;
  double x_max = 8.0;
  int n_points = 1024;

  double spacing() const { return (x_max - x_min) / (n_points - 1); }
  double x(int i) const { return x_min + i * spacing(); }
  // Wavenumbers in FFT layout for the implied periodic extension.
  std::vector<double> k_values() const;
  double k_max() const;
  void validate() const;
};

struct PacketSpec {
  double center = 1.0;
  double sigma = 0.1;      // |psi|^2 has standard deviation sigma
  double momentum = 0.0;
};

// Complex field over a product of 1D grids (configuration space, N <= 3).
// Values are row-major with axis 0 slowest.
class WaveFunction {
 public:
  explicit WaveFunction(Grid grid);
  explicit WaveFunction(std::vector<Grid> grids);

  int axes() const { return static_cast<int>(grids_.size()); }
  const Grid& grid(int axis = 0) const { return grids_.at(axis); }
  const std::vector<Grid>& grids() const { return grids_; }

  std::size_t size() const { return values_.size(); }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }

  double cell_volume() const;
  std::size_t flat_index(const std::vector<int>& idx) const;

  double norm() const;  // sqrt(sum |v|^2 dV)
  void normalize();
  void check_normalized(double tol = kNormTol) const;
  double max_density() const;

  // Probability mass in the outermost cells of every axis (fractional
  // depth per side); used to detect packets reaching the boundary.
  double edge_mass(double fraction = 0.02) const;

 private:
  std::vector<Grid> grids_;
  std::vector<Complex> values_;
};

// Real scalar field on the same kind of grid product (densities, potentials).
struct RealField {
  std::vector<Grid> grids;
  std::vector<double> values;
};

// Normalized Gaussian exp(-(x-c)^2/4 sigma^2 + i k x). Throws if the grid
// truncates more than kTailTol of the mass or the momentum content is not
// resolvable.
WaveFunction gaussian_packet(const PacketSpec& spec, const Grid& grid);

// (dx, dp) standard deviations from grid moments and discrete Fourier
// moments; 1D states only.
std::pair<double, double> uncertainty(const WaveFunction& psi);

// Exact spectral evolution under H = p^2/2 for time t (any sign).
WaveFunction evolve_free(const WaveFunction& psi, double t);

// Strang split-step evolution under H = p^2/2 + V over n_steps.
WaveFunction evolve_potential(const WaveFunction& psi, const RealField& v,
                              double t, int n_steps);

// Spectral first derivative along one axis.
std::vector<Complex> spectral_gradient(const WaveFunction& psi, int axis);
// Spectral Laplacian summed over all axes.
std::vector<Complex> spectral_laplacian(const WaveFunction& psi);
// Centered-difference first derivative along one axis (periodic wrap).
std::vector<Complex> finite_difference_gradient(const WaveFunction& psi, int axis);

double kinetic_energy(const WaveFunction& psi);

Complex overlap(const WaveFunction& a, const WaveFunction& b);

// Probability mass on a union of intervals (1D).
double probability_in(const WaveFunction& psi,
                      const std::vector<std::pair<double, double>>& intervals);

// The two packet modes a beam splitter acts on.
struct BeamSplitterSpec {
  PacketSpec plus{+1.0, 0.1, 0.0};   // the x=+1 mode
  PacketSpec minus{-1.0, 0.1, 0.0};  // the x=-1 mode
};

// Mode-basis unitary realizing packet(+1) -> (packet(+1)+packet(-1))/sqrt(2),
// packet(-1) -> (packet(+1)-packet(-1))/sqrt(2) on the packet pair. The
// output lives on the same grid read as the downstream axis. Self-inverse.
// Throws if the input has support outside the two packet modes.
WaveFunction beam_splitter(const WaveFunction& psi, const BeamSplitterSpec& spec = {});

// CSV layout: header lines with grid parameters, then rows x,re,im (1D).
void save_csv(const WaveFunction& psi, const std::string& path);
WaveFunction load_csv(const std::string& path);

}  // namespace qfs
