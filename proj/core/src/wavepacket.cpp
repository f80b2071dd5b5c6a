#include "qfs/wavepacket.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qfs/errors.hpp"

namespace qfs {

namespace {

constexpr double kPi = std::numbers::pi;

// Plan cache keyed by (shape, sign). Plans are created with FFTW_ESTIMATE
// so results are reproducible run to run, and FFTW_UNALIGNED so they can be
// executed on any buffer of the right shape.
struct PlanKey {
  std::vector<int> shape;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (sign != o.sign) return sign < o.sign;
    return shape < o.shape;
  }
};

fftw_plan plan_for(const std::vector<int>& shape, int sign, Complex* data) {
  static std::map<PlanKey, fftw_plan> cache;
  const PlanKey key{shape, sign};
  auto it = cache.find(key);
  if (it == cache.end()) {
    fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()),
                                shape.data(),
                                reinterpret_cast<fftw_complex*>(data),
                                reinterpret_cast<fftw_complex*>(data), sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    it = cache.emplace(key, p).first;
  }
  return it->second;
}

void fft_inplace(std::vector<Complex>& v, const std::vector<int>& shape, int sign) {
  fftw_plan p = plan_for(shape, sign, v.data());
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(v.data()),
                   reinterpret_cast<fftw_complex*>(v.data()));
  if (sign == FFTW_BACKWARD) {
    double n = 1.0;
    for (int s : shape) n *= s;
    const double inv = 1.0 / n;
    for (auto& z : v) z *= inv;
  }
}

std::vector<int> shape_of(const WaveFunction& psi) {
  std::vector<int> s;
  for (const auto& g : psi.grids()) s.push_back(g.n_points);
  return s;
}

// Apply f(k_axis, value) over the FFT-ordered array.
template <typename F>
void for_each_k(std::vector<Complex>& v, const std::vector<Grid>& grids,
                int axis, F&& f) {
  const auto ks = grids[axis].k_values();
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < grids.size(); ++a) inner *= grids[a].n_points;
  const std::size_t naxis = grids[axis].n_points;
  const std::size_t outer = v.size() / (inner * naxis);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t j = 0; j < naxis; ++j) {
      const double k = ks[j];
      Complex* row = v.data() + (o * naxis + j) * inner;
      for (std::size_t i = 0; i < inner; ++i) f(k, row[i]);
    }
}

}  // namespace

std::vector<double> Grid::k_values() const {
  validate();
  const double dk = 2.0 * kPi / (n_points * spacing());
  std::vector<double> ks(n_points);
  for (int j = 0; j < n_points; ++j)
    ks[j] = dk * (j <= n_points / 2 - 1 ? j : j - n_points);
  return ks;
}

double Grid::k_max() const { return kPi / spacing(); }

void Grid::validate() const {
  if (n_points < 64) throw std::invalid_argument("grid needs n_points >= 64");
  if (!(x_max > x_min)) throw std::invalid_argument("grid needs x_max > x_min");
}

WaveFunction::WaveFunction(Grid grid) : WaveFunction(std::vector<Grid>{grid}) {}

WaveFunction::WaveFunction(std::vector<Grid> grids) : grids_(std::move(grids)) {
  if (grids_.empty() || grids_.size() > 3)
    throw std::invalid_argument("configuration space supports 1..3 particles");
  std::size_t n = 1;
  for (auto& g : grids_) {
    g.validate();
    n *= g.n_points;
  }
  values_.assign(n, Complex(0.0, 0.0));
}

double WaveFunction::cell_volume() const {
  double v = 1.0;
  for (const auto& g : grids_) v *= g.spacing();
  return v;
}

std::size_t WaveFunction::flat_index(const std::vector<int>& idx) const {
  if (idx.size() != grids_.size())
    throw std::invalid_argument("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < grids_.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= grids_[a].n_points)
      throw std::out_of_range("grid index out of range");
    flat = flat * grids_[a].n_points + idx[a];
  }
  return flat;
}

double WaveFunction::norm() const {
  double s = 0.0;
  for (const auto& z : values_) s += std::norm(z);
  return std::sqrt(s * cell_volume());
}

void WaveFunction::normalize() {
  const double n = norm();
  if (n < 1e-300) throw NumericalError("cannot normalize a null field");
  const double inv = 1.0 / n;
  for (auto& z : values_) z *= inv;
}

void WaveFunction::check_normalized(double tol) const {
  const double n = norm();
  if (std::abs(n - 1.0) > tol)
    throw NumericalError("wave function norm " + std::to_string(n) +
                         " deviates from 1");
}

double WaveFunction::max_density() const {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::norm(z));
  return m;
}

double WaveFunction::edge_mass(double fraction) const {
  double mass = 0.0;
  const double dv = cell_volume();
  std::vector<std::size_t> strides(grids_.size(), 1);
  for (int a = static_cast<int>(grids_.size()) - 2; a >= 0; --a)
    strides[a] = strides[a + 1] * grids_[a + 1].n_points;
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    bool edge = false;
    for (std::size_t a = 0; a < grids_.size(); ++a) {
      const int n = grids_[a].n_points;
      const int i = static_cast<int>((flat / strides[a]) % n);
      const int band = std::max(1, static_cast<int>(n * fraction));
      if (i < band || i >= n - band) {
        edge = true;
        break;
      }
    }
    if (edge) mass += std::norm(values_[flat]) * dv;
  }
  return mass;
}

WaveFunction gaussian_packet(const PacketSpec& spec, const Grid& grid) {
  grid.validate();
  if (!(spec.sigma > 2.0 * grid.spacing()))
    throw std::invalid_argument("packet width must exceed 2 grid spacings");
  // Tail mass outside the grid, from the |psi|^2 ~ N(center, sigma^2) law.
  const double zl = (spec.center - grid.x_min) / (std::sqrt(2.0) * spec.sigma);
  const double zr = (grid.x_max - spec.center) / (std::sqrt(2.0) * spec.sigma);
  const double tail = 0.5 * (std::erfc(zl) + std::erfc(zr));
  if (tail > kTailTol)
    throw NumericalError("packet truncated by grid boundary");
  if (std::abs(spec.momentum) + 5.0 / (2.0 * spec.sigma) > grid.k_max())
    throw NumericalError("packet momentum content exceeds grid resolution");

  WaveFunction psi(grid);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.x(i);
    const double dx = x - spec.center;
    psi.values()[i] = std::exp(Complex(-dx * dx / (4.0 * spec.sigma * spec.sigma),
                                       spec.momentum * x));
  }
  psi.normalize();
  return psi;
}

std::pair<double, double> uncertainty(const WaveFunction& psi) {
  if (psi.axes() != 1)
    throw std::invalid_argument("uncertainty is defined for 1D states");
  psi.check_normalized();
  const Grid& g = psi.grid();
  const double dv = g.spacing();

  double mean_x = 0.0, mean_x2 = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double w = std::norm(psi.values()[i]) * dv;
    mean_x += w * g.x(i);
    mean_x2 += w * g.x(i) * g.x(i);
  }
  const double var_x = std::max(0.0, mean_x2 - mean_x * mean_x);

  std::vector<Complex> spec = psi.values();
  fft_inplace(spec, {g.n_points}, FFTW_FORWARD);
  const auto ks = g.k_values();
  double wsum = 0.0, mean_k = 0.0, mean_k2 = 0.0;
  for (int j = 0; j < g.n_points; ++j) {
    const double w = std::norm(spec[j]);
    wsum += w;
    mean_k += w * ks[j];
    mean_k2 += w * ks[j] * ks[j];
  }
  mean_k /= wsum;
  mean_k2 /= wsum;
  const double var_k = std::max(0.0, mean_k2 - mean_k * mean_k);
  return {std::sqrt(var_x), std::sqrt(var_k)};
}

WaveFunction evolve_free(const WaveFunction& psi, double t) {
  if (psi.edge_mass() > kTailTol)
    throw NumericalError("packet support reaches the grid boundary");
  WaveFunction out = psi;
  if (t == 0.0) return out;
  const auto shape = shape_of(psi);
  fft_inplace(out.values(), shape, FFTW_FORWARD);
  for (int axis = 0; axis < psi.axes(); ++axis)
    for_each_k(out.values(), psi.grids(), axis, [t](double k, Complex& z) {
      z *= std::exp(Complex(0.0, -0.5 * k * k * t));
    });
  fft_inplace(out.values(), shape, FFTW_BACKWARD);
  if (out.edge_mass() > kTailTol)
    throw NumericalError("packet reached the grid boundary during evolution");
  return out;
}

WaveFunction evolve_potential(const WaveFunction& psi, const RealField& v,
                              double t, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("need at least one step");
  if (v.values.size() != psi.size())
    throw std::invalid_argument("potential shape mismatch");
  const double dt = t / n_steps;
  const auto shape = shape_of(psi);
  WaveFunction out = psi;

  std::vector<Complex> half_kick(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i)
    half_kick[i] = std::exp(Complex(0.0, -0.5 * dt * v.values[i]));

  for (int s = 0; s < n_steps; ++s) {
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= half_kick[i];
    fft_inplace(out.values(), shape, FFTW_FORWARD);
    for (int axis = 0; axis < psi.axes(); ++axis)
      for_each_k(out.values(), psi.grids(), axis, [dt](double k, Complex& z) {
        z *= std::exp(Complex(0.0, -0.5 * k * k * dt));
      });
    fft_inplace(out.values(), shape, FFTW_BACKWARD);
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= half_kick[i];
  }
  if (out.edge_mass() > kTailTol)
    throw NumericalError("packet reached the grid boundary during evolution");
  return out;
}

std::vector<Complex> spectral_gradient(const WaveFunction& psi, int axis) {
  if (axis < 0 || axis >= psi.axes()) throw std::out_of_range("axis out of range");
  std::vector<Complex> v = psi.values();
  const auto shape = shape_of(psi);
  fft_inplace(v, shape, FFTW_FORWARD);
  for_each_k(v, psi.grids(), axis,
             [](double k, Complex& z) { z *= Complex(0.0, k); });
  fft_inplace(v, shape, FFTW_BACKWARD);
  return v;
}

std::vector<Complex> spectral_laplacian(const WaveFunction& psi) {
  std::vector<Complex> v = psi.values();
  const auto shape = shape_of(psi);
  fft_inplace(v, shape, FFTW_FORWARD);
  std::vector<std::vector<double>> ks;
  for (const auto& g : psi.grids()) ks.push_back(g.k_values());
  std::vector<std::size_t> strides(shape.size(), 1);
  for (int a = static_cast<int>(shape.size()) - 2; a >= 0; --a)
    strides[a] = strides[a + 1] * shape[a + 1];
  for (std::size_t flat = 0; flat < v.size(); ++flat) {
    double k2 = 0.0;
    for (std::size_t a = 0; a < shape.size(); ++a) {
      const double k = ks[a][(flat / strides[a]) % shape[a]];
      k2 += k * k;
    }
    v[flat] *= -k2;
  }
  fft_inplace(v, shape, FFTW_BACKWARD);
  return v;
}

std::vector<Complex> finite_difference_gradient(const WaveFunction& psi, int axis) {
  if (axis < 0 || axis >= psi.axes()) throw std::out_of_range("axis out of range");
  const auto& in = psi.values();
  std::vector<Complex> out(in.size());
  const int n = psi.grid(axis).n_points;
  const double inv2dx = 1.0 / (2.0 * psi.grid(axis).spacing());
  std::size_t inner = 1;
  for (int a = axis + 1; a < psi.axes(); ++a) inner *= psi.grid(a).n_points;
  const std::size_t outer = in.size() / (inner * n);
  for (std::size_t o = 0; o < outer; ++o)
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1) % n, jm = (j + n - 1) % n;
      const Complex* rp = in.data() + (o * n + jp) * inner;
      const Complex* rm = in.data() + (o * n + jm) * inner;
      Complex* ro = out.data() + (o * n + j) * inner;
      for (std::size_t i = 0; i < inner; ++i) ro[i] = (rp[i] - rm[i]) * inv2dx;
    }
  return out;
}

double kinetic_energy(const WaveFunction& psi) {
  std::vector<Complex> v = psi.values();
  const auto shape = shape_of(psi);
  fft_inplace(v, shape, FFTW_FORWARD);
  double wsum = 0.0, e = 0.0;
  for (const auto& z : v) wsum += std::norm(z);
  for (int axis = 0; axis < psi.axes(); ++axis)
    for_each_k(v, psi.grids(), axis, [&e](double k, Complex& z) {
      e += 0.5 * k * k * std::norm(z);
    });
  return e / wsum;
}

Complex overlap(const WaveFunction& a, const WaveFunction& b) {
  if (a.size() != b.size()) throw std::invalid_argument("shape mismatch");
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    s += std::conj(a.values()[i]) * b.values()[i];
  return s * a.cell_volume();
}

double probability_in(const WaveFunction& psi,
                      const std::vector<std::pair<double, double>>& intervals) {
  if (psi.axes() != 1)
    throw std::invalid_argument("interval masses are defined for 1D states");
  const Grid& g = psi.grid();
  double mass = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    for (const auto& [lo, hi] : intervals)
      if (x >= lo && x <= hi) {
        mass += std::norm(psi.values()[i]) * g.spacing();
        break;
      }
  }
  return mass;
}

WaveFunction beam_splitter(const WaveFunction& psi, const BeamSplitterSpec& spec) {
  if (psi.axes() != 1)
    throw std::invalid_argument("beam splitter acts on 1D states");
  const WaveFunction gp = gaussian_packet(spec.plus, psi.grid());
  const WaveFunction gm = gaussian_packet(spec.minus, psi.grid());
  const Complex cp = overlap(gp, psi);
  const Complex cm = overlap(gm, psi);
  const double residual =
      psi.norm() * psi.norm() - std::norm(cp) - std::norm(cm);
  if (residual > kTailTol)
    throw NumericalError("input support leaks outside the packet modes");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex bp = (cp + cm) * inv_sqrt2;
  const Complex bm = (cp - cm) * inv_sqrt2;
  WaveFunction out(psi.grid());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values()[i] = bp * gp.values()[i] + bm * gm.values()[i];
  return out;
}

void save_csv(const WaveFunction& psi, const std::string& path) {
  if (psi.axes() != 1)
    throw std::invalid_argument("CSV export supports 1D states");
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  const Grid& g = psi.grid();
  f.precision(17);
  f << "# qfsim wavefunction v1\n";
  f << "# x_min=" << g.x_min << " x_max=" << g.x_max << " n=" << g.n_points
    << "\n";
  f << "x,re,im\n";
  for (int i = 0; i < g.n_points; ++i)
    f << g.x(i) << ',' << psi.values()[i].real() << ','
      << psi.values()[i].imag() << '\n';
  if (!f) throw IoError("write failed: " + path);
}

WaveFunction load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("# qfsim wavefunction", 0) != 0)
    throw IoError("not a qfsim wavefunction file: " + path);
  if (!std::getline(f, line)) throw IoError("missing grid header: " + path);
  Grid g;
  {
    std::istringstream ss(line.substr(1));
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const double val = std::stod(tok.substr(eq + 1));
      if (key == "x_min") g.x_min = val;
      else if (key == "x_max") g.x_max = val;
      else if (key == "n") g.n_points = static_cast<int>(val);
    }
  }
  std::getline(f, line);  // column header
  WaveFunction psi(g);
  for (int i = 0; i < g.n_points; ++i) {
    if (!std::getline(f, line)) throw IoError("truncated file: " + path);
    std::istringstream ss(line);
    std::string x, re, im;
    std::getline(ss, x, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    psi.values()[i] = Complex(std::stod(re), std::stod(im));
  }
  return psi;
}

}  // namespace qfs
