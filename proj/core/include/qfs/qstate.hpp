#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qfs/rng.hpp"

namespace qfs {

using Complex = std::complex<double>;

inline constexpr double kAlgebraTol = 1e-12;     // exact algebra on <=64-dim spaces
inline constexpr double kInequalityTol = 1e-10;  // slack for inequalities

// Which of the two dichotomic variables an observable refers to.
enum class Dichotomic { XTilde, YTilde };

// The basis a qubit site is currently expressed in. Amplitude index 0 of a
// site is the +1 eigenstate of the site's basis variable, index 1 the -1
// eigenstate. The x basis is canonical; y components are reached only via
// an explicit basis change.
enum class SiteBasis { X, Y };

struct DichotomicObservable {
  int site = 0;
  Dichotomic kind = Dichotomic::XTilde;
};

inline DichotomicObservable x_tilde(int site) { return {site, Dichotomic::XTilde}; }
inline DichotomicObservable y_tilde(int site) { return {site, Dichotomic::YTilde}; }

// Finite-dimensional state over a labeled tensor basis, site-major layout
// (site 0 has the largest stride).
class StateVector {
 public:
  StateVector(std::vector<int> dims, Eigen::VectorXcd amplitudes);

  static StateVector qubits(int n_sites, int basis_index = 0);

  int site_count() const { return static_cast<int>(dims_.size()); }
  int dim(int site) const { return dims_.at(site); }
  const std::vector<int>& dims() const { return dims_; }
  Eigen::Index size() const { return amplitudes_.size(); }

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() { return amplitudes_; }

  SiteBasis basis(int site) const { return bases_.at(site); }
  void set_basis(int site, SiteBasis b) { bases_.at(site) = b; }

  // Flat index of a tensor basis element given per-site indices.
  Eigen::Index flat_index(const std::vector<int>& per_site) const;
  Complex amplitude(const std::vector<int>& per_site) const {
    return amplitudes_(flat_index(per_site));
  }

  // Per-site symbol for a basis index, e.g. "+x" / "-y".
  std::string site_label(int site, int index) const;

  double norm() const { return amplitudes_.norm(); }
  void check_normalized(double tol = kAlgebraTol) const;

  // Apply a 2x2 matrix at a qubit site (site-local contraction).
  void apply_site_matrix(int site, const Eigen::Matrix2cd& m);

 private:
  std::vector<int> dims_;
  std::vector<SiteBasis> bases_;
  Eigen::VectorXcd amplitudes_;
};

struct HermitianOperator {
  Eigen::MatrixXcd matrix;
  explicit HermitianOperator(Eigen::MatrixXcd m);
};

// Matrix of a dichotomic observable in the basis a site is currently
// written in: diagonal(+1,-1) when the observable matches the site basis,
// the symmetric off-diagonal form otherwise (the Eq-style real convention,
// phases +1/-1).
Eigen::Matrix2cd dichotomic_matrix(Dichotomic kind, SiteBasis basis);

// |x=+-1> <-> (|y=+1> +- |y=-1>)/sqrt(2) at one site; involutive; toggles
// the site's basis tag.
StateVector basis_change_xy(const StateVector& state, int site);

// The three-qubit state with amplitude +1/2 on |-++>, |+-+>, |++-> and
// -1/2 on |--->, written in the x basis.
StateVector ghz();

// <state| obs_1 obs_2 ... |state> for single-site dichotomic observables,
// at most one per site. Real, in [-1, 1].
double parity_expectation(const StateVector& state,
                          const std::vector<DichotomicObservable>& obs);

// (lhs, rhs) of the uncertainty product bound:
// lhs = dA * dB, rhs = |<psi|[A,B]|psi>| / 2.
std::pair<double, double> robertson_bound(const StateVector& state,
                                          const HermitianOperator& a,
                                          const HermitianOperator& b);

// Exhaustive search over the 64 assignments of +-1 to
// (xA, xB, xC, yA, yB, yC). Constraint 0 is xA xB xC = -1; constraints
// 1..3 are the three xyy-permutation relations equal to +1.
int hv_search();
int hv_search_without(int dropped_constraint);
// Product of the four constraint left-hand sides for a given assignment;
// algebraically +1 for every assignment while the constraints demand -1.
int hv_constraint_product(const std::array<int, 6>& assignment);

struct MeasurementOutcome {
  int value = 0;  // +1 or -1
  StateVector state;
};

// Born-sampled projective measurement of a dichotomic observable; returns
// the outcome and the renormalized projected state.
MeasurementOutcome projective_measure(const StateVector& state,
                                      const DichotomicObservable& obs,
                                      Rng& rng);

// Probability of outcome +1 without sampling.
double outcome_probability(const StateVector& state,
                           const DichotomicObservable& obs);

}  // namespace qfs
