#include "qfs/qstate.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "qfs/errors.hpp"

namespace qfs {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Eigen::Index product_of(const std::vector<int>& dims) {
  Eigen::Index p = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("site dimension must be >= 1");
    p *= d;
  }
  return p;
}

}  // namespace

StateVector::StateVector(std::vector<int> dims, Eigen::VectorXcd amplitudes)
    : dims_(std::move(dims)),
      bases_(dims_.size(), SiteBasis::X),
      amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != product_of(dims_))
    throw std::invalid_argument("amplitude count must equal product of dims");
  check_normalized();
}

StateVector StateVector::qubits(int n_sites, int basis_index) {
  if (n_sites < 1) throw std::invalid_argument("need at least one site");
  std::vector<int> dims(n_sites, 2);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_sites);
  amps(basis_index) = 1.0;
  return StateVector(std::move(dims), std::move(amps));
}

Eigen::Index StateVector::flat_index(const std::vector<int>& per_site) const {
  if (per_site.size() != dims_.size())
    throw std::invalid_argument("per-site index count mismatch");
  Eigen::Index idx = 0;
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    if (per_site[s] < 0 || per_site[s] >= dims_[s])
      throw std::out_of_range("basis index out of range");
    idx = idx * dims_[s] + per_site[s];
  }
  return idx;
}

std::string StateVector::site_label(int site, int index) const {
  const char* sign = (index == 0) ? "+" : "-";
  const char* axis = (bases_.at(site) == SiteBasis::X) ? "x" : "y";
  return std::string(sign) + axis;
}

void StateVector::check_normalized(double tol) const {
  const double n = norm();
  if (std::abs(n - 1.0) > tol)
    throw NumericalError("state norm " + std::to_string(n) + " deviates from 1");
}

void StateVector::apply_site_matrix(int site, const Eigen::Matrix2cd& m) {
  if (site < 0 || site >= site_count()) throw std::out_of_range("site out of range");
  if (dims_[site] != 2) throw std::invalid_argument("site is not a qubit");
  Eigen::Index inner = 1;
  for (int s = site + 1; s < site_count(); ++s) inner *= dims_[s];
  const Eigen::Index outer = amplitudes_.size() / (2 * inner);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index i = 0; i < inner; ++i) {
      const Eigen::Index i0 = (o * 2 + 0) * inner + i;
      const Eigen::Index i1 = (o * 2 + 1) * inner + i;
      const Complex a0 = amplitudes_(i0), a1 = amplitudes_(i1);
      amplitudes_(i0) = m(0, 0) * a0 + m(0, 1) * a1;
      amplitudes_(i1) = m(1, 0) * a0 + m(1, 1) * a1;
    }
  }
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd m) : matrix(std::move(m)) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("operator must be square");
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("operator is not Hermitian");
}

Eigen::Matrix2cd dichotomic_matrix(Dichotomic kind, SiteBasis basis) {
  const bool diagonal = (kind == Dichotomic::XTilde) == (basis == SiteBasis::X);
  Eigen::Matrix2cd m;
  if (diagonal)
    m << 1, 0, 0, -1;
  else
    m << 0, 1, 1, 0;
  return m;
}

StateVector basis_change_xy(const StateVector& state, int site) {
  if (site < 0 || site >= state.site_count())
    throw std::out_of_range("site out of range");
  if (state.dim(site) != 2)
    throw std::invalid_argument("basis change requires a qubit site");
  Eigen::Matrix2cd h;
  h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  StateVector out = state;
  out.apply_site_matrix(site, h);
  out.set_basis(site, state.basis(site) == SiteBasis::X ? SiteBasis::Y
                                                        : SiteBasis::X);
  return out;
}

StateVector ghz() {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
  // index bits: 0 = +, 1 = -, site-major (A,B,C)
  amps(0b100) = 0.5;   // |-++>
  amps(0b010) = 0.5;   // |+-+>
  amps(0b001) = 0.5;   // |++->
  amps(0b111) = -0.5;  // |--->
  return StateVector({2, 2, 2}, std::move(amps));
}

double parity_expectation(const StateVector& state,
                          const std::vector<DichotomicObservable>& obs) {
  std::vector<bool> seen(state.site_count(), false);
  StateVector acted = state;
  for (const auto& o : obs) {
    if (o.site < 0 || o.site >= state.site_count())
      throw std::out_of_range("observable site out of range");
    if (seen[o.site]) throw std::invalid_argument("duplicate observable site");
    seen[o.site] = true;
    acted.apply_site_matrix(o.site, dichotomic_matrix(o.kind, state.basis(o.site)));
  }
  const Complex e = state.amplitudes().dot(acted.amplitudes());
  if (std::abs(e.imag()) > kAlgebraTol)
    throw NumericalError("parity expectation has an imaginary part");
  return e.real();
}

std::pair<double, double> robertson_bound(const StateVector& state,
                                          const HermitianOperator& a,
                                          const HermitianOperator& b) {
  if (a.matrix.rows() != state.size() || b.matrix.rows() != state.size())
    throw std::invalid_argument("operator dimension does not match state");
  const Eigen::VectorXcd& psi = state.amplitudes();
  auto expect = [&psi](const Eigen::MatrixXcd& m) {
    return psi.dot(m * psi).real();
  };
  const double ea = expect(a.matrix);
  const double eb = expect(b.matrix);
  const double va = std::max(0.0, expect(a.matrix * a.matrix) - ea * ea);
  const double vb = std::max(0.0, expect(b.matrix * b.matrix) - eb * eb);
  const double lhs = std::sqrt(va) * std::sqrt(vb);
  const Eigen::MatrixXcd comm = a.matrix * b.matrix - b.matrix * a.matrix;
  const double rhs = 0.5 * std::abs(psi.dot(comm * psi));
  return {lhs, rhs};
}

namespace {

// Constraint left-hand sides on an assignment (xA,xB,xC,yA,yB,yC).
std::array<int, 4> constraint_values(const std::array<int, 6>& v) {
  const int xA = v[0], xB = v[1], xC = v[2], yA = v[3], yB = v[4], yC = v[5];
  return {xA * xB * xC, xA * yB * yC, yA * xB * yC, yA * yB * xC};
}

const std::array<int, 4> kConstraintTargets = {-1, 1, 1, 1};

int count_satisfying(int dropped) {
  int count = 0;
  for (int bits = 0; bits < 64; ++bits) {
    std::array<int, 6> v;
    for (int i = 0; i < 6; ++i) v[i] = (bits >> i) & 1 ? -1 : 1;
    const auto lhs = constraint_values(v);
    bool ok = true;
    for (int c = 0; c < 4; ++c) {
      if (c == dropped) continue;
      if (lhs[c] != kConstraintTargets[c]) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  }
  return count;
}

}  // namespace

int hv_search() { return count_satisfying(-1); }

int hv_search_without(int dropped_constraint) {
  if (dropped_constraint < 0 || dropped_constraint > 3)
    throw std::out_of_range("constraint index must be in 0..3");
  return count_satisfying(dropped_constraint);
}

int hv_constraint_product(const std::array<int, 6>& assignment) {
  const auto lhs = constraint_values(assignment);
  return lhs[0] * lhs[1] * lhs[2] * lhs[3];
}

double outcome_probability(const StateVector& state,
                           const DichotomicObservable& obs) {
  StateVector projected = state;
  const Eigen::Matrix2cd m =
      dichotomic_matrix(obs.kind, state.basis(obs.site));
  const Eigen::Matrix2cd proj = 0.5 * (Eigen::Matrix2cd::Identity() + m);
  projected.apply_site_matrix(obs.site, proj);
  return projected.amplitudes().squaredNorm();
}

MeasurementOutcome projective_measure(const StateVector& state,
                                      const DichotomicObservable& obs,
                                      Rng& rng) {
  state.check_normalized();
  const double p_plus = outcome_probability(state, obs);
  const int value = (rng.uniform() < p_plus) ? +1 : -1;
  const double p = (value == +1) ? p_plus : 1.0 - p_plus;
  if (p <= 0.0) throw NumericalError("zero-probability branch selected");
  const Eigen::Matrix2cd m =
      dichotomic_matrix(obs.kind, state.basis(obs.site));
  const Eigen::Matrix2cd proj =
      0.5 * (Eigen::Matrix2cd::Identity() + double(value) * m);
  StateVector post = state;
  post.apply_site_matrix(obs.site, proj);
  post.amplitudes() /= std::sqrt(p);
  return {value, std::move(post)};
}

}  // namespace qfs
