#include "qfs/mwi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qfs/errors.hpp"

namespace qfs {

Rational Measure::rational() const {
  if (!exact_) throw std::logic_error("measure is not exact");
  return *exact_;
}

Measure Measure::operator+(const Measure& o) const {
  if (exact_ && o.exact_) return Measure(*exact_ + *o.exact_);
  return Measure(value() + o.value());
}

Measure Measure::divided_by(long long k) const {
  if (k <= 0) throw std::invalid_argument("division by non-positive count");
  if (exact_) return Measure(*exact_ / k);
  return Measure(value_ / static_cast<double>(k));
}

bool Measure::operator==(const Measure& o) const {
  if (exact_ && o.exact_) return *exact_ == *o.exact_;
  return value() == o.value();
}

std::string Measure::str() const {
  std::ostringstream ss;
  if (exact_) {
    ss << exact_->numerator();
    if (exact_->denominator() != 1) ss << '/' << exact_->denominator();
  } else {
    ss.precision(17);
    ss << value_;
  }
  return ss.str();
}

WorldBranch WorldBranch::from_amplitude(std::string label, Complex amplitude) {
  WorldBranch b;
  b.label = std::move(label);
  b.ancestor = b.label;
  b.amplitude = amplitude;
  b.measure = Measure::approx(std::norm(amplitude));
  return b;
}

WorldBranch WorldBranch::from_measure(std::string label, Rational measure) {
  if (measure < Rational(0))
    throw std::invalid_argument("measure must be non-negative");
  WorldBranch b;
  b.label = std::move(label);
  b.ancestor = b.label;
  b.amplitude = std::sqrt(boost::rational_cast<double>(measure));
  b.measure = Measure::exact(measure);
  return b;
}

BranchDecomposition::BranchDecomposition(std::vector<WorldBranch> branches)
    : branches_(std::move(branches)) {
  double total = 0.0;
  for (const auto& b : branches_) {
    if (b.measure.value() < -kAlgebraTol || b.measure.value() > 1.0 + kAlgebraTol)
      throw std::invalid_argument("branch measure outside [0, 1]");
    total += b.measure.value();
  }
  if (std::abs(total - 1.0) > kAlgebraTol)
    throw NumericalError("branch measures sum to " + std::to_string(total));
}

const WorldBranch* BranchDecomposition::find(const std::string& label) const {
  for (const auto& b : branches_)
    if (b.label == label) return &b;
  return nullptr;
}

Measure BranchDecomposition::measure_of(const std::string& label) const {
  const WorldBranch* b = find(label);
  if (!b) throw std::invalid_argument("no branch labeled " + label);
  return b->measure;
}

double BranchDecomposition::total_measure() const {
  double t = 0.0;
  for (const auto& b : branches_) t += b.measure.value();
  return t;
}

BranchDecomposition decompose(const StateVector& state, const RecordBasis& basis) {
  const Eigen::Index dim = state.size();
  if (basis.vectors.rows() != dim)
    throw std::invalid_argument("record basis dimension mismatch");
  if (basis.vectors.cols() != static_cast<Eigen::Index>(basis.labels.size()))
    throw std::invalid_argument("label count mismatch");
  const Eigen::MatrixXcd gram = basis.vectors.adjoint() * basis.vectors;
  if ((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()))
          .cwiseAbs()
          .maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("record basis is not orthonormal");

  std::vector<WorldBranch> branches;
  Eigen::VectorXcd reconstructed = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index c = 0; c < basis.vectors.cols(); ++c) {
    const Complex a = basis.vectors.col(c).dot(state.amplitudes());
    if (std::norm(a) > kAlgebraTol * kAlgebraTol)
      branches.push_back(WorldBranch::from_amplitude(basis.labels[c], a));
    reconstructed += a * basis.vectors.col(c);
  }
  if ((reconstructed - state.amplitudes()).norm() > 1e-9)
    throw std::invalid_argument("record basis does not span the state");
  return BranchDecomposition(std::move(branches));
}

StateVector recombine(const BranchDecomposition& decomp, const RecordBasis& basis) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(basis.vectors.rows());
  for (const auto& b : decomp.branches()) {
    const auto it = std::find(basis.labels.begin(), basis.labels.end(), b.label);
    if (it == basis.labels.end())
      throw std::invalid_argument("branch label missing from basis: " + b.label);
    amps += b.amplitude *
            basis.vectors.col(std::distance(basis.labels.begin(), it));
  }
  std::vector<int> dims{static_cast<int>(amps.size())};
  return StateVector(dims, std::move(amps));
}

double measure_region(const WaveFunction& psi,
                      const std::vector<std::pair<double, double>>& region) {
  if (region.empty()) throw std::invalid_argument("empty region");
  return probability_in(psi, region);
}

BranchDecomposition branch_transform(const BranchDecomposition& decomp,
                                     const BranchOp& op,
                                     const std::string& protected_label) {
  auto touches = [&](const std::string& label) {
    return label == protected_label;
  };
  if (touches(op.target) || (op.kind == BranchOp::Kind::Interfere && touches(op.second)))
    throw std::invalid_argument("operation touches the protected branch " +
                                protected_label);
  if (!decomp.find(op.target))
    throw std::invalid_argument("no branch labeled " + op.target);

  std::vector<WorldBranch> out;
  switch (op.kind) {
    case BranchOp::Kind::Phase:
      for (auto b : decomp.branches()) {
        if (b.label == op.target)
          b.amplitude *= std::exp(Complex(0.0, op.theta));
        out.push_back(std::move(b));
      }
      break;
    case BranchOp::Kind::Reshape:
      // A local distortion |C> -> |C'>: measure and amplitude magnitude
      // unchanged, the branch keeps its identity under a primed label.
      for (auto b : decomp.branches()) {
        if (b.label == op.target) b.label += "'";
        out.push_back(std::move(b));
      }
      break;
    case BranchOp::Kind::Split: {
      if (op.parts < 2) throw std::invalid_argument("split needs parts >= 2");
      for (auto b : decomp.branches()) {
        if (b.label != op.target) {
          out.push_back(std::move(b));
          continue;
        }
        const double amp_scale = 1.0 / std::sqrt(static_cast<double>(op.parts));
        for (int k = 1; k <= op.parts; ++k) {
          WorldBranch sub;
          sub.label = b.label + "_" + std::to_string(k);
          sub.ancestor = b.ancestor;
          sub.amplitude = b.amplitude * amp_scale;
          sub.measure = b.measure.divided_by(op.parts);
          out.push_back(std::move(sub));
        }
      }
      break;
    }
    case BranchOp::Kind::Interfere: {
      const WorldBranch* x = decomp.find(op.target);
      const WorldBranch* y = decomp.find(op.second);
      if (!x || !y) throw std::invalid_argument("interfere needs two branches");
      WorldBranch merged;
      merged.label = op.merged_label.empty() ? op.target + op.second : op.merged_label;
      merged.ancestor = merged.label;
      merged.measure = x->measure + y->measure;
      merged.amplitude = std::sqrt(merged.measure.value());
      for (auto b : decomp.branches())
        if (b.label != op.target && b.label != op.second) out.push_back(std::move(b));
      out.push_back(std::move(merged));
      break;
    }
  }
  return BranchDecomposition(std::move(out));
}

namespace {

Rational rational_gcd(const std::vector<Rational>& values) {
  long long num_gcd = 0;
  long long den_lcm = 1;
  for (const auto& v : values) {
    num_gcd = std::gcd(num_gcd, v.numerator());
    den_lcm = std::lcm(den_lcm, v.denominator());
  }
  if (num_gcd == 0) throw std::invalid_argument("all measures are zero");
  return Rational(num_gcd, den_lcm);
}

}  // namespace

BranchDecomposition equal_measure_refinement(const BranchDecomposition& decomp,
                                             const RefinementPrecision& precision) {
  // Already-equal branches: identity.
  bool all_equal = true;
  for (std::size_t i = 1; i < decomp.size(); ++i)
    if (std::abs(decomp[i].measure.value() - decomp[0].measure.value()) >
        kAlgebraTol)
      all_equal = false;
  if (all_equal) return decomp;

  std::vector<WorldBranch> out;
  if (precision.exact) {
    std::vector<Rational> measures;
    for (const auto& b : decomp.branches()) measures.push_back(b.measure.rational());
    const Rational unit = rational_gcd(measures);
    for (std::size_t i = 0; i < decomp.size(); ++i) {
      const Rational k = measures[i] / unit;
      if (k.denominator() != 1)
        throw NumericalError("refinement unit does not divide a measure");
      const long long parts = k.numerator();
      for (long long p = 1; p <= parts; ++p) {
        WorldBranch sub;
        sub.label = decomp[i].label + "_" + std::to_string(p);
        sub.ancestor = decomp[i].ancestor;
        sub.measure = decomp[i].measure.divided_by(parts);
        sub.amplitude = decomp[i].amplitude / std::sqrt(static_cast<double>(parts));
        out.push_back(std::move(sub));
      }
    }
  } else {
    if (!(precision.epsilon > 0.0))
      throw std::invalid_argument("epsilon must be > 0");
    for (std::size_t i = 0; i < decomp.size(); ++i) {
      const double mu = decomp[i].measure.value();
      const long long parts =
          std::max<long long>(1, std::llround(mu / precision.epsilon));
      for (long long p = 1; p <= parts; ++p) {
        WorldBranch sub;
        sub.label = decomp[i].label + "_" + std::to_string(p);
        sub.ancestor = decomp[i].ancestor;
        sub.measure = decomp[i].measure.divided_by(parts);
        sub.amplitude = decomp[i].amplitude / std::sqrt(static_cast<double>(parts));
        out.push_back(std::move(sub));
      }
    }
  }
  return BranchDecomposition(std::move(out));
}

SleepingBeautyResult sleeping_beauty(Rational p_heads) {
  if (p_heads < Rational(0) || p_heads > Rational(1))
    throw std::invalid_argument("p_heads must be in [0, 1]");
  const Rational p = p_heads;
  const Rational q = Rational(1) - p;

  // Monday: sqrt(p)|H, awake> + sqrt(q)|T, awake>
  // Tuesday: sqrt(p)|H, sleep> + sqrt(q)|T, awake>
  SleepingBeautyResult result;
  if (p > Rational(0))
    result.awake_branches.push_back(WorldBranch::from_measure("H_Mon", p));
  if (q > Rational(0)) {
    result.awake_branches.push_back(WorldBranch::from_measure("T_Mon", q));
    result.awake_branches.push_back(WorldBranch::from_measure("T_Tue", q));
  }
  const Rational awake_total = p + q + q;
  result.credence_heads = Measure::exact(p / awake_total);
  return result;
}

}  // namespace qfs
