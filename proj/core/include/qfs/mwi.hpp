#pragma once

#include <boost/rational.hpp>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qfs/qstate.hpp"
#include "qfs/wavepacket.hpp"

namespace qfs {

using Rational = boost::rational<long long>;

// Branch measure: exact rational where the amplitudes are of the form
// sqrt(p/q), floating otherwise. Arithmetic degrades to floating on mixing.
class Measure {
 public:
  static Measure exact(Rational r) { return Measure(r); }
  static Measure approx(double v) { return Measure(v); }

  bool is_exact() const { return exact_.has_value(); }
  double value() const {
    return exact_ ? boost::rational_cast<double>(*exact_) : value_;
  }
  Rational rational() const;

  Measure operator+(const Measure& o) const;
  Measure divided_by(long long k) const;
  bool operator==(const Measure& o) const;
  std::string str() const;  // "1/3" in exact mode, decimal otherwise

 private:
  explicit Measure(Rational r) : exact_(r), value_(boost::rational_cast<double>(r)) {}
  explicit Measure(double v) : value_(v) {}
  std::optional<Rational> exact_;
  double value_ = 0.0;
};

struct WorldBranch {
  std::string label;
  std::string ancestor;  // original label surviving refinement splits
  Complex amplitude{0.0, 0.0};
  Measure measure = Measure::approx(0.0);

  static WorldBranch from_amplitude(std::string label, Complex amplitude);
  // Exact branch with measure p/q and real positive amplitude sqrt(p/q).
  static WorldBranch from_measure(std::string label, Rational measure);
};

class BranchDecomposition {
 public:
  explicit BranchDecomposition(std::vector<WorldBranch> branches);

  const std::vector<WorldBranch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  const WorldBranch& operator[](std::size_t i) const { return branches_.at(i); }
  const WorldBranch* find(const std::string& label) const;
  Measure measure_of(const std::string& label) const;
  double total_measure() const;

 private:
  std::vector<WorldBranch> branches_;
};

// Labeled orthonormal record vectors (columns).
struct RecordBasis {
  std::vector<std::string> labels;
  Eigen::MatrixXcd vectors;
};

// One branch per nonzero-amplitude record label; throws if the basis is not
// orthonormal or does not span the state.
BranchDecomposition decompose(const StateVector& state, const RecordBasis& basis);
StateVector recombine(const BranchDecomposition& decomp, const RecordBasis& basis);

// Integral of |psi|^2 over a union of grid intervals.
double measure_region(const WaveFunction& psi,
                      const std::vector<std::pair<double, double>>& region);

// Local operations on branches away from a protected branch.
struct BranchOp {
  enum class Kind { Phase, Reshape, Split, Interfere } kind = Kind::Phase;
  std::string target;        // branch the operation acts on
  std::string second;        // Interfere only: the other branch
  double theta = 0.0;        // Phase only
  int parts = 2;             // Split only
  std::string merged_label;  // Interfere only
};

// Applies the operation; throws if it touches `protected_label`. Total
// measure and the protected branch's measure are conserved.
BranchDecomposition branch_transform(const BranchDecomposition& decomp,
                                     const BranchOp& op,
                                     const std::string& protected_label);

struct RefinementPrecision {
  bool exact = true;      // exact-rational mode (measures must be exact)
  double epsilon = 0.01;  // floating mode: target common measure
};

// Splits branches via formal auxiliary measurements until all measures are
// (nearly) equal; output branches keep their ancestor labels so counting
// ancestors recovers the original measures.
BranchDecomposition equal_measure_refinement(const BranchDecomposition& decomp,
                                             const RefinementPrecision& precision);

struct SleepingBeautyResult {
  Measure credence_heads = Measure::approx(0.0);
  std::vector<WorldBranch> awake_branches;  // H_Mon, T_Mon, T_Tue
};

// Quantum-coin version: amplitude sqrt(p) on Heads. Awake branches are
// Heads-Monday, Tails-Monday, Tails-Tuesday; the credence is the Heads
// fraction of the awake measure, p / (2 - p).
SleepingBeautyResult sleeping_beauty(Rational p_heads = Rational(1, 2));

}  // namespace qfs
