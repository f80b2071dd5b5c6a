#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qfs/errors.hpp"
#include "qfs/scenarios.hpp"
#include "qfs/wavepacket.hpp"

namespace qfs {

namespace {

const Complex kI(0.0, 1.0);

// Two-port splitter with reflectivity R: [[sqrt(1-R), i sqrt(R)],
// [i sqrt(R), sqrt(1-R)]]. With equal arms and phase 0 the first output
// port of the second splitter is exactly dark.
std::array<Complex, 2> splitter(Complex a0, Complex a1, double reflectivity) {
  const double t = std::sqrt(1.0 - reflectivity);
  const double r = std::sqrt(reflectivity);
  return {t * a0 + kI * r * a1, kI * r * a0 + t * a1};
}

}  // namespace

IfmResult ifm(bool object_present, double reflectivity, double phase) {
  if (!(reflectivity > 0.0) || !(reflectivity < 1.0))
    throw std::invalid_argument("reflectivity must be in (0, 1)");

  // Arm 0 = transmitted arm (holds the object when present), arm 1 = reflected.
  auto [arm0, arm1] = splitter(Complex(1.0, 0.0), Complex(0.0, 0.0), reflectivity);
  arm1 *= std::exp(kI * phase);

  IfmResult result;
  if (object_present) {
    // Absorption goes to an orthogonal flagged mode; evolution stays unitary
    // on the extended space.
    result.p_absorbed = std::norm(arm0);
    arm0 = 0.0;
  }
  auto [out_dark, out_bright] = splitter(arm0, arm1, reflectivity);
  result.p_dark = std::norm(out_dark);
  result.p_bright = std::norm(out_bright);
  return result;
}

IfmResult ifm_grid_oracle(bool object_present) {
  // The same interferometer on the spatial grid: arms are packet modes at
  // x = -+1, splitters act as the two-mode unitary on packet projections,
  // the object projects the transmitted-arm packet onto the absorbed flag.
  const Grid grid{-8.0, 8.0, 1024};
  const PacketSpec arm0_spec{-1.0, 0.1, 0.0};
  const PacketSpec arm1_spec{+1.0, 0.1, 0.0};
  const WaveFunction g0 = gaussian_packet(arm0_spec, grid);
  const WaveFunction g1 = gaussian_packet(arm1_spec, grid);

  WaveFunction psi = g0;  // photon enters port 0
  double absorbed = 0.0;

  auto apply_bs = [&](const WaveFunction& in) {
    const Complex c0 = overlap(g0, in);
    const Complex c1 = overlap(g1, in);
    const auto [b0, b1] = splitter(c0, c1, 0.5);
    WaveFunction out(grid);
    for (std::size_t i = 0; i < out.size(); ++i)
      out.values()[i] = b0 * g0.values()[i] + b1 * g1.values()[i];
    return out;
  };

  psi = apply_bs(psi);
  if (object_present) {
    const Complex c0 = overlap(g0, psi);
    absorbed = std::norm(c0);
    for (std::size_t i = 0; i < psi.size(); ++i)
      psi.values()[i] -= c0 * g0.values()[i];
  }
  psi = apply_bs(psi);

  IfmResult result;
  result.p_absorbed = absorbed;
  result.p_dark = probability_in(psi, {{-2.0, 0.0}});
  result.p_bright = probability_in(psi, {{0.0, 2.0}});
  return result;
}

AlienBetResult alien_bet(double mu_world) {
  if (!(mu_world > 0.0) || !(mu_world < 1.0))
    throw std::invalid_argument("mu_world must be in (0, 1)");
  AlienBetResult result;
  result.mu_world = mu_world;
  result.mu_parallel = 1.0 - mu_world;
  const double a = std::sqrt(mu_world);
  const double b = std::sqrt(result.mu_parallel);
  // Recombining the two worlds on a 50/50 splitter with a phase the alien
  // controls: the observer's outcome probability sweeps this interval.
  result.p_min = 0.5 * (a - b) * (a - b);
  result.p_max = 0.5 * (a + b) * (a + b);
  return result;
}

namespace {

// ---- nested interferometer with weak markers -------------------------------
//
// Segments: C = bypass, E = lead-in, A/B = inner arms, F = lead-out
// continuation. All splitters 50/50 (real convention); the inner pair is
// tuned dark toward F. Each traversed segment rotates its own two-level
// marker by epsilon. Path register indices:
enum Path : int { kC = 0, kE = 1, kA = 2, kB = 3, kF = 4, kD1 = 5, kD2 = 6, kD3 = 7 };
constexpr int kPaths = 8;
constexpr int kMarkers = 5;  // C, E, A, B, F
constexpr int kMaskStates = 1 << kMarkers;

const char* kMarkerNames[kMarkers] = {"C", "E", "A", "B", "F"};

struct NetworkState {
  // amplitude[path * kMaskStates + marker_mask]
  std::vector<Complex> amp = std::vector<Complex>(kPaths * kMaskStates, 0.0);

  Complex& at(int path, int mask) { return amp[path * kMaskStates + mask]; }

  void two_port(int p, int q, double m00, double m01, double m10, double m11) {
    for (int mask = 0; mask < kMaskStates; ++mask) {
      const Complex a = at(p, mask), b = at(q, mask);
      at(p, mask) = m00 * a + m01 * b;
      at(q, mask) = m10 * a + m11 * b;
    }
  }

  // Rotate the marker attached to `segment` on amplitude in that path.
  void mark(int path, int marker, double epsilon) {
    const double c = std::cos(epsilon), s = std::sin(epsilon);
    for (int mask = 0; mask < kMaskStates; ++mask) {
      if (mask & (1 << marker)) continue;  // handle each pair once, from |0>
      const int excited = mask | (1 << marker);
      const Complex a0 = at(path, mask), a1 = at(path, excited);
      at(path, mask) = c * a0 - s * a1;
      at(path, excited) = s * a0 + c * a1;
    }
  }
};

}  // namespace

TraceReport nested_mzi_trace(double epsilon, const std::string& post_selection) {
  if (epsilon < 0.0 || epsilon >= 0.3)
    throw std::invalid_argument("epsilon must be in [0, 0.3)");
  if (post_selection != "D1" && post_selection != "D2" && post_selection != "D3" &&
      post_selection != "UNIVERSE")
    throw std::invalid_argument("post_selection must be D1, D2, D3 or UNIVERSE");

  const double h = 1.0 / std::sqrt(2.0);
  NetworkState st;
  st.at(kC, 0) = 1.0;  // source enters the outer splitter via the C register

  // Outer splitter: source -> (C bypass, E lead-in).
  st.two_port(kC, kE, h, h, h, -h);
  st.mark(kC, 0, epsilon);
  st.mark(kE, 1, epsilon);

  // Inner splitter: E -> (A, B).
  st.two_port(kE, kA, 0.0, 1.0, 1.0, 0.0);  // move E amplitude onto A register
  st.two_port(kA, kB, h, h, h, -h);
  st.mark(kA, 2, epsilon);
  st.mark(kB, 3, epsilon);

  // Inner recombiner, dark toward the continuation F: (A+B)/sqrt2 -> D3.
  st.two_port(kA, kB, h, h, h, -h);  // now A register holds (A+B)/sqrt2 -> D3
  st.two_port(kA, kD3, 0.0, 1.0, 1.0, 0.0);
  st.two_port(kB, kF, 0.0, 1.0, 1.0, 0.0);  // (A-B)/sqrt2 leaks into F
  st.mark(kF, 4, epsilon);

  // Final splitter: (C, F) -> (D1, D2).
  st.two_port(kC, kF, h, h, h, -h);
  st.two_port(kC, kD1, 0.0, 1.0, 1.0, 0.0);
  st.two_port(kF, kD2, 0.0, 1.0, 1.0, 0.0);

  TraceReport report;
  report.post_selection = post_selection;

  auto accumulate = [&](int path, double& weight_out,
                        std::map<std::string, double>& exc) {
    for (int mask = 0; mask < kMaskStates; ++mask) {
      const double w = std::norm(st.at(path, mask));
      weight_out += w;
      for (int m = 0; m < kMarkers; ++m)
        if (mask & (1 << m)) exc[kMarkerNames[m]] += w;
    }
  };

  std::map<std::string, double> exc;
  for (int m = 0; m < kMarkers; ++m) exc[kMarkerNames[m]] = 0.0;
  double weight = 0.0;
  if (post_selection == "UNIVERSE") {
    for (int p : {kD1, kD2, kD3}) accumulate(p, weight, exc);
  } else {
    const int p = post_selection == "D1" ? kD1 : post_selection == "D2" ? kD2 : kD3;
    accumulate(p, weight, exc);
  }
  report.post_selection_probability = weight;
  for (auto& [name, w] : exc)
    report.excitation[name] = (weight > 0.0) ? w / weight : 0.0;
  return report;
}

}  // namespace qfs
