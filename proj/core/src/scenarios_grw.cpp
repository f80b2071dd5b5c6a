#include <cmath>
#include <stdexcept>

#include "qfs/errors.hpp"
#include "qfs/scenarios.hpp"

namespace qfs {

SternGerlachGrwResult stern_gerlach_grw(DisplayKind display, const PointerModel& model,
                                        const GRWParams& params, double duration,
                                        std::uint64_t seed) {
  // Display-consistent model: a pointer reads out through a macroscopic
  // displacement far beyond d, a screen through internal rearrangements far
  // below d.
  if (display == DisplayKind::Pointer && model.separation < 10.0 * params.d)
    throw std::invalid_argument("pointer display needs separation >> d");
  if (display == DisplayKind::Screen && model.separation > 0.1 * params.d)
    throw std::invalid_argument("screen display needs displacement << d");

  PointerState initial;
  initial.model = model;
  Rng rng = Rng::substream(seed, "stern_gerlach_grw");
  SternGerlachGrwResult result;
  result.report = run_collapse(initial, params, duration, rng);

  const auto& ratios = result.report.log_ratio_vs_time;
  if (ratios.size() > 1) {
    const double after_first = std::abs(ratios[1].second);
    result.collapsed_after_first_hit =
        after_first >= std::abs(log_tail_ratio(model.separation, params.d)) - 1e-9;
  }
  const std::size_t idx = std::min<std::size_t>(10, ratios.size() - 1);
  const double log_ratio = ratios[idx].second;
  const double w_after = 1.0 / (1.0 + std::exp(-2.0 * log_ratio));
  result.weight_shift_after_10_hits = std::abs(w_after - 0.5);
  return result;
}

}  // namespace qfs
