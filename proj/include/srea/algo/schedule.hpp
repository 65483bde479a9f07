#pragma once

namespace srea::algo {

/// Warm-up, re-labeling and fine-tuning phases, in epochs:
///   [0, lambda_init]            alpha = 0, w = 0
///   [lambda_init, lambda_start] alpha ramps 0 -> 1
///   [lambda_start, lambda_end]  w ramps 0 -> 1
struct ScheduleParams {
  int lambda_init = 0;
  int delta_start = 25;
  int delta_end = 30;

  int lambda_start() const { return lambda_init + delta_start; }
  int lambda_end() const { return lambda_start() + delta_end; }

  /// Throws std::invalid_argument on negative fields or when lambda_end
  /// exceeds `epochs`.
  void validate(int epochs) const;
};

/// Supervised-loss weight. With delta_start == 0 it is 1 from lambda_init on.
double alpha_at(int t, const ScheduleParams& s);
/// Weight of the pseudo-labels against the given label. With delta_end == 0
/// it is 1 from lambda_start on.
double w_at(int t, const ScheduleParams& s);

}  // namespace srea::algo
