#include "srea/algo/schedule.hpp"

#include <stdexcept>
#include <string>

namespace srea::algo {

void ScheduleParams::validate(int epochs) const {
  if (lambda_init < 0 || delta_start < 0 || delta_end < 0) {
    throw std::invalid_argument("schedule parameters must be nonnegative");
  }
  if (lambda_end() > epochs) {
    throw std::invalid_argument("schedule ends at epoch " + std::to_string(lambda_end()) +
                                ", after the last epoch " + std::to_string(epochs));
  }
}

namespace {

double ramp(int t, int start, int length) {
  if (t < 0) throw std::invalid_argument("schedule queried at a negative epoch");
  if (t >= start + length) return 1.0;
  if (t <= start) return 0.0;
  return static_cast<double>(t - start) / static_cast<double>(length);
}

}  // namespace

double alpha_at(int t, const ScheduleParams& s) { return ramp(t, s.lambda_init, s.delta_start); }

double w_at(int t, const ScheduleParams& s) { return ramp(t, s.lambda_start(), s.delta_end); }

}  // namespace srea::algo
