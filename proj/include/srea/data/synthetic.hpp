#pragma once

#include <cstddef>
#include <cstdint>

#include "srea/core/rng.hpp"
#include "srea/data/dataset.hpp"
#include "srea/data/series.hpp"

namespace srea::data {

/// Cylinder-bell-funnel: three classes of univariate series, balanced to
/// within one sample and returned in shuffled order.
///   cylinder  (6 + eta) on [a, b]
///   bell      ramp 0 -> 6 + eta over [a, b]
///   funnel    ramp 6 + eta -> 0 over [a, b]
/// plus N(0, 1) noise at every step, with eta ~ N(0, 1), a uniform in
/// [16, 32] and b - a uniform in [32, 96]. Onsets scale with length / 128.
Dataset generate_cbf(std::size_t n, std::size_t length, core::Rng& rng);

enum class Season { heating, summer };

struct ChpConfig {
  std::size_t days = 60;
  Season season = Season::heating;
  double p_max = 50.0;                 // kW
  std::int64_t start = 1598918400;     // 2020-09-01T00:00:00
  std::int64_t step_seconds = 60;
};

/// Combined heat and power plant behind a building's grid connection, at
/// one-minute resolution. Channels:
///   P_tot    net grid power, building load minus CHP output (kW)
///   T_amb    outdoor temperature (deg C)
///   T_water  buffer-tank water temperature (deg C)
///   P_CHP    CHP electrical output, the ground truth (kW)
///
/// The load follows a daily profile. In the heating season the plant runs
/// in blocks of 4 to 8 hours at one of four setpoints (30, 50, 70, 95 % of
/// p_max) with ramps between, separated by off periods that shorten as it
/// gets colder. In the summer season it stays off.
Series generate_chp_like(const ChpConfig& config, core::Rng& rng);

}  // namespace srea::data
