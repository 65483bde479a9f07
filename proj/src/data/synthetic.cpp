#include "srea/data/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace srea::data {

Dataset generate_cbf(std::size_t n, std::size_t length, core::Rng& rng) {
  if (n == 0) throw std::invalid_argument("generate_cbf: n must be positive");
  if (length < 8) throw std::invalid_argument("generate_cbf: length must be at least 8");
  Dataset out;
  out.name = "CBF";
  out.channels = 1;
  out.length = length;
  out.num_classes = 3;
  out.class_names = {"cylinder", "bell", "funnel"};
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = static_cast<int>(i % 3);
  rng.shuffle(std::span<int>(out.labels));

  const double scale = static_cast<double>(length) / 128.0;
  out.samples.resize(n * length);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::round(static_cast<double>(rng.uniform_int(16, 32)) * scale);
    const double b = a + std::round(static_cast<double>(rng.uniform_int(32, 96)) * scale);
    const double height = 6.0 + rng.normal();
    float* x = out.samples.data() + i * length;
    for (std::size_t t = 0; t < length; ++t) {
      const double tt = static_cast<double>(t + 1);
      double shape = 0.0;
      if (tt >= a && tt <= b) {
        switch (out.labels[i]) {
          case 0:
            shape = 1.0;
            break;
          case 1:
            shape = (tt - a) / (b - a);
            break;
          default:
            shape = (b - tt) / (b - a);
            break;
        }
      }
      x[t] = static_cast<float>(height * shape + rng.normal());
    }
  }
  return out;
}

namespace {

constexpr double kMinutesPerDay = 1440.0;

// Building load in kW over the day: office-hours plateau plus an evening bump.
double daily_load_profile(double minute_of_day) {
  const double h = minute_of_day / 60.0;
  const double day = std::exp(-std::pow((h - 12.5) / 3.5, 2.0));
  const double evening = std::exp(-std::pow((h - 19.0) / 1.5, 2.0));
  return 45.0 + 55.0 * day + 20.0 * evening;
}

// Minutes -> time-varying plant output in [0, p_max].
std::vector<double> chp_schedule(const ChpConfig& cfg, const std::vector<double>& t_amb,
                                 core::Rng& rng) {
  const std::size_t n = t_amb.size();
  std::vector<double> p(n, 0.0);
  if (cfg.season == Season::summer) return p;

  constexpr std::array<double, 4> kSetpoints{0.3, 0.5, 0.7, 0.95};
  std::size_t t = 0;
  bool on = rng.uniform() < 0.5;
  while (t < n) {
    if (!on) {
      // Colder weather means more heat demand and shorter pauses.
      const double cold = std::clamp((14.0 - t_amb[t]) / 14.0, 0.0, 1.0);
      const double hours = rng.uniform(3.0, 9.0) * (1.2 - 0.6 * cold);
      t += static_cast<std::size_t>(hours * 60.0);
      on = true;
      continue;
    }
    const auto duration = static_cast<std::size_t>(rng.uniform(4.0, 8.0) * 60.0);
    const double level =
        (kSetpoints[rng.uniform_index(kSetpoints.size())] + rng.uniform(-0.02, 0.02)) * cfg.p_max;
    const auto ramp_up = static_cast<std::size_t>(rng.uniform_int(10, 20));
    const auto ramp_down = static_cast<std::size_t>(rng.uniform_int(10, 20));
    for (std::size_t s = 0; s < duration && t + s < n; ++s) {
      double f = 1.0;
      if (s < ramp_up) f = static_cast<double>(s + 1) / static_cast<double>(ramp_up + 1);
      if (duration - s <= ramp_down) {
        f = std::min(f, static_cast<double>(duration - s) / static_cast<double>(ramp_down + 1));
      }
      const double jitter = 1.0 + 0.01 * rng.normal();
      p[t + s] = std::clamp(level * f * jitter, 0.0, cfg.p_max);
    }
    t += duration;
    on = false;
  }
  return p;
}

}  // namespace

Series generate_chp_like(const ChpConfig& cfg, core::Rng& rng) {
  if (cfg.days == 0) throw std::invalid_argument("generate_chp_like: days must be positive");
  if (!(cfg.p_max > 0.0)) throw std::invalid_argument("generate_chp_like: p_max must be positive");
  if (cfg.step_seconds != 60) {
    throw std::invalid_argument("generate_chp_like: only one-minute resolution is supported");
  }
  const std::size_t n = cfg.days * static_cast<std::size_t>(kMinutesPerDay);
  const double days = static_cast<double>(cfg.days);

  // Outdoor temperature: seasonal drift, daily cycle peaking mid-afternoon,
  // and slowly wandering weather.
  std::vector<double> t_amb(n);
  double weather = 0.0;
  const double base_start = cfg.season == Season::summer ? 24.0 : 11.0;
  const double base_end = cfg.season == Season::summer ? 21.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double minute = static_cast<double>(i);
    const double frac = minute / (days * kMinutesPerDay);
    const double base = base_start + (base_end - base_start) * frac;
    const double phase = 2.0 * std::numbers::pi * (minute / kMinutesPerDay - 15.0 / 24.0);
    weather = 0.9995 * weather + 0.08 * rng.normal();
    t_amb[i] = base + 4.0 * std::cos(phase) + weather;
  }

  std::vector<double> p_chp = chp_schedule(cfg, t_amb, rng);

  std::vector<double> p_tot(n);
  std::vector<double> t_water(n);
  double load_drift = 0.0;
  double water = 38.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double minute_of_day = std::fmod(static_cast<double>(i), kMinutesPerDay);
    load_drift = 0.995 * load_drift + 0.4 * rng.normal();
    const double load = daily_load_profile(minute_of_day) + load_drift + 1.5 * rng.normal();
    p_tot[i] = load - p_chp[i];

    // Supply water follows the plant output with a first-order lag of about
    // a quarter hour; colder outdoor air pulls it down slightly.
    const double target = 38.0 + 40.0 * p_chp[i] / cfg.p_max - 0.2 * (t_amb[i] - 10.0);
    water += (target - water) / 15.0;
    t_water[i] = water + 0.3 * rng.normal();
  }

  Series series;
  series.timestamps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    series.timestamps[i] = cfg.start + static_cast<std::int64_t>(i) * cfg.step_seconds;
  }
  series.channel_names = {"P_tot", "T_amb", "T_water", "P_CHP"};
  series.columns = {std::move(p_tot), std::move(t_amb), std::move(t_water), std::move(p_chp)};
  return series;
}

}  // namespace srea::data
