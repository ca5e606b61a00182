// Copyright 2026 manifold_kf contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "manifold_kf/angles.hpp"
#include "manifold_kf/errors.hpp"

namespace manifold_kf {

/// Synthetic azimuth scenarios: a ground-truth angular trajectory plus noisy
/// bearing measurements with uniform-on-the-circle outliers standing in for
/// spurious beamformer peaks. All randomness flows from the single seed.

struct TruthSample {
  double t = 0.0;
  double theta = 0.0;  // wrapped to [-pi, pi)
  double omega = 0.0;
  double alpha = 0.0;
};

struct Measurement {
  double t = 0.0;
  std::optional<double> z;  // radians; empty on dropout
};

enum class ProfileKind { constant, ramp, sinusoid, waypoints };

struct ScenarioConfig {
  double duration = 60.0;  // seconds
  double period = 0.1;     // seconds per sample
  ProfileKind profile = ProfileKind::sinusoid;
  double theta0 = 0.0;     // rad; start angle (constant/ramp/sinusoid offset)
  double ramp_rate = 0.5;  // rad/s, ramp profile
  double amplitude = 2.0;  // rad, sinusoid profile
  double frequency = 0.05; // Hz, sinusoid profile
  std::vector<std::pair<double, double>> waypoints;  // (t, theta), linear interp
  double sigma_r = 0.1;      // rad, measurement noise std
  double outlier_prob = 0.0; // probability of a uniform outlier
  std::uint64_t seed = 0;
};

namespace detail {

inline void validate_scenario(const ScenarioConfig& cfg) {
  if (!(cfg.period > 0.0)) throw std::invalid_argument("scenario.period must be > 0");
  if (!(cfg.duration >= 0.0)) throw std::invalid_argument("scenario.duration must be >= 0");
  if (!(cfg.sigma_r >= 0.0)) throw std::invalid_argument("scenario.sigma_r must be >= 0");
  if (!(cfg.outlier_prob >= 0.0 && cfg.outlier_prob <= 1.0)) {
    throw std::invalid_argument("scenario.outlier_prob must be in [0, 1]");
  }
  if (cfg.profile == ProfileKind::waypoints) {
    if (cfg.waypoints.empty()) {
      throw std::invalid_argument("scenario.waypoints must be non-empty");
    }
    for (std::size_t i = 1; i < cfg.waypoints.size(); ++i) {
      if (!(cfg.waypoints[i].first > cfg.waypoints[i - 1].first)) {
        throw std::invalid_argument("scenario.waypoints times must be strictly increasing");
      }
    }
  }
}

// Unwrapped angular profile; wrapping happens once, on output.
inline double profile_value(const ScenarioConfig& cfg, double t) {
  switch (cfg.profile) {
    case ProfileKind::constant:
      return cfg.theta0;
    case ProfileKind::ramp:
      return cfg.theta0 + cfg.ramp_rate * t;
    case ProfileKind::sinusoid:
      return cfg.theta0 + cfg.amplitude * std::sin(kTwoPi * cfg.frequency * t);
    case ProfileKind::waypoints: {
      const auto& w = cfg.waypoints;
      if (t <= w.front().first) return w.front().second;
      if (t >= w.back().first) return w.back().second;
      auto hi = std::upper_bound(w.begin(), w.end(), t,
                                 [](double v, const auto& p) { return v < p.first; });
      auto lo = hi - 1;
      const double f = (t - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  throw std::invalid_argument("scenario.profile is not a known profile");
}

// Central finite differences with one-sided ends; exact for ramps.
inline std::vector<double> finite_difference(const std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / dt;
  d[n - 1] = (y[n - 1] - y[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dt);
  }
  return d;
}

}  // namespace detail

/// Samples the configured profile at t = k * period over [0, duration].
/// Angular positions are wrapped; rates come from finite differences of the
/// unwrapped profile, so they stay smooth across the seam.
inline std::vector<TruthSample> gen_truth(const ScenarioConfig& cfg) {
  detail::validate_scenario(cfg);
  const auto n = static_cast<std::size_t>(std::floor(cfg.duration / cfg.period + 1e-9)) + 1;
  std::vector<double> unwrapped(n);
  for (std::size_t k = 0; k < n; ++k) {
    unwrapped[k] = detail::profile_value(cfg, static_cast<double>(k) * cfg.period);
  }
  const std::vector<double> omega = detail::finite_difference(unwrapped, cfg.period);
  const std::vector<double> alpha = detail::finite_difference(omega, cfg.period);
  std::vector<TruthSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = TruthSample{static_cast<double>(k) * cfg.period, wrap_to_pi(unwrapped[k]),
                         omega[k], alpha[k]};
  }
  return out;
}

/// Draws one measurement per truth sample: wrap(theta + N(0, sigma_r^2))
/// with probability 1 - outlier_prob, otherwise uniform on [-pi, pi).
/// Reproducible from the scenario seed.
inline std::vector<Measurement> gen_measurements(const std::vector<TruthSample>& truth,
                                                 const ScenarioConfig& cfg) {
  detail::validate_scenario(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> circle(-kPi, kPi);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Measurement> out;
  out.reserve(truth.size());
  for (const TruthSample& s : truth) {
    double z;
    if (coin(rng) < cfg.outlier_prob) {
      z = wrap_to_pi(circle(rng));
    } else {
      z = wrap_to_pi(s.theta + cfg.sigma_r * noise(rng));
    }
    out.push_back(Measurement{s.t, z});
  }
  return out;
}

}  // namespace manifold_kf
