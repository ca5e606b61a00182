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

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace manifold_kf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to the canonical interval [-pi, pi) via
/// mod(x + pi, 2*pi) - pi. The result is congruent to x modulo 2*pi;
/// the boundary representative is -pi (an input of exactly +pi maps there).
inline double wrap_to_pi(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("wrap_to_pi: input must be finite");
  }
  double r = std::fmod(x + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

inline constexpr double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

}  // namespace manifold_kf
