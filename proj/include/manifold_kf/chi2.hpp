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
#include <limits>
#include <stdexcept>
#include <string>

#include "manifold_kf/errors.hpp"

namespace manifold_kf {

namespace detail {

// Lower regularized incomplete gamma P(a, x) by power series, for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("regularized_gamma_p: series failed to converge");
}

// Upper regularized incomplete gamma Q(a, x) by Lentz continued fraction,
// for x >= a + 1.
inline double gamma_q_cont_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return f * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("regularized_gamma_p: continued fraction failed to converge");
}

}  // namespace detail

/// Lower regularized incomplete gamma P(a, x), the CDF backbone of the
/// chi-squared family.
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("regularized_gamma_p: requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_cont_fraction(a, x);
}

/// Chi-squared CDF with `dof` degrees of freedom.
inline double chi2_cdf(int dof, double x) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

/// Inverse chi-squared CDF by bisection on the regularized incomplete gamma;
/// the returned gamma satisfies CDF(gamma) = a to well within 1e-9.
inline double chi2_quantile(int dof, double a) {
  if (dof < 1 || dof > 10) {
    throw std::invalid_argument("chi2_quantile: dof must be in [1, 10], got " +
                                std::to_string(dof));
  }
  if (!(a > 0.0) || !(a < 1.0)) {
    throw std::invalid_argument("chi2_quantile: significance must be in (0, 1)");
  }
  double hi = 1.0;
  while (chi2_cdf(dof, hi) < a) {
    hi *= 2.0;
    if (hi > 1e8) throw NumericError("chi2_quantile: failed to bracket the quantile");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (chi2_cdf(dof, mid) < a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace manifold_kf
