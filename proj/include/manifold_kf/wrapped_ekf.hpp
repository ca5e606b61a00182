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

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "manifold_kf/angles.hpp"
#include "manifold_kf/covariance.hpp"
#include "manifold_kf/errors.hpp"

namespace manifold_kf {

/// Classical EKF over a real vector state whose designated angular slots are
/// wrapped after propagation and in the innovation. The covariance
/// arithmetic is a plain EKF: the (I - K H) P form is kept deliberately so
/// trajectories are directly comparable with the group filter.

/// Vector state with an explicit mask marking which slots are angles.
struct WrappedState {
  Eigen::VectorXd x;
  Eigen::MatrixXd cov;
  std::vector<bool> angular_mask;

  WrappedState(Eigen::VectorXd x_in, Eigen::MatrixXd cov_in, std::vector<bool> mask)
      : x(std::move(x_in)), cov(std::move(cov_in)), angular_mask(std::move(mask)) {
    const auto n = x.size();
    if (static_cast<Eigen::Index>(angular_mask.size()) != n) {
      throw std::invalid_argument("WrappedState: angular mask length must match state size");
    }
    if (cov.rows() != n || cov.cols() != n) {
      throw std::invalid_argument("WrappedState: covariance must be " + std::to_string(n) + "x" +
                                  std::to_string(n));
    }
    if (!x.allFinite()) {
      throw std::invalid_argument("WrappedState: state must be finite");
    }
    wrap_slots();
  }

  void wrap_slots() {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (angular_mask[static_cast<std::size_t>(i)]) x[i] = wrap_to_pi(x[i]);
    }
  }
};

using EkfStateFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using EkfStateJacFn =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using EkfMeasFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using EkfMeasJacFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Diagnostics from an update step.
struct EkfUpdateReport {
  Eigen::MatrixXd kalman_gain;
  Eigen::VectorXd innovation;      // z - h(x), angular slots wrapped
  Eigen::MatrixXd innovation_cov;  // S = H P H^T + R
  bool gated = false;
};

/// Wraps every angular slot; a no-op on already-canonical states.
inline WrappedState normalize(WrappedState state) {
  state.wrap_slots();
  return state;
}

/// x <- f(x, u) with angular slots wrapped; P <- F P F^T + Q.
inline WrappedState ekf_predict(const WrappedState& state, const EkfStateFn& f,
                                const EkfStateJacFn& f_jac, const Eigen::MatrixXd& q,
                                const Eigen::VectorXd& u = Eigen::VectorXd()) {
  Eigen::VectorXd x_next = f(state.x, u);
  if (!x_next.allFinite()) {
    throw NumericError("ekf_predict: state equation returned a non-finite value");
  }
  if (x_next.size() != state.x.size()) {
    throw std::invalid_argument("ekf_predict: state equation changed the state dimension");
  }
  const Eigen::MatrixXd f_mat = f_jac(state.x, u);
  Eigen::MatrixXd cov_next = f_mat * state.cov * f_mat.transpose() + q;
  return WrappedState(std::move(x_next), floor_psd(cov_next), state.angular_mask);
}

/// Innovation nu = z - h(x) with the masked slots wrapped; x <- wrap(x + K nu);
/// P <- (I - K H) P. When a gating threshold is supplied and the innovation
/// fails the test, the prior is returned unchanged with report.gated = true.
inline std::pair<WrappedState, EkfUpdateReport> ekf_update(
    const WrappedState& state, const Eigen::VectorXd& z, const EkfMeasFn& h,
    const EkfMeasJacFn& h_jac, const Eigen::MatrixXd& r,
    const std::vector<bool>& meas_angular_mask,
    std::optional<double> gate_gamma = std::nullopt) {
  const Eigen::VectorXd hx = h(state.x);
  if (hx.size() != z.size() ||
      static_cast<Eigen::Index>(meas_angular_mask.size()) != z.size()) {
    throw std::invalid_argument(
        "ekf_update: measurement, h(x), and angular mask sizes must agree");
  }
  Eigen::VectorXd innovation = z - hx;
  for (Eigen::Index i = 0; i < innovation.size(); ++i) {
    if (meas_angular_mask[static_cast<std::size_t>(i)]) {
      innovation[i] = wrap_to_pi(innovation[i]);
    }
  }
  const Eigen::MatrixXd h_mat = h_jac(state.x);
  GainResult gain = compute_gain(state.cov, h_mat, r);

  EkfUpdateReport report{gain.kalman_gain, innovation, gain.innovation_cov, false};
  if (gate_gamma.has_value() &&
      !(mahalanobis_sq(innovation, gain.innovation_cov) < *gate_gamma)) {
    report.gated = true;
    return {state, report};
  }

  Eigen::VectorXd x_next = state.x + gain.kalman_gain * innovation;
  const Eigen::MatrixXd ikh =
      Eigen::MatrixXd::Identity(state.x.size(), state.x.size()) - gain.kalman_gain * h_mat;
  Eigen::MatrixXd cov_next = ikh * state.cov;
  return {WrappedState(std::move(x_next), floor_psd(cov_next), state.angular_mask), report};
}

}  // namespace manifold_kf
