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
#include <sstream>
#include <stdexcept>
#include <utility>

#include "manifold_kf/covariance.hpp"
#include "manifold_kf/errors.hpp"
#include "manifold_kf/group.hpp"

namespace manifold_kf {

/// Extended Kalman filter on matrix Lie groups. The state is a concentrated
/// Gaussian: the mean lives on the group, the covariance in the tangent
/// space at the mean. Filter steps are pure functions (state, inputs) ->
/// new state and are safe to run concurrently on independent states.

inline constexpr double kDefaultFdStep = 1e-6;

/// Filter state: mean on the group, p x p covariance in tangent units.
struct ConcentratedGaussian {
  GroupElement mean;
  Eigen::MatrixXd cov;

  ConcentratedGaussian(GroupElement mean_in, Eigen::MatrixXd cov_in)
      : mean(std::move(mean_in)), cov(std::move(cov_in)) {
    const int p = mean.group().tangent_dim();
    if (cov.rows() != p || cov.cols() != p) {
      throw std::invalid_argument("ConcentratedGaussian: covariance must be " +
                                  std::to_string(p) + "x" + std::to_string(p) + " for " +
                                  mean.group().name());
    }
  }
};

/// System model: tangent-space displacement Omega(X, u), optional analytic
/// displacement Jacobian, and process noise Q.
struct SystemModel {
  GroupId group;
  std::function<TangentVector(const GroupElement&, const Eigen::VectorXd&)> omega;
  std::function<Eigen::MatrixXd(const GroupElement&, const Eigen::VectorXd&)> jacobian_C;
  Eigen::MatrixXd process_noise;
};

/// Measurement model h: G -> G' with optional analytic Jacobian and
/// measurement noise R.
struct MeasurementModel {
  GroupId state_group;
  GroupId meas_group;
  std::function<GroupElement(const GroupElement&)> h;
  std::function<Eigen::MatrixXd(const GroupElement&)> jacobian_H;
  Eigen::MatrixXd meas_noise;
};

/// Diagnostics from an update step.
struct UpdateReport {
  Eigen::MatrixXd kalman_gain;       // K, p x q
  Eigen::VectorXd innovation_tangent;  // [log(h(mu)^{-1} z)]^vee, q
  Eigen::VectorXd scaled_innovation;   // K * innovation, p
  Eigen::MatrixXd innovation_cov;      // S = H P H^T + R, q x q
  bool gated = false;
};

/// Knobs shared by predict/update. The generic-Jacobian path evaluates the
/// full adjoint/series machinery instead of the abelian closed forms; both
/// must agree on the supported groups.
struct StepOptions {
  double fd_step = kDefaultFdStep;
  int phi_truncation_order = kDefaultPhiOrder;
  bool use_generic_jacobians = false;
};

namespace detail {

inline std::string format_eps(const Eigen::VectorXd& eps) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    if (i) os << ", ";
    os << eps[i];
  }
  os << "]";
  return os.str();
}

inline double fd_slot_step(double fd_step, double slot_value) {
  return fd_step * std::max(1.0, std::abs(slot_value));
}

}  // namespace detail

/// Displacement Jacobian: the analytic form when the model provides one,
/// otherwise a central finite difference of eps -> Omega(mu * exp(eps), u)
/// at eps = 0, column by column.
inline Eigen::MatrixXd compute_C(const SystemModel& model, const GroupElement& mu,
                                 const Eigen::VectorXd& u = Eigen::VectorXd(),
                                 double fd_step = kDefaultFdStep) {
  if (model.jacobian_C) return model.jacobian_C(mu, u);
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("compute_C: fd_step must be > 0");
  }
  const GroupId& g = model.group;
  const int p = g.tangent_dim();
  const Eigen::VectorXd slots = mu.payload();
  Eigen::MatrixXd c(p, p);
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; ++j) {
    const double h = detail::fd_slot_step(fd_step, slots[j]);
    eps[j] = h;
    const Eigen::VectorXd plus =
        model.omega(compose(mu, exp_g(TangentVector(g, eps))), u).values();
    eps[j] = -h;
    const Eigen::VectorXd minus =
        model.omega(compose(mu, exp_g(TangentVector(g, eps))), u).values();
    if (!plus.allFinite() || !minus.allFinite()) {
      eps[j] = h;
      throw NumericError("compute_C: omega returned a non-finite value near eps = " +
                         detail::format_eps(eps));
    }
    eps[j] = 0.0;
    c.col(j) = (plus - minus) / (2.0 * h);
  }
  return c;
}

/// Measurement Jacobian: analytic when available, otherwise a central finite
/// difference of eps -> [log(h(mu)^{-1} h(mu * exp(eps)))]^vee at eps = 0.
inline Eigen::MatrixXd compute_H(const MeasurementModel& meas, const GroupElement& mu_pred,
                                 double fd_step = kDefaultFdStep) {
  if (meas.jacobian_H) return meas.jacobian_H(mu_pred);
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("compute_H: fd_step must be > 0");
  }
  const GroupId& g = meas.state_group;
  const int p = g.tangent_dim();
  const int q = meas.meas_group.tangent_dim();
  const GroupElement h0 = meas.h(mu_pred);
  if (h0.group() != meas.meas_group) {
    throw ContractError("compute_H: h output is on " + h0.group().name() + ", expected " +
                        meas.meas_group.name());
  }
  const GroupElement h0_inv = inverse(h0);
  const Eigen::VectorXd slots = mu_pred.payload();
  Eigen::MatrixXd hj(q, p);
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(p);
  auto residual = [&](const Eigen::VectorXd& e) {
    const GroupElement hx = meas.h(compose(mu_pred, exp_g(TangentVector(g, e))));
    if (hx.group() != meas.meas_group) {
      throw ContractError("compute_H: h output is on " + hx.group().name() + ", expected " +
                          meas.meas_group.name());
    }
    return log_g(compose(h0_inv, hx)).values();
  };
  for (int j = 0; j < p; ++j) {
    const double h = detail::fd_slot_step(fd_step, slots[j]);
    eps[j] = h;
    const Eigen::VectorXd plus = residual(eps);
    eps[j] = -h;
    const Eigen::VectorXd minus = residual(eps);
    eps[j] = 0.0;
    hj.col(j) = (plus - minus) / (2.0 * h);
  }
  return hj;
}

/// Prediction: mean <- mu * exp(Omega), covariance <- F P F^T + Phi Q Phi^T
/// with F = Ad(exp(-Omega)) + Phi * C. On the abelian fast path this
/// collapses to F = I + C and Phi = I. The covariance is re-symmetrized and
/// floored after propagation.
inline ConcentratedGaussian predict(const ConcentratedGaussian& state, const SystemModel& model,
                                    const Eigen::VectorXd& u = Eigen::VectorXd(),
                                    const StepOptions& opts = {}) {
  const GroupId& g = state.mean.group();
  if (g != model.group) {
    throw std::invalid_argument("predict: state is on " + g.name() + " but model is on " +
                                model.group.name());
  }
  const int p = g.tangent_dim();
  if (model.process_noise.rows() != p || model.process_noise.cols() != p) {
    throw std::invalid_argument("predict: process noise must be " + std::to_string(p) + "x" +
                                std::to_string(p));
  }
  const TangentVector omega_hat = model.omega(state.mean, u);
  const GroupElement mean_next = compose(state.mean, exp_g(omega_hat));
  const Eigen::MatrixXd c = compute_C(model, state.mean, u, opts.fd_step);

  Eigen::MatrixXd cov_next;
  if (opts.use_generic_jacobians) {
    const Eigen::MatrixXd phi = phi_g_generic(omega_hat, opts.phi_truncation_order);
    const Eigen::MatrixXd f = adjoint_Ad_generic(exp_g(-omega_hat)) + phi * c;
    cov_next = f * state.cov * f.transpose() + phi * model.process_noise * phi.transpose();
  } else {
    const Eigen::MatrixXd f = Eigen::MatrixXd::Identity(p, p) + c;
    cov_next = f * state.cov * f.transpose() + model.process_noise;
  }
  return ConcentratedGaussian(mean_next, floor_psd(cov_next));
}

/// Correction: innovation in the measurement group's tangent space, Kalman
/// gain from the shared SPD solve, mean composed with exp(K * innovation).
/// When a gating threshold is supplied and the innovation fails the test,
/// the prior is returned unchanged with report.gated = true.
inline std::pair<ConcentratedGaussian, UpdateReport> update(
    const ConcentratedGaussian& state, const GroupElement& z, const MeasurementModel& meas,
    std::optional<double> gate_gamma = std::nullopt, const StepOptions& opts = {}) {
  const GroupId& g = state.mean.group();
  if (g != meas.state_group) {
    throw std::invalid_argument("update: state is on " + g.name() + " but model expects " +
                                meas.state_group.name());
  }
  if (z.group() != meas.meas_group) {
    throw std::invalid_argument("update: measurement is on " + z.group().name() +
                                " but model expects " + meas.meas_group.name());
  }
  const int p = g.tangent_dim();
  const GroupElement hx = meas.h(state.mean);
  if (hx.group() != meas.meas_group) {
    throw ContractError("update: h output is on " + hx.group().name() + ", expected " +
                        meas.meas_group.name());
  }

  const Eigen::VectorXd innovation = log_g(compose(inverse(hx), z)).values();
  const Eigen::MatrixXd h_jac = compute_H(meas, state.mean, opts.fd_step);
  GainResult gain = compute_gain(state.cov, h_jac, meas.meas_noise);
  const Eigen::VectorXd nu = gain.kalman_gain * innovation;

  UpdateReport report{gain.kalman_gain, innovation, nu, gain.innovation_cov, false};
  if (gate_gamma.has_value() &&
      !(mahalanobis_sq(innovation, gain.innovation_cov) < *gate_gamma)) {
    report.gated = true;
    return {state, report};
  }

  const GroupElement mean_next = compose(state.mean, exp_g(TangentVector(g, nu)));
  const Eigen::MatrixXd ikh =
      Eigen::MatrixXd::Identity(p, p) - gain.kalman_gain * h_jac;
  Eigen::MatrixXd cov_next;
  if (opts.use_generic_jacobians) {
    const Eigen::MatrixXd phi =
        phi_g_generic(TangentVector(g, nu), opts.phi_truncation_order);
    cov_next = phi * (ikh * state.cov) * phi.transpose();
  } else {
    cov_next = ikh * state.cov;
  }
  return {ConcentratedGaussian(mean_next, floor_psd(cov_next)), report};
}

/// Builds a displacement function from a classical state equation f on the
/// wrapped scalar state, Omega(X, u) = f(theta, u) - theta. Only meaningful
/// for SO(2)-only states, where tangent coordinates and the classical state
/// coincide.
inline SystemModel system_model_from_f(
    const std::function<double(double, const Eigen::VectorXd&)>& f,
    const Eigen::MatrixXd& process_noise) {
  SystemModel model;
  model.group = GroupId::so2();
  model.omega = [f](const GroupElement& x, const Eigen::VectorXd& u) {
    const double theta = x.payload()[0];
    Eigen::VectorXd w(1);
    w << f(theta, u) - theta;
    return TangentVector(x.group(), w);
  };
  model.process_noise = process_noise;
  return model;
}

}  // namespace manifold_kf
