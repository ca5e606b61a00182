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
#include <cmath>
#include <stdexcept>

#include "manifold_kf/covariance.hpp"
#include "manifold_kf/group.hpp"
#include "manifold_kf/lgekf.hpp"

namespace manifold_kf {

/// Concrete system and measurement models for azimuth tracking, with
/// analytic Jacobians. All models ignore the control input.

/// Rotary-joint pendulum parameters: x' = x + c1*sin(x) + c2.
struct PendulumParams {
  double c1 = 0.1;  // gravity coefficient
  double c2 = 0.05;  // velocity offset, radians per step
};

/// Constant-angular-acceleration parameters.
struct ConstAccelParams {
  double T = 0.1;  // sampling period, seconds
};

namespace detail {

inline void require_scalar_noise(const Eigen::MatrixXd& q, const char* what) {
  if (q.rows() != 1 || q.cols() != 1) {
    throw std::invalid_argument(std::string(what) + ": noise must be 1x1");
  }
  if (!(q(0, 0) >= 0.0)) {
    throw std::invalid_argument(std::string(what) + ": noise must be >= 0");
  }
}

}  // namespace detail

/// Stationary process on SO(2): zero displacement, zero Jacobian; the
/// prediction leaves the mean unchanged and adds Q to the variance.
inline SystemModel stationary_model(const Eigen::MatrixXd& q) {
  detail::require_scalar_noise(q, "stationary_model");
  SystemModel model;
  model.group = GroupId::so2();
  model.omega = [](const GroupElement& x, const Eigen::VectorXd&) {
    return TangentVector::zero(x.group());
  };
  model.jacobian_C = [](const GroupElement&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1);
  };
  model.process_noise = q;
  return model;
}

/// Pendulum process on SO(2): Omega(X) = c1*sin(theta) + c2 with
/// C(mu) = c1*cos(mu).
inline SystemModel pendulum_model(const PendulumParams& p, const Eigen::MatrixXd& q) {
  detail::require_scalar_noise(q, "pendulum_model");
  if (!std::isfinite(p.c1) || !std::isfinite(p.c2)) {
    throw std::invalid_argument("pendulum_model: parameters must be finite");
  }
  SystemModel model;
  model.group = GroupId::so2();
  model.omega = [p](const GroupElement& x, const Eigen::VectorXd&) {
    const double theta = log_g(x).values()[0];
    Eigen::VectorXd w(1);
    w << p.c1 * std::sin(theta) + p.c2;
    return TangentVector(x.group(), w);
  };
  model.jacobian_C = [p](const GroupElement& mu, const Eigen::VectorXd&) {
    Eigen::MatrixXd c(1, 1);
    c << p.c1 * std::cos(mu.payload()[0]);
    return c;
  };
  model.process_noise = q;
  return model;
}

/// Constant angular acceleration on SO(2) x R^2:
/// Omega(X) = [T*w + T^2/2 * a, T*a, 0]; F = I + C is the familiar
/// constant-acceleration transition matrix.
inline SystemModel const_accel_model(const ConstAccelParams& p, const Eigen::MatrixXd& q) {
  if (!(p.T > 0.0)) {
    throw std::invalid_argument("const_accel_model: sampling period must be > 0");
  }
  if (q.rows() != 3 || q.cols() != 3) {
    throw std::invalid_argument("const_accel_model: process noise must be 3x3");
  }
  require_symmetric_psd(q, "const_accel_model process noise");
  const double t = p.T;
  SystemModel model;
  model.group = GroupId::so2_realn(2);
  model.omega = [t](const GroupElement& x, const Eigen::VectorXd&) {
    const double w = x.payload()[1];
    const double a = x.payload()[2];
    Eigen::VectorXd d(3);
    d << t * w + 0.5 * t * t * a, t * a, 0.0;
    return TangentVector(x.group(), d);
  };
  model.jacobian_C = [t](const GroupElement&, const Eigen::VectorXd&) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
    c(0, 1) = t;
    c(0, 2) = 0.5 * t * t;
    c(1, 2) = t;
    return c;
  };
  model.process_noise = q;
  return model;
}

/// Constant angular velocity on SO(2) x R: Omega(X) = [T*w, 0].
inline SystemModel const_vel_model(const ConstAccelParams& p, const Eigen::MatrixXd& q) {
  if (!(p.T > 0.0)) {
    throw std::invalid_argument("const_vel_model: sampling period must be > 0");
  }
  if (q.rows() != 2 || q.cols() != 2) {
    throw std::invalid_argument("const_vel_model: process noise must be 2x2");
  }
  require_symmetric_psd(q, "const_vel_model process noise");
  const double t = p.T;
  SystemModel model;
  model.group = GroupId::so2_realn(1);
  model.omega = [t](const GroupElement& x, const Eigen::VectorXd&) {
    Eigen::VectorXd d(2);
    d << t * x.payload()[1], 0.0;
    return TangentVector(x.group(), d);
  };
  model.jacobian_C = [t](const GroupElement&, const Eigen::VectorXd&) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = t;
    return c;
  };
  model.process_noise = q;
  return model;
}

/// Azimuth measurement: extracts the SO(2) factor of the state (the identity
/// map on a pure SO(2) state). H = [1 0 ... 0].
inline MeasurementModel azimuth_measurement(const GroupId& state_group,
                                            const Eigen::MatrixXd& r) {
  if (r.rows() != 1 || r.cols() != 1 || !(r(0, 0) > 0.0)) {
    throw std::invalid_argument("azimuth_measurement: measurement noise must be 1x1 and > 0");
  }
  if (state_group.components().empty() ||
      state_group.components().front().kind != ComponentKind::so2) {
    throw std::invalid_argument(
        "azimuth_measurement: state group must lead with an SO2 factor, got " +
        state_group.name());
  }
  MeasurementModel meas;
  meas.state_group = state_group;
  meas.meas_group = GroupId::so2();
  meas.h = [](const GroupElement& x) {
    return GroupElement(GroupId::so2(), x.payload().head(1));
  };
  const int p = state_group.tangent_dim();
  meas.jacobian_H = [p](const GroupElement&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1, p);
    h(0, 0) = 1.0;
    return h;
  };
  meas.meas_noise = r;
  return meas;
}

/// Discrete white-noise-on-acceleration process covariance q * G G^T with
/// G = [T^2/2, T, 1]^T, for the constant-acceleration model.
inline Eigen::Matrix3d const_accel_process_noise(double t, double q) {
  if (!(t > 0.0) || !(q >= 0.0)) {
    throw std::invalid_argument("const_accel_process_noise: need T > 0 and q >= 0");
  }
  Eigen::Vector3d g(0.5 * t * t, t, 1.0);
  return q * g * g.transpose();
}

/// Same structure one derivative down, G = [T^2/2, T]^T, for the
/// constant-velocity model.
inline Eigen::Matrix2d const_vel_process_noise(double t, double q) {
  if (!(t > 0.0) || !(q >= 0.0)) {
    throw std::invalid_argument("const_vel_process_noise: need T > 0 and q >= 0");
  }
  Eigen::Vector2d g(0.5 * t * t, t);
  return q * g * g.transpose();
}

}  // namespace manifold_kf
