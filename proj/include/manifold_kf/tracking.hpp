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
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "manifold_kf/chi2.hpp"
#include "manifold_kf/covariance.hpp"
#include "manifold_kf/lgekf.hpp"
#include "manifold_kf/models.hpp"
#include "manifold_kf/simkit.hpp"
#include "manifold_kf/wrapped_ekf.hpp"

namespace manifold_kf {

/// Validation gating and the azimuth tracker loop. A tracker run is a pure
/// function of its inputs; independent runs need no synchronization.

/// Chi-squared gate: threshold gamma at significance `a` with `dof`
/// degrees of freedom.
struct GateConfig {
  double significance = 0.95;
  int dof = 1;
  double gamma = 0.0;

  static GateConfig from_significance(double a, int dof) {
    GateConfig g;
    g.significance = a;
    g.dof = dof;
    g.gamma = chi2_quantile(dof, a);
    return g;
  }
};

/// Accepts an innovation iff nu^T S^{-1} nu < gamma.
inline bool gate_test(const Eigen::VectorXd& innovation, const Eigen::MatrixXd& s,
                      double gamma) {
  return mahalanobis_sq(innovation, s) < gamma;
}

/// One tracker timestep: the measurement (if any), whether it was gated out,
/// and the posterior mean/covariance-diagonal, with optional ground truth.
struct TrackRecord {
  double t = 0.0;
  std::optional<double> z;
  bool gated = false;
  Eigen::VectorXd mean;
  Eigen::VectorXd cov_diag;
  std::optional<Eigen::Vector3d> truth;  // theta, omega, alpha
};

enum class FilterKind { lgekf, wrapped_ekf };
enum class ModelKind { stationary, pendulum, const_accel, const_vel };

inline int state_dim(ModelKind kind) {
  switch (kind) {
    case ModelKind::stationary:
    case ModelKind::pendulum:
      return 1;
    case ModelKind::const_vel:
      return 2;
    case ModelKind::const_accel:
      return 3;
  }
  throw std::invalid_argument("state_dim: unknown model kind");
}

struct TrackerConfig {
  FilterKind filter = FilterKind::lgekf;
  ModelKind model = ModelKind::const_accel;
  double period = 0.1;                    // T, seconds
  PendulumParams pendulum{};              // pendulum model only
  double process_noise_density = 0.01;    // q; scales the default Q structure
  Eigen::MatrixXd process_noise;          // explicit Q; empty -> default structure
  double sigma_r = 0.1;                   // measurement noise std, radians
  std::optional<GateConfig> gate;         // disabled when empty
  Eigen::VectorXd initial_cov_diag;       // empty -> [sigma_r^2, 1, 1][:dim]
};

namespace detail {

inline Eigen::MatrixXd resolve_process_noise(const TrackerConfig& cfg) {
  const int dim = state_dim(cfg.model);
  if (cfg.process_noise.size() != 0) {
    if (cfg.process_noise.rows() != dim || cfg.process_noise.cols() != dim) {
      throw std::invalid_argument("tracker: process noise must be " + std::to_string(dim) +
                                  "x" + std::to_string(dim));
    }
    return cfg.process_noise;
  }
  const double q = cfg.process_noise_density;
  switch (cfg.model) {
    case ModelKind::stationary:
    case ModelKind::pendulum:
      return Eigen::MatrixXd::Constant(1, 1, q);
    case ModelKind::const_vel:
      return const_vel_process_noise(cfg.period, q);
    case ModelKind::const_accel:
      return const_accel_process_noise(cfg.period, q);
  }
  throw std::invalid_argument("tracker: unknown model kind");
}

inline Eigen::VectorXd resolve_initial_cov_diag(const TrackerConfig& cfg) {
  const int dim = state_dim(cfg.model);
  if (cfg.initial_cov_diag.size() != 0) {
    if (cfg.initial_cov_diag.size() != dim) {
      throw std::invalid_argument("tracker: initial covariance diagonal must have " +
                                  std::to_string(dim) + " entries");
    }
    return cfg.initial_cov_diag;
  }
  Eigen::VectorXd d(dim);
  d[0] = cfg.sigma_r * cfg.sigma_r;
  for (int i = 1; i < dim; ++i) d[i] = 1.0;
  return d;
}

inline SystemModel build_system_model(const TrackerConfig& cfg, const Eigen::MatrixXd& q) {
  switch (cfg.model) {
    case ModelKind::stationary:
      return stationary_model(q);
    case ModelKind::pendulum:
      return pendulum_model(cfg.pendulum, q);
    case ModelKind::const_vel:
      return const_vel_model(ConstAccelParams{cfg.period}, q);
    case ModelKind::const_accel:
      return const_accel_model(ConstAccelParams{cfg.period}, q);
  }
  throw std::invalid_argument("tracker: unknown model kind");
}

// Classical state equation mirroring the displacement arithmetic of the
// matching group model, for the wrapped-EKF side.
inline Eigen::VectorXd classical_f(ModelKind kind, double t, const PendulumParams& p,
                                   const Eigen::VectorXd& x) {
  Eigen::VectorXd out = x;
  switch (kind) {
    case ModelKind::stationary:
      break;
    case ModelKind::pendulum:
      out[0] = x[0] + (p.c1 * std::sin(x[0]) + p.c2);
      break;
    case ModelKind::const_vel:
      out[0] = x[0] + t * x[1];
      break;
    case ModelKind::const_accel:
      out[0] = x[0] + (t * x[1] + 0.5 * t * t * x[2]);
      out[1] = x[1] + t * x[2];
      break;
  }
  return out;
}

inline Eigen::MatrixXd classical_f_jacobian(ModelKind kind, double t, const PendulumParams& p,
                                            const Eigen::VectorXd& x) {
  const int dim = static_cast<int>(x.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(dim, dim);
  switch (kind) {
    case ModelKind::stationary:
      break;
    case ModelKind::pendulum:
      f(0, 0) = 1.0 + p.c1 * std::cos(x[0]);
      break;
    case ModelKind::const_vel:
      f(0, 1) = t;
      break;
    case ModelKind::const_accel:
      f(0, 1) = t;
      f(0, 2) = 0.5 * t * t;
      f(1, 2) = t;
      break;
  }
  return f;
}

// One tracker filter behind a uniform step interface; either the group
// filter on SO(2) x R^n or the wrapped EKF on R^n.
class TrackerEngine {
 public:
  TrackerEngine(const TrackerConfig& cfg, double q_scale = 1.0)
      : kind_(cfg.filter), model_kind_(cfg.model), period_(cfg.period),
        pendulum_(cfg.pendulum) {
    const int dim = state_dim(cfg.model);
    q_mat_ = resolve_process_noise(cfg) * q_scale;
    r_mat_ = Eigen::MatrixXd::Constant(1, 1, cfg.sigma_r * cfg.sigma_r);
    p0_ = resolve_initial_cov_diag(cfg).asDiagonal();
    if (cfg.gate) gate_gamma_ = cfg.gate->gamma;
    if (kind_ == FilterKind::lgekf) {
      system_ = build_system_model(cfg, q_mat_);
      meas_ = azimuth_measurement(system_->group, r_mat_);
    } else {
      state_mask_.assign(static_cast<std::size_t>(dim), false);
      state_mask_[0] = true;
    }
  }

  void init(double theta0) {
    const int dim = state_dim(model_kind_);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
    x0[0] = theta0;
    if (kind_ == FilterKind::lgekf) {
      lg_.emplace(GroupElement(system_->group, x0), p0_);
    } else {
      wr_.emplace(x0, p0_, state_mask_);
    }
  }

  void predict() {
    if (kind_ == FilterKind::lgekf) {
      lg_ = manifold_kf::predict(*lg_, *system_);
    } else {
      const ModelKind kind = model_kind_;
      const double t = period_;
      const PendulumParams p = pendulum_;
      wr_ = ekf_predict(
          *wr_,
          [kind, t, p](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
            return classical_f(kind, t, p, x);
          },
          [kind, t, p](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
            return classical_f_jacobian(kind, t, p, x);
          },
          q_mat_);
    }
  }

  // Returns true when the measurement was gated out.
  bool update(double z) {
    if (kind_ == FilterKind::lgekf) {
      Eigen::VectorXd zp(1);
      zp << z;
      auto [next, report] =
          manifold_kf::update(*lg_, GroupElement(GroupId::so2(), zp), *meas_, gate_gamma_);
      lg_ = next;
      return report.gated;
    }
    Eigen::VectorXd zv(1);
    zv << z;
    const int dim = static_cast<int>(wr_->x.size());
    auto [next, report] = ekf_update(
        *wr_, zv, [](const Eigen::VectorXd& x) { return x.head(1).eval(); },
        [dim](const Eigen::VectorXd&) {
          Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1, dim);
          h(0, 0) = 1.0;
          return h;
        },
        r_mat_, {true}, gate_gamma_);
    wr_ = next;
    return report.gated;
  }

  Eigen::VectorXd mean() const {
    return kind_ == FilterKind::lgekf ? lg_->mean.payload() : wr_->x;
  }

  Eigen::MatrixXd cov() const { return kind_ == FilterKind::lgekf ? lg_->cov : wr_->cov; }

  Eigen::VectorXd cov_diag() const { return cov().diagonal(); }

 private:
  FilterKind kind_;
  ModelKind model_kind_;
  double period_;
  PendulumParams pendulum_;
  Eigen::MatrixXd q_mat_;
  Eigen::MatrixXd r_mat_;
  Eigen::MatrixXd p0_;
  std::optional<double> gate_gamma_;
  std::optional<SystemModel> system_;
  std::optional<MeasurementModel> meas_;
  std::optional<ConcentratedGaussian> lg_;
  std::vector<bool> state_mask_;
  std::optional<WrappedState> wr_;
};

inline std::size_t find_first_valid(const std::vector<Measurement>& zs) {
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (zs[k].z.has_value()) return k;
  }
  throw std::invalid_argument("tracker: measurement sequence has no valid measurement");
}

inline void validate_sequence(const std::vector<Measurement>& zs) {
  if (zs.empty()) throw std::invalid_argument("tracker: measurement sequence is empty");
  for (std::size_t k = 1; k < zs.size(); ++k) {
    if (!(zs[k].t > zs[k - 1].t)) {
      throw std::invalid_argument("tracker: timestamps must be strictly increasing at index " +
                                  std::to_string(k));
    }
  }
}

}  // namespace detail

/// Runs the configured filter over a measurement sequence. The state is
/// initialized from the first valid measurement (theta0 = z, rates zero,
/// P0 per config); that measurement is consumed by initialization. Earlier
/// dropout steps carry the initial state. Missing measurements afterwards
/// trigger predict-only steps; gated measurements leave the prior in place.
inline std::vector<TrackRecord> run_tracker(const TrackerConfig& cfg,
                                            const std::vector<Measurement>& zs,
                                            const std::vector<TruthSample>* truth = nullptr) {
  detail::validate_sequence(zs);
  if (truth != nullptr && truth->size() != zs.size()) {
    throw std::invalid_argument("tracker: truth length must match the measurement sequence");
  }
  const std::size_t k0 = detail::find_first_valid(zs);
  detail::TrackerEngine engine(cfg);
  engine.init(*zs[k0].z);

  std::vector<TrackRecord> records(zs.size());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    bool gated = false;
    if (k > k0) {
      engine.predict();
      if (zs[k].z.has_value()) gated = engine.update(*zs[k].z);
    }
    TrackRecord& rec = records[k];
    rec.t = zs[k].t;
    rec.z = zs[k].z;
    rec.gated = gated;
    rec.mean = engine.mean();
    rec.cov_diag = engine.cov_diag();
    if (truth != nullptr) {
      const TruthSample& s = (*truth)[k];
      rec.truth = Eigen::Vector3d(s.theta, s.omega, s.alpha);
    }
  }
  return records;
}

/// Root-mean-square error with each residual wrapped to [-pi, pi).
inline double angular_rmse(const std::vector<double>& estimates,
                           const std::vector<double>& truth) {
  if (estimates.size() != truth.size() || estimates.empty()) {
    throw std::invalid_argument("angular_rmse: sequences must have equal nonzero length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double e = wrap_to_pi(estimates[i] - truth[i]);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

/// Plain RMSE for Euclidean slots (rates, accelerations).
inline double rmse(const std::vector<double>& estimates, const std::vector<double>& truth) {
  if (estimates.size() != truth.size() || estimates.empty()) {
    throw std::invalid_argument("rmse: sequences must have equal nonzero length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double e = estimates[i] - truth[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

/// Worst-case per-step disagreement between the group filter and the
/// wrapped EKF run in lockstep on identical inputs.
struct DivergenceReport {
  double max_mean_divergence = 0.0;  // sup over steps/slots, angles wrapped
  double max_cov_divergence = 0.0;   // sup over steps of Frobenius norm
  std::size_t steps = 0;
};

/// Runs both filters on the same measurements with identical noise and
/// initialization and reports the maximum trajectory divergence.
/// `wrapped_q_scale` deliberately breaks the premise for sanity checks.
inline DivergenceReport compare_filters(const TrackerConfig& cfg,
                                        const std::vector<Measurement>& zs,
                                        double wrapped_q_scale = 1.0) {
  detail::validate_sequence(zs);
  const std::size_t k0 = detail::find_first_valid(zs);

  TrackerConfig lg_cfg = cfg;
  lg_cfg.filter = FilterKind::lgekf;
  TrackerConfig wr_cfg = cfg;
  wr_cfg.filter = FilterKind::wrapped_ekf;

  detail::TrackerEngine lg(lg_cfg);
  detail::TrackerEngine wr(wr_cfg, wrapped_q_scale);
  lg.init(*zs[k0].z);
  wr.init(*zs[k0].z);

  DivergenceReport report;
  report.steps = zs.size();
  for (std::size_t k = k0; k < zs.size(); ++k) {
    if (k > k0) {
      lg.predict();
      wr.predict();
      if (zs[k].z.has_value()) {
        lg.update(*zs[k].z);
        wr.update(*zs[k].z);
      }
    }
    const Eigen::VectorXd ma = lg.mean();
    const Eigen::VectorXd mb = wr.mean();
    for (Eigen::Index i = 0; i < ma.size(); ++i) {
      const double d =
          i == 0 ? std::abs(wrap_to_pi(ma[i] - mb[i])) : std::abs(ma[i] - mb[i]);
      report.max_mean_divergence = std::max(report.max_mean_divergence, d);
    }
    report.max_cov_divergence =
        std::max(report.max_cov_divergence, (lg.cov() - wr.cov()).norm());
  }
  return report;
}

}  // namespace manifold_kf
