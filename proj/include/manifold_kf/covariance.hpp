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
#include <stdexcept>
#include <string>

#include "manifold_kf/errors.hpp"

namespace manifold_kf {

inline constexpr double kPsdClampTol = 1e-9;
inline constexpr double kMaxConditionNumber = 1e12;

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Re-symmetrizes a covariance and floors roundoff-negative eigenvalues.
/// Eigenvalues in [-tol, 0) are clamped to zero; anything below -tol is a
/// genuine loss of positive semi-definiteness and raises NumericError.
/// Matrices that are already PSD pass through untouched after symmetrization.
inline Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& cov, double tol = kPsdClampTol) {
  Eigen::MatrixXd sym = symmetrized(cov);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericError("floor_psd: eigendecomposition failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig >= 0.0) return sym;
  if (min_eig < -tol) {
    throw NumericError("floor_psd: covariance lost positive semi-definiteness (min eigenvalue " +
                       std::to_string(min_eig) + ")");
  }
  const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  return symmetrized(es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose());
}

/// Validates symmetry and positive semi-definiteness of a covariance-like
/// matrix, raising std::invalid_argument naming `what` on failure.
inline void require_symmetric_psd(const Eigen::MatrixXd& m, const std::string& what,
                                  double sym_tol = 1e-10, double eig_tol = 1e-10) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(what + ": matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(what + ": matrix must be finite");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol) {
    throw std::invalid_argument(what + ": matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -eig_tol) {
    throw std::invalid_argument(what + ": matrix must be positive semi-definite");
  }
}

/// Checks that a symmetric matrix is positive definite and well conditioned;
/// raises NumericError otherwise (the innovation-covariance failure mode).
inline void require_invertible_spd(const Eigen::MatrixXd& s,
                                   double max_cond = kMaxConditionNumber) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(s), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericError("innovation covariance: eigendecomposition failed");
  }
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > max_cond) {
    throw NumericError("innovation covariance is singular or ill-conditioned");
  }
}

struct GainResult {
  Eigen::MatrixXd innovation_cov;  // S = H P H^T + R, symmetrized
  Eigen::MatrixXd kalman_gain;     // K = P H^T S^{-1}
};

/// Computes the innovation covariance and Kalman gain shared by both filter
/// flavors. S is validated as invertible SPD before solving.
inline GainResult compute_gain(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& h_jac,
                               const Eigen::MatrixXd& meas_noise) {
  Eigen::MatrixXd s = symmetrized(h_jac * cov * h_jac.transpose() + meas_noise);
  require_invertible_spd(s);
  // K^T = S^{-1} (H P) since P is symmetric.
  Eigen::MatrixXd kt = s.llt().solve(h_jac * cov);
  return GainResult{std::move(s), kt.transpose()};
}

/// Squared Mahalanobis norm r^T S^{-1} r of an innovation.
inline double mahalanobis_sq(const Eigen::VectorXd& r, const Eigen::MatrixXd& s) {
  require_invertible_spd(s);
  return r.dot(s.llt().solve(r));
}

}  // namespace manifold_kf
