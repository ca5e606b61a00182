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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "manifold_kf/angles.hpp"
#include "manifold_kf/errors.hpp"

namespace manifold_kf {

/// Tolerance for deciding that a matrix lies in the algebra's linear span.
inline constexpr double kVeeSpanTol = 1e-9;

enum class ComponentKind { so2, realn };

/// One factor of a (possibly product) group: SO(2) or R^n.
struct GroupComponent {
  ComponentKind kind;
  int dim;  // tangent dimension; always 1 for so2

  friend bool operator==(const GroupComponent& a, const GroupComponent& b) {
    return a.kind == b.kind && a.dim == b.dim;
  }
};

/// Identifies a group as a flat, ordered list of SO(2) and R^n factors.
/// Nested products are flattened on construction; tangent slots are indexed
/// by concatenation order of the factors.
class GroupId {
 public:
  static GroupId so2() { return GroupId({GroupComponent{ComponentKind::so2, 1}}); }

  static GroupId realn(int n) {
    if (n < 1) throw std::invalid_argument("GroupId::realn: n must be positive");
    return GroupId({GroupComponent{ComponentKind::realn, n}});
  }

  static GroupId product(const std::vector<GroupId>& parts) {
    if (parts.empty()) throw std::invalid_argument("GroupId::product: empty product");
    std::vector<GroupComponent> comps;
    for (const GroupId& part : parts) {
      comps.insert(comps.end(), part.comps_.begin(), part.comps_.end());
    }
    return GroupId(std::move(comps));
  }

  /// The SO(2) x R^n state group used by the tracking models.
  static GroupId so2_realn(int n) { return product({so2(), realn(n)}); }

  const std::vector<GroupComponent>& components() const { return comps_; }

  int tangent_dim() const { return tangent_dim_; }

  /// Dimension of the materialized block-diagonal matrix embedding:
  /// a 2x2 rotation block per SO(2) factor and a 2x2 upper-triangular
  /// block per real scalar slot.
  int matrix_dim() const { return matrix_dim_; }

  /// Tangent-slot offset of factor `i`.
  int slot_offset(std::size_t i) const {
    int off = 0;
    for (std::size_t k = 0; k < i; ++k) off += comps_[k].dim;
    return off;
  }

  bool slot_is_angle(int slot) const {
    int off = 0;
    for (const GroupComponent& c : comps_) {
      if (slot < off + c.dim) return c.kind == ComponentKind::so2;
      off += c.dim;
    }
    throw std::invalid_argument("GroupId::slot_is_angle: slot out of range");
  }

  /// All SO(2) and R^n factors commute, as does any product of them.
  bool is_abelian() const { return true; }

  std::string name() const {
    std::string out;
    for (const GroupComponent& c : comps_) {
      if (!out.empty()) out += "x";
      out += c.kind == ComponentKind::so2 ? "SO2" : "R" + std::to_string(c.dim);
    }
    return out;
  }

  friend bool operator==(const GroupId& a, const GroupId& b) { return a.comps_ == b.comps_; }
  friend bool operator!=(const GroupId& a, const GroupId& b) { return !(a == b); }

 private:
  explicit GroupId(std::vector<GroupComponent> comps) : comps_(std::move(comps)) {
    for (const GroupComponent& c : comps_) {
      tangent_dim_ += c.dim;
      matrix_dim_ += c.kind == ComponentKind::so2 ? 2 : 2 * c.dim;
    }
  }

  std::vector<GroupComponent> comps_;
  int tangent_dim_ = 0;
  int matrix_dim_ = 0;
};

/// Element of R^p identified with the Lie algebra via hat/vee.
class TangentVector {
 public:
  TangentVector(GroupId group, Eigen::VectorXd values)
      : group_(std::move(group)), values_(std::move(values)) {
    if (values_.size() != group_.tangent_dim()) {
      throw std::invalid_argument("TangentVector: expected " +
                                  std::to_string(group_.tangent_dim()) + " values for " +
                                  group_.name() + ", got " + std::to_string(values_.size()));
    }
  }

  static TangentVector zero(const GroupId& group) {
    return TangentVector(group, Eigen::VectorXd::Zero(group.tangent_dim()));
  }

  const GroupId& group() const { return group_; }
  const Eigen::VectorXd& values() const { return values_; }

  TangentVector operator-() const { return TangentVector(group_, -values_); }

 private:
  GroupId group_;
  Eigen::VectorXd values_;
};

/// A point on the group. SO(2) slots store the canonical angle in [-pi, pi)
/// (the rotation-matrix view is materialized on demand); R^n slots store the
/// vector directly. The payload is laid out in tangent-slot order.
class GroupElement {
 public:
  GroupElement(GroupId group, Eigen::VectorXd payload)
      : group_(std::move(group)), payload_(std::move(payload)) {
    if (payload_.size() != group_.tangent_dim()) {
      throw std::invalid_argument("GroupElement: expected " +
                                  std::to_string(group_.tangent_dim()) + " payload values for " +
                                  group_.name() + ", got " + std::to_string(payload_.size()));
    }
    if (!payload_.allFinite()) {
      throw std::invalid_argument("GroupElement: payload must be finite");
    }
    canonicalize();
  }

  static GroupElement identity(const GroupId& group) {
    return GroupElement(group, Eigen::VectorXd::Zero(group.tangent_dim()));
  }

  const GroupId& group() const { return group_; }
  const Eigen::VectorXd& payload() const { return payload_; }

  /// Block-diagonal matrix representation: rotation blocks for SO(2) factors
  /// and [[1, v], [0, 1]] per real scalar slot.
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(group_.matrix_dim(), group_.matrix_dim());
    int slot = 0;
    int row = 0;
    for (const GroupComponent& c : group_.components()) {
      if (c.kind == ComponentKind::so2) {
        const double a = payload_[slot];
        m(row, row) = std::cos(a);
        m(row, row + 1) = -std::sin(a);
        m(row + 1, row) = std::sin(a);
        m(row + 1, row + 1) = std::cos(a);
        slot += 1;
        row += 2;
      } else {
        for (int i = 0; i < c.dim; ++i) {
          m(row, row) = 1.0;
          m(row, row + 1) = payload_[slot];
          m(row + 1, row + 1) = 1.0;
          slot += 1;
          row += 2;
        }
      }
    }
    return m;
  }

 private:
  void canonicalize() {
    int slot = 0;
    for (const GroupComponent& c : group_.components()) {
      if (c.kind == ComponentKind::so2) payload_[slot] = wrap_to_pi(payload_[slot]);
      slot += c.dim;
    }
  }

  GroupId group_;
  Eigen::VectorXd payload_;
};

inline GroupElement compose(const GroupElement& a, const GroupElement& b) {
  if (a.group() != b.group()) {
    throw std::invalid_argument("compose: group mismatch (" + a.group().name() + " vs " +
                                b.group().name() + ")");
  }
  return GroupElement(a.group(), a.payload() + b.payload());
}

inline GroupElement inverse(const GroupElement& a) {
  return GroupElement(a.group(), -a.payload());
}

inline GroupElement exp_g(const TangentVector& v) {
  if (!v.values().allFinite()) {
    throw std::invalid_argument("exp_g: tangent values must be finite");
  }
  return GroupElement(v.group(), v.values());
}

inline TangentVector log_g(const GroupElement& x) {
  return TangentVector(x.group(), x.payload());
}

/// Maps a tangent vector to its algebra matrix: [[0, -t], [t, 0]] per SO(2)
/// slot and [[0, v], [0, 0]] per real scalar slot, block-diagonally.
inline Eigen::MatrixXd hat(const TangentVector& v) {
  const GroupId& g = v.group();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.matrix_dim(), g.matrix_dim());
  int slot = 0;
  int row = 0;
  for (const GroupComponent& c : g.components()) {
    if (c.kind == ComponentKind::so2) {
      m(row, row + 1) = -v.values()[slot];
      m(row + 1, row) = v.values()[slot];
      slot += 1;
      row += 2;
    } else {
      for (int i = 0; i < c.dim; ++i) {
        m(row, row + 1) = v.values()[slot];
        slot += 1;
        row += 2;
      }
    }
  }
  return m;
}

/// Inverse of hat. The input must lie in the algebra's span; a residual
/// beyond kVeeSpanTol raises std::invalid_argument.
inline TangentVector vee(const GroupId& group, const Eigen::MatrixXd& m) {
  if (m.rows() != group.matrix_dim() || m.cols() != group.matrix_dim()) {
    throw std::invalid_argument("vee: expected a " + std::to_string(group.matrix_dim()) + "x" +
                                std::to_string(group.matrix_dim()) + " matrix for " +
                                group.name());
  }
  Eigen::VectorXd values(group.tangent_dim());
  int slot = 0;
  int row = 0;
  for (const GroupComponent& c : group.components()) {
    if (c.kind == ComponentKind::so2) {
      values[slot] = 0.5 * (m(row + 1, row) - m(row, row + 1));
      slot += 1;
      row += 2;
    } else {
      for (int i = 0; i < c.dim; ++i) {
        values[slot] = m(row, row + 1);
        slot += 1;
        row += 2;
      }
    }
  }
  TangentVector v(group, std::move(values));
  const double residual = (m - hat(v)).cwiseAbs().maxCoeff();
  if (!(residual <= kVeeSpanTol)) {
    throw std::invalid_argument("vee: matrix is outside the algebra span (residual " +
                                std::to_string(residual) + ")");
  }
  return v;
}

/// Group adjoint. Every supported group is abelian, so this is the identity.
inline Eigen::MatrixXd adjoint_Ad(const GroupElement& x) {
  const int p = x.group().tangent_dim();
  return Eigen::MatrixXd::Identity(p, p);
}

/// Algebra adjoint. Zero for every supported (abelian) group.
inline Eigen::MatrixXd adjoint_ad(const TangentVector& v) {
  const int p = v.group().tangent_dim();
  return Eigen::MatrixXd::Zero(p, p);
}

/// Group adjoint computed from the defining conjugation
/// Ad(X) e_j = vee(X hat(e_j) X^{-1}), column by column. Exists to validate
/// the abelian shortcut and to support non-abelian extensions.
inline Eigen::MatrixXd adjoint_Ad_generic(const GroupElement& x) {
  const GroupId& g = x.group();
  const int p = g.tangent_dim();
  const Eigen::MatrixXd xm = x.matrix();
  const Eigen::MatrixXd xm_inv = inverse(x).matrix();
  Eigen::MatrixXd ad(p, p);
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
    e[j] = 1.0;
    ad.col(j) = vee(g, xm * hat(TangentVector(g, e)) * xm_inv).values();
  }
  return ad;
}

/// Algebra adjoint computed from the defining commutator
/// ad(v) e_j = vee([hat(v), hat(e_j)]), column by column.
inline Eigen::MatrixXd adjoint_ad_generic(const TangentVector& v) {
  const GroupId& g = v.group();
  const int p = g.tangent_dim();
  const Eigen::MatrixXd vh = hat(v);
  Eigen::MatrixXd ad(p, p);
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
    e[j] = 1.0;
    const Eigen::MatrixXd eh = hat(TangentVector(g, e));
    ad.col(j) = vee(g, vh * eh - eh * vh).values();
  }
  return ad;
}

/// Truncated series sum_{m=0}^{order} (-1)^m A^m / (m+1)! for a given
/// algebra-adjoint matrix A.
inline Eigen::MatrixXd phi_series(const Eigen::MatrixXd& ad_matrix, int truncation_order) {
  if (ad_matrix.rows() != ad_matrix.cols()) {
    throw std::invalid_argument("phi_series: matrix must be square");
  }
  if (truncation_order < 1) {
    throw std::invalid_argument("phi_series: truncation_order must be >= 1");
  }
  const Eigen::Index p = ad_matrix.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd sum = term;
  for (int m = 1; m <= truncation_order; ++m) {
    term = (term * ad_matrix) * (-1.0 / (m + 1));
    sum += term;
  }
  return sum;
}

inline constexpr int kDefaultPhiOrder = 10;

/// Covariance-propagation series for the group's algebra adjoint. Abelian
/// groups (ad = 0) short-circuit to the identity.
inline Eigen::MatrixXd phi_g(const TangentVector& v, int truncation_order = kDefaultPhiOrder) {
  if (truncation_order < 1) {
    throw std::invalid_argument("phi_g: truncation_order must be >= 1");
  }
  const int p = v.group().tangent_dim();
  if (v.group().is_abelian()) return Eigen::MatrixXd::Identity(p, p);
  return phi_series(adjoint_ad_generic(v), truncation_order);
}

/// Full series evaluation without the abelian shortcut.
inline Eigen::MatrixXd phi_g_generic(const TangentVector& v,
                                     int truncation_order = kDefaultPhiOrder) {
  return phi_series(adjoint_ad_generic(v), truncation_order);
}

}  // namespace manifold_kf
