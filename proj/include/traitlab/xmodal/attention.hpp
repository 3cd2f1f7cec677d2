#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "traitlab/util/errors.hpp"

namespace traitlab::xmodal {

// Guard against denominator underflow; added to every attention denominator.
inline constexpr double kAttentionDenomEpsilon = 1e-6;

// Kernel feature map phi(x) = elu(x) + 1 (strictly positive, C^1).
inline double attention_phi(double x) {
  return x > 0.0 ? x + 1.0 : std::exp(x);
}

inline double attention_phi_derivative(double x) {
  return x > 0.0 ? 1.0 : std::exp(x);
}

inline Eigen::MatrixXd attention_feature_map(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return attention_phi(v); });
}

inline Eigen::MatrixXd attention_feature_map_derivative(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return attention_phi_derivative(v); });
}

// Non-causal linear attention in streaming form: accumulate
// S = sum_j phi(k_j) v_j^T and z = sum_j phi(k_j) once, then
//   out_i = (phi(q_i)^T S) / (phi(q_i)^T z + eps)
// No Tq x Tk weight matrix is ever materialized.
inline Eigen::MatrixXd linear_attention(const Eigen::MatrixXd& q,
                                        const Eigen::MatrixXd& k,
                                        const Eigen::MatrixXd& v) {
  if (q.cols() != k.cols())
    throw validation_error("linear_attention: query/key dimension mismatch");
  if (k.rows() != v.rows())
    throw validation_error("linear_attention: key/value length mismatch");
  if (q.rows() < 1 || k.rows() < 1)
    throw validation_error("linear_attention: empty sequence");
  if (!q.allFinite() || !k.allFinite() || !v.allFinite())
    throw validation_error("linear_attention: non-finite input");

  const Eigen::MatrixXd phi_q = attention_feature_map(q);
  const Eigen::MatrixXd phi_k = attention_feature_map(k);
  const Eigen::MatrixXd s = phi_k.transpose() * v;          // (d, dv)
  const Eigen::VectorXd z = phi_k.colwise().sum().transpose(); // (d)

  Eigen::MatrixXd numer = phi_q * s;                         // (Tq, dv)
  Eigen::VectorXd denom =
      (phi_q * z).array() + kAttentionDenomEpsilon;          // (Tq)
  return numer.array().colwise() / denom.array();
}

} // namespace traitlab::xmodal
