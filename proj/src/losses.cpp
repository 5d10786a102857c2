#include "sdgcl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

constexpr Eigen::Index kRowBlock = 256;

struct Normalized {
  Eigen::MatrixXd unit;
  Eigen::VectorXd norms;  // raw norms, before the floor
};

Normalized normalize_rows(const Eigen::MatrixXd& m) {
  Normalized out{m, m.rowwise().norm()};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.unit.row(i) /= std::max(out.norms(i), kCosineNormFloor);
  }
  return out;
}

// Pulls a gradient w.r.t. the unit rows back to the raw rows.
Eigen::MatrixXd normalize_rows_backward(const Normalized& n, const Eigen::MatrixXd& grad_unit) {
  Eigen::MatrixXd out(grad_unit.rows(), grad_unit.cols());
  for (Eigen::Index i = 0; i < grad_unit.rows(); ++i) {
    if (n.norms(i) > kCosineNormFloor) {
      const double along = n.unit.row(i).dot(grad_unit.row(i));
      out.row(i) = (grad_unit.row(i) - along * n.unit.row(i)) / n.norms(i);
    } else {
      out.row(i) = grad_unit.row(i) / kCosineNormFloor;
    }
  }
  return out;
}

// Mean over anchors i of  log sum_{j≠i} exp(S_ij) - [positive] S_ii,  S = A B^T / τ.
// Accumulates d/dA and d/dB of the mean into grad_a / grad_b when they are non-null.
// Each block holds S^T so that one anchor is one contiguous column.
double lse_contrast(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tau, bool positive,
                    Eigen::MatrixXd* grad_a, Eigen::MatrixXd* grad_b) {
  const Eigen::Index n = a.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_tau = 1.0 / tau;
  double total = 0.0;
  Eigen::MatrixXd st;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kRowBlock) {
    const Eigen::Index len = std::min(kRowBlock, n - r0);
    st.noalias() = b * a.middleRows(r0, len).transpose();
    st *= inv_tau;
    for (Eigen::Index k = 0; k < len; ++k) {
      const Eigen::Index i = r0 + k;
      auto col = st.col(k);
      const double diag = col(i);
      col(i) = -std::numeric_limits<double>::infinity();
      const double peak = col.maxCoeff();
      col = (col.array() - peak).exp().matrix();
      const double mass = col.sum();
      total += peak + std::log(mass) - (positive ? diag : 0.0);
      col *= inv_n / mass;  // now d loss / d S_ij for j ≠ i
      if (positive) col(i) = -inv_n;
    }
    if (grad_a) grad_a->middleRows(r0, len).noalias() += inv_tau * (st.transpose() * b);
    if (grad_b) grad_b->noalias() += inv_tau * (st * a.middleRows(r0, len));
  }
  return total * inv_n;
}

void check_contrast_inputs(const Eigen::MatrixXd& m, double tau) {
  if (m.rows() < 2) throw InputError("contrastive losses need at least two nodes");
  if (!(tau > 0.0)) throw InputError("temperature must be positive");
}

}  // namespace

LossValueGrad inter_view_loss_grad(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tau,
                                   bool symmetric) {
  check_contrast_inputs(m1, tau);
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) throw InputError("view shapes differ");
  const Normalized n1 = normalize_rows(m1);
  const Normalized n2 = normalize_rows(m2);
  Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(m1.rows(), m1.cols());
  Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(m2.rows(), m2.cols());
  double value = lse_contrast(n1.unit, n2.unit, tau, true, &g1, &g2);
  if (symmetric) {
    value = 0.5 * (value + lse_contrast(n2.unit, n1.unit, tau, true, &g2, &g1));
    g1 *= 0.5;
    g2 *= 0.5;
  }
  return {value, normalize_rows_backward(n1, g1), normalize_rows_backward(n2, g2)};
}

double inter_view_loss(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tau,
                       bool symmetric) {
  check_contrast_inputs(m1, tau);
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) throw InputError("view shapes differ");
  const Normalized n1 = normalize_rows(m1);
  const Normalized n2 = normalize_rows(m2);
  const double forward = lse_contrast(n1.unit, n2.unit, tau, true, nullptr, nullptr);
  if (!symmetric) return forward;
  return 0.5 * (forward + lse_contrast(n2.unit, n1.unit, tau, true, nullptr, nullptr));
}

LossValueGrad intra_view_loss_grad(const Eigen::MatrixXd& m, double tau) {
  check_contrast_inputs(m, tau);
  const Normalized n = normalize_rows(m);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const double value = lse_contrast(n.unit, n.unit, tau, false, &g, &g);
  return {value, normalize_rows_backward(n, g), {}};
}

double intra_view_loss(const Eigen::MatrixXd& m, double tau) {
  check_contrast_inputs(m, tau);
  const Normalized n = normalize_rows(m);
  return lse_contrast(n.unit, n.unit, tau, false, nullptr, nullptr);
}

double contrastive_loss(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tau,
                        bool symmetric) {
  return inter_view_loss(m1, m2, tau, symmetric) +
         0.5 * (intra_view_loss(m1, tau) + intra_view_loss(m2, tau));
}

double label_loss(std::span<const double> probabilities, std::span<const int> labels) {
  if (probabilities.empty()) throw InputError("label loss over an empty edge set");
  if (probabilities.size() != labels.size()) throw InputError("prediction/label count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= labels[i] != 0 ? std::log(p) : std::log1p(-p);
  }
  return total;
}

LossBreakdown total_loss(double inter, double intra, double label, double alpha) {
  return {inter, intra, label, alpha * (inter + intra) + label};
}

}  // namespace sdgcl
