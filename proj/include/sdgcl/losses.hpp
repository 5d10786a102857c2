#pragma once

#include <span>

#include <Eigen/Dense>

namespace sdgcl {

/// Row norms are floored at this value before normalizing.
inline constexpr double kCosineNormFloor = 1e-12;

/// Cosine similarity with the norm floor applied to each side.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const double na = std::max(a.norm(), kCosineNormFloor);
  const double nb = std::max(b.norm(), kCosineNormFloor);
  return a.dot(b) / (na * nb);
}

struct LossValueGrad {
  double value = 0.0;
  Eigen::MatrixXd grad_first;   // d loss / d first argument
  Eigen::MatrixXd grad_second;  // d loss / d second argument (inter-view only)
};

/// -(1/N) sum_i log( exp(s_ii/τ) / sum_{j≠i} exp(s_ij/τ) ) with s = cosine(m1_i, m2_j).
/// The symmetric variant averages the view-1 and view-2 anchored values.
double inter_view_loss(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tau,
                       bool symmetric = false);
LossValueGrad inter_view_loss_grad(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tau,
                                   bool symmetric = false);

/// (1/N) sum_i log sum_{j≠i} exp(cosine(m_i, m_j)/τ).
double intra_view_loss(const Eigen::MatrixXd& m, double tau);
LossValueGrad intra_view_loss_grad(const Eigen::MatrixXd& m, double tau);

/// inter(m1, m2) + (intra(m1) + intra(m2)) / 2.
double contrastive_loss(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tau,
                        bool symmetric = false);

inline constexpr double kProbabilityClamp = 1e-7;

/// Summed binary cross-entropy; probabilities are clamped to [1e-7, 1 - 1e-7].
/// labels: 1 for a positive edge, 0 for a negative one.
double label_loss(std::span<const double> probabilities, std::span<const int> labels);

struct LossBreakdown {
  double inter = 0.0;
  double intra = 0.0;  // mean over the two views
  double label = 0.0;
  double total = 0.0;
};

/// total = alpha * (inter + intra) + label.
LossBreakdown total_loss(double inter, double intra, double label, double alpha);

}  // namespace sdgcl
