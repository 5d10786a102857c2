#pragma once

#include <complex>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "sdgcl/augment.hpp"
#include "sdgcl/spectral.hpp"

namespace sdgcl {

struct ModelDims {
  Index num_nodes = 0;
  Index input_dim = 64;   // C, width of the trainable input embedding
  Index hidden_dim = 64;  // F, width of every convolution layer
  Index embed_dim = 64;   // d
  int num_layers = 2;

  void validate() const;
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// Flat view of one parameter tensor.
template <typename Scalar>
struct TensorSlot {
  using Vector = Eigen::Matrix<std::remove_const_t<Scalar>, Eigen::Dynamic, 1>;
  using MapType = Eigen::Map<std::conditional_t<std::is_const_v<Scalar>, const Vector, Vector>>;

  std::string name;
  MapType values;
  bool decayed;  // weight decay applies (weights and input embeddings, not biases)
};

/// Every trainable tensor of the encoder, projection head, fusion layer and predictor.
/// The same struct carries gradients and optimizer moments.
struct EncoderParams {
  Eigen::MatrixXd input_embeddings;           // N x C
  std::vector<Eigen::MatrixXd> conv_weights;  // C x F, then F x F
  std::vector<Eigen::VectorXd> conv_bias_real;
  std::vector<Eigen::VectorXd> conv_bias_imag;
  Eigen::MatrixXd fc_weight;  // 2F x d
  Eigen::VectorXd fc_bias;
  Eigen::MatrixXd proj_weight1;  // d x d
  Eigen::VectorXd proj_bias1;
  Eigen::MatrixXd proj_weight2;  // d x d
  Eigen::VectorXd proj_bias2;
  Eigen::MatrixXd fusion_weight;  // 2d x d
  Eigen::VectorXd fusion_bias;
  Eigen::VectorXd pred_weight;  // 2d
  Eigen::VectorXd pred_bias;    // 1

  static EncoderParams zeros(const ModelDims& dims);

  ModelDims dims() const;
  Index num_nodes() const noexcept { return input_embeddings.rows(); }

  std::vector<TensorSlot<double>> slots();
  std::vector<TensorSlot<const double>> slots() const;

  Index size() const;
  bool all_finite() const;
};

EncoderParams init_params(const ModelDims& dims, Rng& rng);

struct ComplexFeatures {
  Eigen::MatrixXd real;
  Eigen::MatrixXd imag;

  Index rows() const noexcept { return real.rows(); }
  Index cols() const noexcept { return real.cols(); }
};

/// z if -π/2 <= arg z <= π/2 (equivalently Re z >= 0), else 0.
template <typename T>
std::complex<T> complex_relu(const std::complex<T>& z) {
  return z.real() >= T(0) ? z : std::complex<T>(T(0), T(0));
}

ComplexFeatures complex_relu(const ComplexFeatures& x);

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(typename Derived::Scalar(0));
}

/// Y X W + b before activation; W acts on real and imaginary parts alike.
ComplexFeatures conv_layer_preactivation(const HermitianMatrix& y, const ComplexFeatures& x,
                                         const Eigen::MatrixXd& w, const Eigen::VectorXd& bias_real,
                                         const Eigen::VectorXd& bias_imag);

ComplexFeatures conv_layer_forward(const HermitianMatrix& y, const ComplexFeatures& x,
                                   const Eigen::MatrixXd& w, const Eigen::VectorXd& bias_real,
                                   const Eigen::VectorXd& bias_imag);

/// [real | imag], N x 2F.
Eigen::MatrixXd unwind(const ComplexFeatures& x);

/// Node embeddings Z (N x d) for one propagation operator.
Eigen::MatrixXd encoder_forward(const HermitianMatrix& propagation, const EncoderParams& params);
Eigen::MatrixXd encoder_forward(const GraphView& view, const EncoderParams& params);

/// Two-layer MLP head used by the contrastive losses.
Eigen::MatrixXd project(const Eigen::MatrixXd& z, const EncoderParams& params);

/// R = relu([Z1 | Z2] W_out + B_out).
Eigen::MatrixXd fuse_views(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2,
                           const EncoderParams& params);

/// logistic([r_u | r_v] w_pred + b_pred).
double predict_edge(const Eigen::MatrixXd& fused, Index u, Index v, const EncoderParams& params);

Eigen::VectorXd predict_edges(const Eigen::MatrixXd& fused, std::span<const EdgeRecord> edges,
                              const EncoderParams& params);

}  // namespace sdgcl
