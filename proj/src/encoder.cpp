#include "sdgcl/encoder.hpp"

#include <cmath>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

Eigen::MatrixXd glorot(Index rows, Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  // column-major fill keeps the draw order fixed
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

template <typename Slot, typename Params>
std::vector<Slot> collect_slots(Params& p) {
  std::vector<Slot> out;
  const auto add = [&](std::string name, auto& tensor, bool decayed) {
    out.push_back(Slot{std::move(name), typename Slot::MapType(tensor.data(), tensor.size()), decayed});
  };
  add("input_embeddings", p.input_embeddings, true);
  for (std::size_t l = 0; l < p.conv_weights.size(); ++l) {
    const auto tag = std::to_string(l);
    add("conv" + tag + ".weight", p.conv_weights[l], true);
    add("conv" + tag + ".bias_real", p.conv_bias_real[l], false);
    add("conv" + tag + ".bias_imag", p.conv_bias_imag[l], false);
  }
  add("fc.weight", p.fc_weight, true);
  add("fc.bias", p.fc_bias, false);
  add("proj1.weight", p.proj_weight1, true);
  add("proj1.bias", p.proj_bias1, false);
  add("proj2.weight", p.proj_weight2, true);
  add("proj2.bias", p.proj_bias2, false);
  add("fusion.weight", p.fusion_weight, true);
  add("fusion.bias", p.fusion_bias, false);
  add("pred.weight", p.pred_weight, true);
  add("pred.bias", p.pred_bias, false);
  return out;
}

}  // namespace

void ModelDims::validate() const {
  if (num_nodes < 0) throw InputError("node count must be non-negative");
  if (input_dim <= 0 || hidden_dim <= 0 || embed_dim <= 0) {
    throw InputError("model dimensions must be positive");
  }
  if (num_layers < 1) throw InputError("the encoder needs at least one convolution layer");
}

EncoderParams EncoderParams::zeros(const ModelDims& dims) {
  dims.validate();
  const Index n = dims.num_nodes, c = dims.input_dim, f = dims.hidden_dim, d = dims.embed_dim;
  EncoderParams p;
  p.input_embeddings = Eigen::MatrixXd::Zero(n, c);
  for (int l = 0; l < dims.num_layers; ++l) {
    p.conv_weights.push_back(Eigen::MatrixXd::Zero(l == 0 ? c : f, f));
    p.conv_bias_real.push_back(Eigen::VectorXd::Zero(f));
    p.conv_bias_imag.push_back(Eigen::VectorXd::Zero(f));
  }
  p.fc_weight = Eigen::MatrixXd::Zero(2 * f, d);
  p.fc_bias = Eigen::VectorXd::Zero(d);
  p.proj_weight1 = Eigen::MatrixXd::Zero(d, d);
  p.proj_bias1 = Eigen::VectorXd::Zero(d);
  p.proj_weight2 = Eigen::MatrixXd::Zero(d, d);
  p.proj_bias2 = Eigen::VectorXd::Zero(d);
  p.fusion_weight = Eigen::MatrixXd::Zero(2 * d, d);
  p.fusion_bias = Eigen::VectorXd::Zero(d);
  p.pred_weight = Eigen::VectorXd::Zero(2 * d);
  p.pred_bias = Eigen::VectorXd::Zero(1);
  return p;
}

ModelDims EncoderParams::dims() const {
  ModelDims dims;
  dims.num_nodes = input_embeddings.rows();
  dims.input_dim = input_embeddings.cols();
  dims.hidden_dim = conv_weights.empty() ? 0 : conv_weights.front().cols();
  dims.embed_dim = fc_bias.size();
  dims.num_layers = static_cast<int>(conv_weights.size());
  return dims;
}

std::vector<TensorSlot<double>> EncoderParams::slots() {
  return collect_slots<TensorSlot<double>>(*this);
}

std::vector<TensorSlot<const double>> EncoderParams::slots() const {
  return collect_slots<TensorSlot<const double>>(*this);
}

Index EncoderParams::size() const {
  Index total = 0;
  for (const auto& s : slots()) total += s.values.size();
  return total;
}

bool EncoderParams::all_finite() const {
  for (const auto& s : slots()) {
    if (!s.values.allFinite()) return false;
  }
  return true;
}

EncoderParams init_params(const ModelDims& dims, Rng& rng) {
  EncoderParams p = EncoderParams::zeros(dims);
  p.input_embeddings = glorot(dims.num_nodes, dims.input_dim, rng);
  for (auto& w : p.conv_weights) w = glorot(w.rows(), w.cols(), rng);
  p.fc_weight = glorot(p.fc_weight.rows(), p.fc_weight.cols(), rng);
  p.proj_weight1 = glorot(dims.embed_dim, dims.embed_dim, rng);
  p.proj_weight2 = glorot(dims.embed_dim, dims.embed_dim, rng);
  p.fusion_weight = glorot(2 * dims.embed_dim, dims.embed_dim, rng);
  p.pred_weight = glorot(2 * dims.embed_dim, 1, rng);
  return p;
}

ComplexFeatures complex_relu(const ComplexFeatures& x) {
  ComplexFeatures out{x.real, x.imag};
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (!(x.real(i, j) >= 0.0)) {
        out.real(i, j) = 0.0;
        out.imag(i, j) = 0.0;
      }
    }
  }
  return out;
}

ComplexFeatures conv_layer_preactivation(const HermitianMatrix& y, const ComplexFeatures& x,
                                         const Eigen::MatrixXd& w, const Eigen::VectorXd& bias_real,
                                         const Eigen::VectorXd& bias_imag) {
  if (x.real.rows() != y.dim() || x.imag.rows() != y.dim() || x.real.cols() != x.imag.cols()) {
    throw InputError("convolution input does not match the operator");
  }
  if (w.rows() != x.cols() || bias_real.size() != w.cols() || bias_imag.size() != w.cols()) {
    throw InputError("convolution weight shape mismatch");
  }
  const Eigen::MatrixXd xr = x.real * w;
  const Eigen::MatrixXd xi = x.imag * w;
  const auto& yr = y.real_part();
  const auto& yi = y.imag_part();
  ComplexFeatures out;
  out.real = yr * xr - yi * xi;
  out.imag = yr * xi + yi * xr;
  out.real.rowwise() += bias_real.transpose();
  out.imag.rowwise() += bias_imag.transpose();
  return out;
}

ComplexFeatures conv_layer_forward(const HermitianMatrix& y, const ComplexFeatures& x,
                                   const Eigen::MatrixXd& w, const Eigen::VectorXd& bias_real,
                                   const Eigen::VectorXd& bias_imag) {
  return complex_relu(conv_layer_preactivation(y, x, w, bias_real, bias_imag));
}

Eigen::MatrixXd unwind(const ComplexFeatures& x) {
  Eigen::MatrixXd out(x.rows(), 2 * x.cols());
  out << x.real, x.imag;
  return out;
}

Eigen::MatrixXd encoder_forward(const HermitianMatrix& propagation, const EncoderParams& params) {
  if (propagation.dim() != params.num_nodes()) {
    throw InputError("operator has " + std::to_string(propagation.dim()) +
                     " nodes but parameters expect " + std::to_string(params.num_nodes()));
  }
  ComplexFeatures x{params.input_embeddings,
                    Eigen::MatrixXd::Zero(params.input_embeddings.rows(), params.input_embeddings.cols())};
  for (std::size_t l = 0; l < params.conv_weights.size(); ++l) {
    x = conv_layer_forward(propagation, x, params.conv_weights[l], params.conv_bias_real[l],
                           params.conv_bias_imag[l]);
  }
  Eigen::MatrixXd z = unwind(x) * params.fc_weight;
  z.rowwise() += params.fc_bias.transpose();
  return relu(z);
}

Eigen::MatrixXd encoder_forward(const GraphView& view, const EncoderParams& params) {
  return encoder_forward(renormalized_propagation(view.graph, PhaseSpec{view.q}), params);
}

Eigen::MatrixXd project(const Eigen::MatrixXd& z, const EncoderParams& params) {
  if (z.cols() != params.proj_weight1.rows()) throw InputError("projection input width mismatch");
  Eigen::MatrixXd hidden = z * params.proj_weight1;
  hidden.rowwise() += params.proj_bias1.transpose();
  Eigen::MatrixXd out = relu(hidden) * params.proj_weight2;
  out.rowwise() += params.proj_bias2.transpose();
  return out;
}

Eigen::MatrixXd fuse_views(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2,
                           const EncoderParams& params) {
  if (z1.rows() != z2.rows() || z1.cols() + z2.cols() != params.fusion_weight.rows()) {
    throw InputError("fusion input shape mismatch");
  }
  const Index d = z1.cols();
  Eigen::MatrixXd out = z1 * params.fusion_weight.topRows(d) + z2 * params.fusion_weight.bottomRows(d);
  out.rowwise() += params.fusion_bias.transpose();
  return relu(out);
}

double predict_edge(const Eigen::MatrixXd& fused, Index u, Index v, const EncoderParams& params) {
  if (u < 0 || v < 0 || u >= fused.rows() || v >= fused.rows()) {
    throw InputError("node id out of range in edge prediction");
  }
  const Index d = fused.cols();
  const double logit = fused.row(u).dot(params.pred_weight.head(d)) +
                       fused.row(v).dot(params.pred_weight.tail(d)) + params.pred_bias(0);
  return 1.0 / (1.0 + std::exp(-logit));
}

Eigen::VectorXd predict_edges(const Eigen::MatrixXd& fused, std::span<const EdgeRecord> edges,
                              const EncoderParams& params) {
  Eigen::VectorXd out(static_cast<Index>(edges.size()));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out(static_cast<Index>(i)) = predict_edge(fused, edges[i].src, edges[i].dst, params);
  }
  return out;
}

}  // namespace sdgcl
