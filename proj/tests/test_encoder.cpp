#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "sdgcl/augment.hpp"
#include "sdgcl/encoder.hpp"
#include "sdgcl/error.hpp"
#include "support.hpp"

using namespace sdgcl;
using namespace sdgcl::testing;

namespace {

constexpr double pi = std::numbers::pi;

ModelDims small_dims(Index n, Index width = 6) {
  ModelDims d;
  d.num_nodes = n;
  d.input_dim = width;
  d.hidden_dim = width + 1;
  d.embed_dim = width - 1;
  return d;
}

// Randomizes biases as well so that every term is exercised.
EncoderParams random_params(const ModelDims& dims, Rng& rng) {
  EncoderParams p = init_params(dims, rng);
  for (auto& slot : p.slots()) {
    if (!slot.decayed) slot.values = random_matrix(slot.values.size(), 1, rng, 0.1);
  }
  return p;
}

Eigen::MatrixXcd dense_complex_relu(const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd out = x;
  for (Index i = 0; i < x.size(); ++i) out(i) = x(i).real() >= 0.0 ? x(i) : Complex(0, 0);
  return out;
}

// Whole encoder in dense complex arithmetic.
Eigen::MatrixXd dense_encoder(const Eigen::MatrixXcd& y, const EncoderParams& p) {
  Eigen::MatrixXcd x = p.input_embeddings.cast<Complex>();
  for (std::size_t l = 0; l < p.conv_weights.size(); ++l) {
    Eigen::VectorXcd b(p.conv_bias_real[l].size());
    for (Index k = 0; k < b.size(); ++k) b(k) = Complex(p.conv_bias_real[l](k), p.conv_bias_imag[l](k));
    Eigen::MatrixXcd pre = y * x * p.conv_weights[l].cast<Complex>();
    pre.rowwise() += b.transpose();
    x = dense_complex_relu(pre);
  }
  Eigen::MatrixXd unwound(x.rows(), 2 * x.cols());
  unwound << x.real(), x.imag();
  Eigen::MatrixXd z = unwound * p.fc_weight;
  z.rowwise() += p.fc_bias.transpose();
  return z.cwiseMax(0.0);
}

Eigen::PermutationMatrix<Eigen::Dynamic> random_permutation(Index n, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
  for (Index i = 0; i < n; ++i) perm.indices()(i) = idx[static_cast<std::size_t>(i)];
  return perm;
}

}  // namespace

TEST_CASE("init_params") {
  ModelDims dims;
  dims.num_nodes = 50;
  Rng a(7), b(7);
  const auto p = init_params(dims, a);
  const auto q = init_params(dims, b);
  const auto ps = p.slots();
  const auto qs = q.slots();
  REQUIRE(ps.size() == qs.size());
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK(ps[i].values == qs[i].values);

  const double bound = std::sqrt(6.0 / 128.0);
  CHECK(p.conv_weights[1].cwiseAbs().maxCoeff() <= 0.3062);
  CHECK(p.conv_weights[1].cwiseAbs().maxCoeff() <= bound);
  CHECK(p.proj_weight1.cwiseAbs().maxCoeff() <= bound);
  CHECK(p.input_embeddings.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (50 + 64)));
  for (const auto& slot : ps) {
    if (!slot.decayed) CHECK(slot.values.isZero());
  }
  CHECK(p.all_finite());
  CHECK(p.dims() == dims);
}

TEST_CASE("EncoderParams shapes and slots") {
  ModelDims dims = small_dims(9);
  const auto p = EncoderParams::zeros(dims);
  CHECK(p.input_embeddings.rows() == 9);
  CHECK(p.conv_weights.size() == 2);
  CHECK(p.conv_weights[0].rows() == dims.input_dim);
  CHECK(p.conv_weights[1].rows() == dims.hidden_dim);
  CHECK(p.fc_weight.rows() == 2 * dims.hidden_dim);
  CHECK(p.fc_weight.cols() == dims.embed_dim);
  CHECK(p.fusion_weight.rows() == 2 * dims.embed_dim);
  CHECK(p.pred_weight.size() == 2 * dims.embed_dim);
  CHECK(p.pred_bias.size() == 1);
  Index total = 0;
  for (const auto& s : p.slots()) total += s.values.size();
  CHECK(total == p.size());
  CHECK(p.slots().front().name == "input_embeddings");
  CHECK(p.slots().back().name == "pred.bias");

  dims.num_layers = 0;
  CHECK_THROWS_AS(dims.validate(), InputError);
}

TEST_CASE("complex_relu") {
  CHECK(complex_relu(Complex(1, 2)) == Complex(1, 2));
  CHECK(complex_relu(Complex(-1, 0.5)) == Complex(0, 0));
  CHECK(complex_relu(Complex(0, 3)) == Complex(0, 3));
  CHECK(complex_relu(Complex(0, 0)) == Complex(0, 0));
  Rng rng(1);
  std::normal_distribution<double> n;
  for (int i = 0; i < 1000; ++i) {
    const Complex z(n(rng), n(rng));
    CHECK(complex_relu(complex_relu(z)) == complex_relu(z));
  }
}

TEST_CASE("unwind") {
  ComplexFeatures x{Eigen::MatrixXd::Constant(3, 2, 1.5), Eigen::MatrixXd::Zero(3, 2)};
  Eigen::MatrixXd expected(3, 4);
  expected << Eigen::MatrixXd::Constant(3, 2, 1.5), Eigen::MatrixXd::Zero(3, 2);
  CHECK(unwind(x) == expected);

  ComplexFeatures i{Eigen::MatrixXd::Zero(4, 3), Eigen::MatrixXd::Ones(4, 3)};
  const auto u = unwind(i);
  CHECK(u.rows() == 4);
  CHECK(u.cols() == 6);
  CHECK(u.leftCols(3).isZero());
  CHECK(u.rightCols(3) == Eigen::MatrixXd::Ones(4, 3));
}

TEST_CASE("conv_layer_forward") {
  Rng rng(2);
  const Index n = 10, c = 4;
  ComplexFeatures x{random_matrix(n, c, rng).cwiseAbs(), random_matrix(n, c, rng)};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(c);
  const auto same = conv_layer_forward(HermitianMatrix::identity(n), x, Eigen::MatrixXd::Identity(c, c), zero, zero);
  CHECK(same.real == x.real);
  CHECK(same.imag == x.imag);

  const Eigen::VectorXd br = Eigen::VectorXd::LinSpaced(c, -1.0, 1.0);
  const Eigen::VectorXd bi = Eigen::VectorXd::Constant(c, 0.25);
  ComplexFeatures zeros{Eigen::MatrixXd::Zero(n, c), Eigen::MatrixXd::Zero(n, c)};
  const auto bias_only = conv_layer_forward(HermitianMatrix::identity(n), zeros, random_matrix(c, c, rng), br, bi);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < c; ++k) {
      const Complex expected = complex_relu(Complex(br(k), bi(k)));
      CHECK(bias_only.real(i, k) == expected.real());
      CHECK(bias_only.imag(i, k) == expected.imag());
    }
  }

  const auto g = random_graph({n, 0.3, 0.6}, rng);
  const auto y = renormalized_propagation(g, PhaseSpec{0.3 * pi});
  const Eigen::MatrixXd w = random_matrix(c, 5, rng);
  const Eigen::VectorXd b5r = random_matrix(5, 1, rng), b5i = random_matrix(5, 1, rng);
  const auto out = conv_layer_forward(y, x, w, b5r, b5i);
  Eigen::MatrixXcd xc(n, c);
  xc.real() = x.real;
  xc.imag() = x.imag;
  Eigen::MatrixXcd pre = y.to_dense() * xc * w.cast<Complex>();
  for (Index k = 0; k < 5; ++k) pre.col(k).array() += Complex(b5r(k), b5i(k));
  const Eigen::MatrixXcd ref = dense_complex_relu(pre);
  CHECK((out.real - ref.real()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((out.imag - ref.imag()).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(conv_layer_forward(y, x, random_matrix(c + 1, 5, rng), b5r, b5i), InputError);
}

TEST_CASE("encoder_forward") {
  Rng rng(3);
  const Index n = 12;
  const auto dims = small_dims(n);
  const auto params = random_params(dims, rng);
  const auto g = random_graph({n, 0.25, 0.7}, rng);
  const GraphView view{g, 0.2 * pi};
  const Eigen::MatrixXd z = encoder_forward(view, params);
  CHECK(z.rows() == n);
  CHECK(z.cols() == dims.embed_dim);
  CHECK((z - dense_encoder(dense_propagation(g, 0.2 * pi), params)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(encoder_forward(view, params) == z);

  auto zero = EncoderParams::zeros(dims);
  zero.fc_bias = Eigen::VectorXd::LinSpaced(dims.embed_dim, -1.0, 1.0);
  const Eigen::MatrixXd zb = encoder_forward(GraphView{graph_from_edges(n, {}), 0.0}, zero);
  for (Index i = 0; i < n; ++i) CHECK(zb.row(i) == zero.fc_bias.cwiseMax(0.0).transpose());

  ModelDims defaults;
  defaults.num_nodes = 20;
  const auto dp = init_params(defaults, rng);
  CHECK(encoder_forward(GraphView{random_graph({20, 0.2, 0.8}, rng), 0.1}, dp).cols() == 64);

  CHECK_THROWS_AS(encoder_forward(HermitianMatrix::identity(n + 1), params), InputError);
}

TEST_CASE("q = 0 keeps the imaginary channel at zero") {
  Rng rng(4);
  const Index n = 15;
  const auto dims = small_dims(n);
  const auto params = init_params(dims, rng);  // zero biases
  const auto g = random_graph({n, 0.2, 0.6}, rng);
  const auto y = renormalized_propagation(g, PhaseSpec{0.0});
  CHECK(y.imag_part().norm() == 0.0);
  ComplexFeatures x{params.input_embeddings, Eigen::MatrixXd::Zero(n, dims.input_dim)};
  for (std::size_t l = 0; l < params.conv_weights.size(); ++l) {
    x = conv_layer_forward(y, x, params.conv_weights[l], params.conv_bias_real[l], params.conv_bias_imag[l]);
    CHECK(x.imag.isZero(0.0));
  }
  // equals a purely real signed-operator network
  const Eigen::MatrixXd yr = Eigen::MatrixXd(y.real_part());
  Eigen::MatrixXd h = params.input_embeddings;
  for (const auto& w : params.conv_weights) h = (yr * h * w).cwiseMax(0.0);
  Eigen::MatrixXd unwound(n, 2 * dims.hidden_dim);
  unwound << h, Eigen::MatrixXd::Zero(n, dims.hidden_dim);
  const Eigen::MatrixXd z_ref = (unwound * params.fc_weight).cwiseMax(0.0);
  CHECK((encoder_forward(y, params) - z_ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("permutation equivariance") {
  Rng rng(5);
  const Index n = 14;
  const auto dims = small_dims(n);
  auto params = random_params(dims, rng);
  const auto g = random_graph({n, 0.25, 0.7}, rng);
  const auto perm = random_permutation(n, rng);

  std::vector<EdgeRecord> relabeled;
  for (const auto& e : g.edges()) relabeled.push_back({perm.indices()(e.src), perm.indices()(e.dst), e.sign});
  const auto gp = graph_from_edges(n, relabeled);
  auto permuted = params;
  permuted.input_embeddings = perm * params.input_embeddings;

  const Eigen::MatrixXd z = encoder_forward(GraphView{g, 0.3 * pi}, params);
  const Eigen::MatrixXd zp = encoder_forward(GraphView{gp, 0.3 * pi}, permuted);
  CHECK((zp - perm * z).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("project") {
  Rng rng(6);
  const auto dims = small_dims(8);
  auto p = EncoderParams::zeros(dims);
  const Eigen::MatrixXd z = random_matrix(8, dims.embed_dim, rng).cwiseAbs();
  p.proj_weight1.setIdentity();
  p.proj_weight2.setIdentity();
  CHECK(project(z, p) == z);

  auto zero = EncoderParams::zeros(dims);
  zero.proj_bias2 = Eigen::VectorXd::LinSpaced(dims.embed_dim, -2.0, 3.0);
  const Eigen::MatrixXd m = project(z, zero);
  CHECK(m.rows() == 8);
  CHECK(m.cols() == dims.embed_dim);
  for (Index i = 0; i < 8; ++i) CHECK(m.row(i) == zero.proj_bias2.transpose());
}

TEST_CASE("fuse_views") {
  Rng rng(7);
  ModelDims dims;
  dims.num_nodes = 10;
  auto zero = EncoderParams::zeros(dims);
  const Eigen::MatrixXd z0 = Eigen::MatrixXd::Zero(10, 64);
  CHECK(fuse_views(z0, z0, zero).isZero(0.0));

  const auto p = random_params(dims, rng);
  CHECK(p.fusion_weight.rows() == 128);
  const Eigen::MatrixXd z1 = random_matrix(10, 64, rng), z2 = random_matrix(10, 64, rng);
  const Eigen::MatrixXd r = fuse_views(z1, z2, p);
  CHECK(r.rows() == 10);
  CHECK(r.cols() == 64);
  Eigen::MatrixXd ref(10, 64);
  for (Index i = 0; i < 10; ++i) {
    for (Index k = 0; k < 64; ++k) {
      double acc = p.fusion_bias(k);
      for (Index j = 0; j < 64; ++j) acc += z1(i, j) * p.fusion_weight(j, k) + z2(i, j) * p.fusion_weight(64 + j, k);
      ref(i, k) = std::max(acc, 0.0);
    }
  }
  CHECK((r - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("predict_edge") {
  Rng rng(8);
  const auto dims = small_dims(6);
  const Eigen::MatrixXd r = random_matrix(6, dims.embed_dim, rng).cwiseAbs();
  const auto zero = EncoderParams::zeros(dims);
  for (Index u = 0; u < 6; ++u)
    for (Index v = 0; v < 6; ++v) CHECK(predict_edge(r, u, v, zero) == 0.5);

  const auto p = random_params(dims, rng);
  int asymmetric = 0;
  for (Index u = 0; u < 6; ++u) {
    for (Index v = u + 1; v < 6; ++v) {
      const double a = predict_edge(r, u, v, p), b = predict_edge(r, v, u, p);
      CHECK(a > 0.0);
      CHECK(a < 1.0);
      asymmetric += a != b;
    }
  }
  CHECK(asymmetric == 15);
  const double logit = r.row(1).dot(p.pred_weight.head(dims.embed_dim)) +
                       r.row(4).dot(p.pred_weight.tail(dims.embed_dim)) + p.pred_bias(0);
  CHECK(predict_edge(r, 1, 4, p) == doctest::Approx(1.0 / (1.0 + std::exp(-logit))).epsilon(1e-14));

  const std::vector<EdgeRecord> edges{{1, 4, 1}, {4, 1, -1}};
  const Eigen::VectorXd batch = predict_edges(r, edges, p);
  CHECK(batch(0) == predict_edge(r, 1, 4, p));
  CHECK(batch(1) == predict_edge(r, 4, 1, p));

  CHECK_THROWS_AS(predict_edge(r, 0, 6, p), InputError);
  CHECK_THROWS_AS(predict_edge(r, -1, 0, p), InputError);
}
