#pragma once

// Shared generators and dense reference implementations for tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "sdgcl/graph.hpp"
#include "sdgcl/spectral.hpp"

namespace sdgcl::testing {

struct RandomGraphSpec {
  Index num_nodes = 20;
  double density = 0.15;        // probability of each ordered pair
  double positive_ratio = 0.8;
};

inline SignedDiGraph random_graph(const RandomGraphSpec& spec, Rng& rng) {
  std::bernoulli_distribution edge(spec.density), positive(spec.positive_ratio);
  std::vector<EdgeRecord> edges;
  for (Index u = 0; u < spec.num_nodes; ++u) {
    for (Index v = 0; v < spec.num_nodes; ++v) {
      if (u != v && edge(rng)) edges.push_back({u, v, positive(rng) ? 1 : -1});
    }
  }
  return graph_from_edges(spec.num_nodes, edges);
}

// Dense formulas written directly from the definitions, independent of the sparse builders.
inline Eigen::MatrixXd dense_connectivity(const SignedDiGraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) a(e.src, e.dst) = 1.0;
  return a;
}

inline Eigen::MatrixXi dense_signs(const SignedDiGraph& g) {
  Eigen::MatrixXi s = Eigen::MatrixXi::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) s(e.src, e.dst) = e.sign;
  return s;
}

inline Eigen::MatrixXcd dense_phase(const SignedDiGraph& g, double q, double eps = 1e-12) {
  const Index n = g.num_nodes();
  const Eigen::MatrixXi s = dense_signs(g);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (s(u, v) == 0 && s(v, u) == 0) continue;
      std::complex<double> num(0.0, 0.0);
      // cos(pi + q) = -cos q, sin(pi + q) = -sin q; cos(pi - q) = -cos q, sin(pi - q) = sin q
      if (s(u, v) > 0) num += std::complex<double>(std::cos(q), std::sin(q));
      if (s(u, v) < 0) num += std::complex<double>(-std::cos(q), -std::sin(q));
      if (s(v, u) > 0) num += std::complex<double>(std::cos(q), -std::sin(q));
      if (s(v, u) < 0) num += std::complex<double>(-std::cos(q), std::sin(q));
      p(u, v) = num / (std::abs(num) + eps);
    }
  }
  return p;
}

inline Eigen::MatrixXd dense_sym(const SignedDiGraph& g) {
  const Eigen::MatrixXd a = dense_connectivity(g);
  return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXcd dense_normalized_adjacency(const SignedDiGraph& g, double q) {
  const Eigen::MatrixXd as = dense_sym(g);
  const Eigen::VectorXd d = as.rowwise().sum();
  Eigen::VectorXd dinv(d.size());
  for (Index i = 0; i < d.size(); ++i) dinv(i) = d(i) > 0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  const Eigen::MatrixXd scaled = dinv.asDiagonal() * as * dinv.asDiagonal();
  return scaled.cast<std::complex<double>>().cwiseProduct(dense_phase(g, q));
}

inline Eigen::MatrixXcd dense_propagation(const SignedDiGraph& g, double q) {
  const Index n = g.num_nodes();
  const Eigen::MatrixXd at = dense_sym(g) + Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd d = at.rowwise().sum();
  const Eigen::VectorXd dinv = d.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd p = dense_phase(g, q);
  p.diagonal().setOnes();
  const Eigen::MatrixXd scaled = dinv.asDiagonal() * at * dinv.asDiagonal();
  return scaled.cast<std::complex<double>>().cwiseProduct(p);
}

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace sdgcl::testing

#include <filesystem>
#include <fstream>
#include <string>

namespace sdgcl::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sdgcl_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace sdgcl::testing
