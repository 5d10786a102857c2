#include "sdgcl/spectral.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

using Triplet = Eigen::Triplet<double>;

// Each unordered connected pair once, as (min, max), in first-seen order.
std::vector<std::pair<Index, Index>> connected_pairs(const SignedDiGraph& g) {
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(g.num_edges());
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    const Index a = std::min(e.src, e.dst);
    const Index b = std::max(e.src, e.dst);
    if (seen.insert((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b)).second) {
      pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

double connectivity(const SignedDiGraph& g, Index u, Index v) {
  return g.has_edge(u, v) ? 1.0 : 0.0;
}

// A_s(u,v) for a pair known to be connected in at least one direction.
double symmetric_weight(const SignedDiGraph& g, Index u, Index v) {
  return 0.5 * (connectivity(g, u, v) + connectivity(g, v, u));
}

}  // namespace

HermitianMatrix::HermitianMatrix(Index n, std::span<const Entry> upper) {
  if (n < 0) throw InputError("negative matrix dimension");
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(2 * upper.size());
  for (const auto& e : upper) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n || e.row > e.col) {
      throw InputError("Hermitian entries must be given on or above the diagonal");
    }
    if (e.row == e.col) {
      if (e.value.imag() != 0.0) throw InputError("Hermitian diagonal must be real");
      triplets.emplace_back(e.row, e.col, e.value);
    } else {
      triplets.emplace_back(e.row, e.col, e.value);
      triplets.emplace_back(e.col, e.row, std::conj(e.value));
    }
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  real_ = matrix_.real();
  imag_ = matrix_.imag();
}

HermitianMatrix HermitianMatrix::identity(Index n) {
  std::vector<Entry> diag;
  diag.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) diag.push_back({i, i, Complex(1.0, 0.0)});
  return HermitianMatrix(n, diag);
}

bool is_exactly_hermitian(const SparseComplex& m) {
  if (m.rows() != m.cols()) return false;
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseComplex::InnerIterator it(m, r); it; ++it) {
      if (it.value() != std::conj(m.coeff(it.col(), it.row()))) return false;
    }
  }
  return true;
}

void PhaseSpec::validate() const {
  if (!(q >= 0.0 && q <= 0.5 * std::numbers::pi)) throw InputError("q must lie in [0, pi/2]");
  if (!(epsilon > 0.0)) throw InputError("phase epsilon must be positive");
}

SparseReal symmetrize_adjacency(const SignedDiGraph& g) {
  std::vector<Triplet> triplets;
  triplets.reserve(2 * g.num_edges());
  for (const auto& e : g.edges()) {
    triplets.emplace_back(e.src, e.dst, 0.5);
    triplets.emplace_back(e.dst, e.src, 0.5);
  }
  SparseReal a(g.num_nodes(), g.num_nodes());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::VectorXd degree_matrix(const SparseReal& sym_adjacency) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(sym_adjacency.rows());
  for (Index r = 0; r < sym_adjacency.outerSize(); ++r) {
    for (SparseReal::InnerIterator it(sym_adjacency, r); it; ++it) d(it.row()) += it.value();
  }
  return d;
}

Complex phase_entry(Index u, Index v, const SignedDiGraph& g, const PhaseSpec& spec) {
  const auto forward = g.sign_of(u, v);
  const auto backward = g.sign_of(v, u);
  if (!forward && !backward) return {0.0, 0.0};

  // exp(i(pi + q)) = -exp(iq) and exp(i(pi - q)) = -exp(-iq); writing the pi offset as a
  // sign keeps cancelling pairs exactly zero at q = 0.
  const Complex rot = std::polar(1.0, spec.q);
  Complex numerator{0.0, 0.0};
  if (forward) numerator += static_cast<double>(*forward) * rot;
  if (backward) numerator += static_cast<double>(*backward) * std::conj(rot);
  return numerator / (std::abs(numerator) + spec.epsilon);
}

HermitianMatrix hermitian_adjacency(const SignedDiGraph& g, const PhaseSpec& spec) {
  spec.validate();
  std::vector<HermitianMatrix::Entry> upper;
  for (const auto& [u, v] : connected_pairs(g)) {
    upper.push_back({u, v, symmetric_weight(g, u, v) * phase_entry(u, v, g, spec)});
  }
  return HermitianMatrix(g.num_nodes(), upper);
}

HermitianMatrix laplacian_unnormalized(const SignedDiGraph& g, const PhaseSpec& spec) {
  spec.validate();
  const Eigen::VectorXd degree = degree_matrix(symmetrize_adjacency(g));
  std::vector<HermitianMatrix::Entry> upper;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    if (degree(i) != 0.0) upper.push_back({i, i, Complex(degree(i), 0.0)});
  }
  for (const auto& [u, v] : connected_pairs(g)) {
    upper.push_back({u, v, -symmetric_weight(g, u, v) * phase_entry(u, v, g, spec)});
  }
  return HermitianMatrix(g.num_nodes(), upper);
}

HermitianMatrix laplacian_normalized(const SignedDiGraph& g, const PhaseSpec& spec) {
  spec.validate();
  const Eigen::VectorXd degree = degree_matrix(symmetrize_adjacency(g));
  const Eigen::VectorXd inv_sqrt =
      degree.unaryExpr([](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
  std::vector<HermitianMatrix::Entry> upper;
  for (Index i = 0; i < g.num_nodes(); ++i) upper.push_back({i, i, Complex(1.0, 0.0)});
  for (const auto& [u, v] : connected_pairs(g)) {
    const double w = inv_sqrt(u) * symmetric_weight(g, u, v) * inv_sqrt(v);
    upper.push_back({u, v, -w * phase_entry(u, v, g, spec)});
  }
  return HermitianMatrix(g.num_nodes(), upper);
}

HermitianMatrix renormalized_propagation(const SignedDiGraph& g, const PhaseSpec& spec) {
  spec.validate();
  const Eigen::VectorXd degree = degree_matrix(symmetrize_adjacency(g)).array() + 1.0;
  const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  std::vector<HermitianMatrix::Entry> upper;
  for (Index i = 0; i < g.num_nodes(); ++i) upper.push_back({i, i, Complex(1.0 / degree(i), 0.0)});
  for (const auto& [u, v] : connected_pairs(g)) {
    const double w = inv_sqrt(u) * symmetric_weight(g, u, v) * inv_sqrt(v);
    upper.push_back({u, v, w * phase_entry(u, v, g, spec)});
  }
  return HermitianMatrix(g.num_nodes(), upper);
}

Eigen::MatrixXcd spmv(const HermitianMatrix& m, const Eigen::MatrixXcd& x) {
  if (x.rows() != m.dim()) {
    throw InputError("spmv dimension mismatch: operator " + std::to_string(m.dim()) +
                     ", features " + std::to_string(x.rows()));
  }
  return m.matrix() * x;
}

Spectrum dense_eigendecomposition(const HermitianMatrix& m, Index max_dim) {
  if (m.dim() > max_dim) {
    throw InputError("dense eigendecomposition capped at " + std::to_string(max_dim) +
                     " nodes, got " + std::to_string(m.dim()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.to_dense());
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolve did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXcd chebyshev_apply(const HermitianMatrix& normalized_laplacian,
                                 const Eigen::VectorXcd& x, std::span<const double> coeffs) {
  if (coeffs.empty()) throw InputError("Chebyshev expansion needs at least one coefficient");
  if (x.size() != normalized_laplacian.dim()) throw InputError("Chebyshev dimension mismatch");
  const auto& l = normalized_laplacian.matrix();
  const auto scaled = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return l * v - v; };

  Eigen::VectorXcd prev = x;  // T_0 x
  Eigen::VectorXcd result = coeffs[0] * prev;
  if (coeffs.size() == 1) return result;
  Eigen::VectorXcd curr = scaled(x);  // T_1 x
  result += coeffs[1] * curr;
  for (std::size_t k = 2; k < coeffs.size(); ++k) {
    Eigen::VectorXcd next = 2.0 * scaled(curr) - prev;
    prev = std::move(curr);
    curr = std::move(next);
    result += coeffs[k] * curr;
  }
  return result;
}

void write_operator(std::ostream& out, const HermitianMatrix& m) {
  const auto precision = out.precision(17);
  for (Index r = 0; r < m.matrix().outerSize(); ++r) {
    for (SparseComplex::InnerIterator it(m.matrix(), r); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag()
          << '\n';
    }
  }
  out.precision(precision);
}

}  // namespace sdgcl
