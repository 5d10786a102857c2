#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sdgcl/graph.hpp"

namespace sdgcl {

using Complex = std::complex<double>;
using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SparseComplex = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Sparse complex matrix that is conjugate-symmetric by construction.
///
/// Built from entries (u, v, z) with u <= v; each off-diagonal entry is mirrored as
/// conj(z) at (v, u) and diagonal entries must be real. Real and imaginary parts are
/// kept as separate real sparse matrices for the real-arithmetic convolution path.
class HermitianMatrix {
 public:
  struct Entry {
    Index row;
    Index col;
    Complex value;
  };

  HermitianMatrix() = default;
  explicit HermitianMatrix(Index n) : HermitianMatrix(n, {}) {}
  HermitianMatrix(Index n, std::span<const Entry> upper);

  static HermitianMatrix identity(Index n);

  Index dim() const noexcept { return matrix_.rows(); }
  Index nonzeros() const noexcept { return matrix_.nonZeros(); }
  Complex coeff(Index row, Index col) const { return matrix_.coeff(row, col); }

  const SparseComplex& matrix() const noexcept { return matrix_; }
  const SparseReal& real_part() const noexcept { return real_; }
  const SparseReal& imag_part() const noexcept { return imag_; }
  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(matrix_); }

 private:
  SparseComplex matrix_;
  SparseReal real_;
  SparseReal imag_;
};

/// True when entry(u,v) == conj(entry(v,u)) holds bit-exactly for every stored entry.
bool is_exactly_hermitian(const SparseComplex& m);

struct PhaseSpec {
  double q = 0.0;
  double epsilon = 1e-12;

  void validate() const;
};

/// A_s = (A + A^T) / 2 over unsigned connectivity; entries in {0, 1/2, 1}.
SparseReal symmetrize_adjacency(const SignedDiGraph& g);

/// Row sums of A_s.
Eigen::VectorXd degree_matrix(const SparseReal& sym_adjacency);

/// Phase matrix entry P^q(u,v); zero for unconnected pairs.
Complex phase_entry(Index u, Index v, const SignedDiGraph& g, const PhaseSpec& spec);

/// H^q = A_s ⊙ P^q.
HermitianMatrix hermitian_adjacency(const SignedDiGraph& g, const PhaseSpec& spec);

/// L_U = D_s - H^q.
HermitianMatrix laplacian_unnormalized(const SignedDiGraph& g, const PhaseSpec& spec);

/// L_N = I - (D_s^{-1/2} A_s D_s^{-1/2}) ⊙ P^q, with D_s^{-1/2} := 0 on isolated nodes.
HermitianMatrix laplacian_normalized(const SignedDiGraph& g, const PhaseSpec& spec);

/// Y = (D~^{-1/2} (A_s + I) D~^{-1/2}) ⊙ P^q with unit phase on the added self-loops.
HermitianMatrix renormalized_propagation(const SignedDiGraph& g, const PhaseSpec& spec);

/// M X for a complex feature matrix; throws InputError on a dimension mismatch.
Eigen::MatrixXcd spmv(const HermitianMatrix& m, const Eigen::MatrixXcd& x);

struct Spectrum {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // columns, unitary
};

/// Dense Hermitian eigensolve, for tests and diagnostics only.
Spectrum dense_eigendecomposition(const HermitianMatrix& m, Index max_dim = 2000);

/// sum_k coeffs[k] T_k(L~) x with L~ = L_N - I (lambda_max taken as 2).
Eigen::VectorXcd chebyshev_apply(const HermitianMatrix& normalized_laplacian,
                                 const Eigen::VectorXcd& x, std::span<const double> coeffs);

/// "row col real imag" per stored entry, full precision.
void write_operator(std::ostream& out, const HermitianMatrix& m);

}  // namespace sdgcl
