// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra shared by every module.
//
// Conventions used throughout the project:
//  * kron(A, B) has the first factor slowest: (A (x) B)[(i,k),(j,l)] = A[i,j] B[k,l]
//    with row index i * rows(B) + k.
//  * vec(X) is row-major: vec(X)[i * cols + j] = X(i, j). Superoperators are
//    matrices acting on vec(X), so the basis vector with index i * n + j is the
//    matrix unit E_ij.
//  * A Hermitian matrix is PSD when its smallest eigenvalue is at least
//    -kPsdRelTol * max(1, ||A||_F).
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

#include "posmap/error.hpp"
#include "posmap/rng.hpp"

namespace posmap {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPsdRelTol = 1e-9;
inline constexpr double kHermitianRelTol = 1e-8;

/// Spectral data of a Hermitian matrix. Eigenvalues ascend; each eigenvector's
/// largest-magnitude component (first one on ties) is real and positive.
struct HermEig {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

enum class TransposeSide { first, second };

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& a, const char* what);
void require_square(const ComplexMatrix& a, const char* what);

double frobenius(const ComplexMatrix& a);
/// ||A - A*||_F.
double hermiticity_defect(const ComplexMatrix& a);
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Scale-aware PSD threshold for a Hermitian matrix: kPsdRelTol * max(1, ||A||_F).
double psd_tolerance(const ComplexMatrix& a);

HermEig herm_eig(const ComplexMatrix& a);
double psd_min_eig(const ComplexMatrix& a);
bool is_psd(const ComplexMatrix& a);

ComplexMatrix frac_power(const ComplexMatrix& a, double beta);
/// Nearest PSD matrix in Frobenius norm: negative eigenvalues of the Hermitian part set to 0.
ComplexMatrix psd_projection(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_transpose(const ComplexMatrix& h, int dim_a, int dim_b, TransposeSide side);

/// Tr(A* B).
cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, int rows, int cols);

/// Matrix unit E_ij of size n x n.
ComplexMatrix matrix_unit(int n, int i, int j);
/// Swap operator on C^d (x) C^d.
ComplexMatrix swap_operator(int d);

/// Random isometry W (dim x rank, W*W = I) with Haar-distributed range.
ComplexMatrix haar_isometry(int dim, int rank, Rng& rng);
/// Haar-random orthogonal projection of the given rank. Deterministic per rng state.
ComplexMatrix haar_projection(int dim, int rank, Rng rng);

// Sampling helpers used by the search and verification routines.
ComplexMatrix random_complex_matrix(int rows, int cols, Rng& rng);
ComplexMatrix random_hermitian(int dim, Rng& rng);
/// Wishart-type PSD matrix G G* with G of size dim x columns, trace normalized to 1.
ComplexMatrix random_psd(int dim, int columns, Rng& rng);
ComplexVector random_unit_vector(int dim, Rng& rng);
/// Density matrix with min eigenvalue bounded away from zero (faithful state).
ComplexMatrix random_faithful_state(int dim, Rng& rng);

/// Smallest eigenvalue together with a unit eigenvector.
struct MinEigenPair {
  double value;
  ComplexVector vector;
};
MinEigenPair min_eigenpair(const ComplexMatrix& a);

/// Orthonormal basis for the column span of a (thin Householder QR, no pivoting).
ComplexMatrix orthonormal_columns(const ComplexMatrix& a);

}  // namespace posmap
