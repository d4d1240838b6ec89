// SPDX-License-Identifier: Apache-2.0
#include "posmap/matkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

namespace posmap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::SingularForNegativePower: return "SingularForNegativePower";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::ComponentNotKPositive: return "ComponentNotKPositive";
    case ErrorCode::ComponentNotKCopositive: return "ComponentNotKCopositive";
    case ErrorCode::NotFaithful: return "NotFaithful";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::InconsistentSystem: return "InconsistentSystem";
    case ErrorCode::NotInNaturalCone: return "NotInNaturalCone";
    case ErrorCode::NotInIntersection: return "NotInIntersection";
    case ErrorCode::NotInP: return "NotInP";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::StaleWitness: return "StaleWitness";
  }
  return "Unknown";
}

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has NaN or Inf entries");
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::NotSquare, std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()));
}

double frobenius(const ComplexMatrix& a) { return a.norm(); }

double hermiticity_defect(const ComplexMatrix& a) { return (a - a.adjoint()).norm(); }

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

double psd_tolerance(const ComplexMatrix& a) { return kPsdRelTol * std::max(1.0, a.norm()); }

namespace {

void check_hermitian(const ComplexMatrix& a) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  const double defect = hermiticity_defect(a);
  if (defect > kHermitianRelTol * a.norm())
    throw Error(ErrorCode::NotHermitian, "||A - A*||_F = " + std::to_string(defect));
}

void fix_phases(ComplexMatrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    double biggest = 0.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) biggest = std::max(biggest, std::abs(v(r, c)));
    if (biggest == 0.0) continue;
    Eigen::Index pick = 0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) >= biggest * (1.0 - 1e-10)) {
        pick = r;
        break;
      }
    }
    const cplx phase = std::conj(v(pick, c)) / std::abs(v(pick, c));
    v.col(c) *= phase;
    v(pick, c) = std::abs(v(pick, c));
  }
}

}  // namespace

HermEig herm_eig(const ComplexMatrix& a) {
  check_hermitian(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NotHermitian, "eigensolver failed to converge");
  HermEig out{solver.eigenvalues(), solver.eigenvectors()};
  fix_phases(out.eigenvectors);
  return out;
}

double psd_min_eig(const ComplexMatrix& a) {
  check_hermitian(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

bool is_psd(const ComplexMatrix& a) { return psd_min_eig(a) >= -psd_tolerance(a); }

MinEigenPair min_eigenpair(const ComplexMatrix& a) {
  HermEig e = herm_eig(a);
  return {e.eigenvalues(0), e.eigenvectors.col(0)};
}

ComplexMatrix frac_power(const ComplexMatrix& a, double beta) {
  const HermEig e = herm_eig(a);
  const double tol = psd_tolerance(a);
  const double lo = e.eigenvalues(0);
  if (lo < -tol) throw Error(ErrorCode::NotPSD, "min eigenvalue " + std::to_string(lo));
  const double spectral = e.eigenvalues.cwiseAbs().maxCoeff();
  if (beta < 0.0 && lo <= 1e-12 * spectral)
    throw Error(ErrorCode::SingularForNegativePower, "min eigenvalue " + std::to_string(lo));
  RealVector powered(e.eigenvalues.size());
  for (Eigen::Index i = 0; i < powered.size(); ++i) {
    const double lam = std::max(e.eigenvalues(i), 0.0);
    powered(i) = (beta == 0.0) ? 1.0 : (lam == 0.0 ? 0.0 : std::pow(lam, beta));
  }
  return e.eigenvectors * powered.asDiagonal() * e.eigenvectors.adjoint();
}

ComplexMatrix psd_projection(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  const RealVector lam = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& h, int dim_a, int dim_b, TransposeSide side) {
  if (dim_a <= 0 || dim_b <= 0 || h.rows() != dim_a * dim_b || h.cols() != dim_a * dim_b)
    throw Error(ErrorCode::DimensionMismatch, "partial_transpose expects a square matrix of size " +
                                                  std::to_string(dim_a * dim_b));
  ComplexMatrix out(h.rows(), h.cols());
  for (int i = 0; i < dim_a; ++i)
    for (int k = 0; k < dim_b; ++k)
      for (int j = 0; j < dim_a; ++j)
        for (int l = 0; l < dim_b; ++l) {
          const int row = i * dim_b + k;
          const int col = j * dim_b + l;
          out(row, col) = side == TransposeSide::first ? h(j * dim_b + k, i * dim_b + l)
                                                       : h(i * dim_b + l, j * dim_b + k);
        }
  return out;
}

cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "hs_inner shape mismatch");
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += std::conj(a(i, j)) * b(i, j);
  return acc;
}

ComplexVector vec(const ComplexMatrix& x) {
  ComplexVector v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

ComplexMatrix unvec(const ComplexVector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw Error(ErrorCode::DimensionMismatch, "unvec size mismatch");
  ComplexMatrix x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = v(i * cols + j);
  return x;
}

ComplexMatrix matrix_unit(int n, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

ComplexMatrix swap_operator(int d) {
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

ComplexMatrix orthonormal_columns(const ComplexMatrix& a) {
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(a.rows(), a.cols());
  return q;
}

ComplexMatrix random_complex_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  return g;
}

ComplexMatrix haar_isometry(int dim, int rank, Rng& rng) {
  if (rank < 1 || rank > dim)
    throw Error(ErrorCode::RankOutOfRange,
                "rank " + std::to_string(rank) + " outside [1, " + std::to_string(dim) + "]");
  return orthonormal_columns(random_complex_matrix(dim, rank, rng));
}

ComplexMatrix haar_projection(int dim, int rank, Rng rng) {
  const ComplexMatrix w = haar_isometry(dim, rank, rng);
  return w * w.adjoint();
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
  return hermitian_part(random_complex_matrix(dim, dim, rng));
}

ComplexMatrix random_psd(int dim, int columns, Rng& rng) {
  const ComplexMatrix g = random_complex_matrix(dim, columns, rng);
  ComplexMatrix p = g * g.adjoint();
  p = hermitian_part(p);
  return p / p.trace().real();
}

ComplexVector random_unit_vector(int dim, Rng& rng) {
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

ComplexMatrix random_faithful_state(int dim, Rng& rng) {
  // Mixing with the maximally mixed state keeps kappa(rho) well inside the 1e6 guard.
  const ComplexMatrix w = random_psd(dim, dim, rng);
  ComplexMatrix rho = 0.9 * w + 0.1 * ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  rho = hermitian_part(rho);
  return rho / rho.trace().real();
}

}  // namespace posmap
