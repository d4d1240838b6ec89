// SPDX-License-Identifier: Apache-2.0
//
// GNS and Tomita-Takesaki data of (B(H), omega_rho) for a faithful density matrix rho.
//
// The GNS space is B(H) itself with the Hilbert-Schmidt inner product. Every vector,
// algebra element and map in this module is written in the *frame* of the context:
// the orthonormal eigenbasis x_i of rho, with matrix units E_ij = |x_i><x_j|. In the
// frame rho is diagonal, Omega = rho^{1/2}, and superoperators act on vec(xi) with
// the row-major convention of matkernel (basis index i * n + j is E_ij).
//
// When rho is already diagonal the frame is the computational basis; otherwise it is
// the eigenvector matrix returned by herm_eig. Use to_frame/from_frame to move
// between the two.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "posmap/choi.hpp"

namespace posmap {

/// A linear or antilinear operator on a finite-dimensional Hilbert space. An
/// antilinear operator is stored as v -> matrix * conj(v).
struct Superoperator {
  ComplexMatrix matrix;
  bool antilinear = false;

  static Superoperator linear(ComplexMatrix m) { return {std::move(m), false}; }
  static Superoperator conjugate_linear(ComplexMatrix m) { return {std::move(m), true}; }
  static Superoperator identity(int dim) { return {ComplexMatrix::Identity(dim, dim), false}; }

  int dim() const { return static_cast<int>(matrix.rows()); }
  ComplexVector apply(const ComplexVector& v) const;
  /// Applies the operator to a GNS vector given as a square matrix.
  ComplexMatrix apply_matrix(const ComplexMatrix& xi) const;
  /// For antilinear A = M K the adjoint is M^T K.
  Superoperator adjoint() const;
};

/// (a * b)(v) = a(b(v)).
Superoperator operator*(const Superoperator& a, const Superoperator& b);
Superoperator operator+(const Superoperator& a, const Superoperator& b);
Superoperator operator-(const Superoperator& a, const Superoperator& b);

/// max_k of |a(v) - b(v)| over v in {e_k, i e_k}. Compares operators of mixed
/// linearity correctly.
double superop_distance(const Superoperator& a, const Superoperator& b);

/// Left multiplication xi -> a xi and right multiplication xi -> xi b.
Superoperator left_multiplication(const ComplexMatrix& a);
Superoperator right_multiplication(const ComplexMatrix& b);

inline constexpr double kFaithfulMinEig = 1e-8;
inline constexpr double kMaxConditionNumber = 1e6;
inline constexpr double kStateTraceTol = 1e-12;

class GnsContext {
 public:
  int dim() const { return n_; }
  /// rho in the computational basis, as supplied.
  const ComplexMatrix& rho() const { return rho_; }
  /// Columns are the eigenvectors x_i of rho.
  const ComplexMatrix& frame() const { return frame_; }
  const RealVector& eigenvalues() const { return lambda_; }
  /// rho in frame coordinates (diagonal).
  ComplexMatrix rho_frame() const;
  /// rho^beta in frame coordinates.
  ComplexMatrix rho_power(double beta) const;

  ComplexMatrix omega() const { return rho_power(0.5); }
  ComplexVector omega_vector() const { return vec(omega()); }

  ComplexMatrix to_frame(const ComplexMatrix& a) const { return frame_.adjoint() * a * frame_; }
  ComplexMatrix from_frame(const ComplexMatrix& a) const { return frame_ * a * frame_.adjoint(); }

  /// Delta^beta: E_ij -> (lambda_i / lambda_j)^beta E_ij.
  Superoperator delta(double beta = 1.0) const;
  /// J_m: a Omega -> Omega a*, i.e. xi -> xi*.
  Superoperator jm() const;
  /// J: entrywise conjugation in the frame (conjugation J_c on both sides).
  Superoperator j() const;
  /// U: E_ij -> E_ji.
  Superoperator u() const;
  /// tau: a Omega -> a^t Omega, transposition taken in the frame.
  Superoperator tau() const;
  /// J_c: conjugation of H with respect to the eigenbasis, as an operator on C^n.
  Superoperator jc() const;

  /// xi -> xi as an element a Omega: a = xi Omega^{-1}.
  ComplexMatrix element_of(const ComplexMatrix& xi) const;
  ComplexMatrix vector_of(const ComplexMatrix& a) const { return a * omega(); }

  friend GnsContext gns_context(const ComplexMatrix& rho);
  friend GnsContext gns_context_in_frame(const ComplexMatrix& frame, const RealVector& eigenvalues);

 private:
  int n_ = 0;
  ComplexMatrix rho_;
  ComplexMatrix frame_;
  RealVector lambda_;
};

/// Validates rho (Hermitian, trace 1 within kStateTraceTol, min eigenvalue at least
/// kFaithfulMinEig, condition number at most kMaxConditionNumber) and builds its frame.
GnsContext gns_context(const ComplexMatrix& rho);
/// Builds a context from a known orthonormal eigenbasis without re-diagonalizing.
GnsContext gns_context_in_frame(const ComplexMatrix& frame, const RealVector& eigenvalues);

// --- Identity checks ---------------------------------------------------------

struct TransposeViaJ {
  ComplexMatrix lhs;  ///< a^t xi
  ComplexMatrix rhs;  ///< J a* J xi
  double defect = 0.0;
};
/// a and xi in frame coordinates; a^t is the frame transpose.
TransposeViaJ transpose_via_j(const GnsContext& ctx, const ComplexMatrix& a, const ComplexMatrix& xi);

/// Named defects, in a fixed order.
using DefectReport = std::vector<std::pair<std::string, double>>;
double max_defect(const DefectReport& report);

/// U^2 = I, U = U*, J = U J_m, pairwise commutation of J, J_m, U, J Delta = Delta J,
/// U Delta = Delta^{-1} U.
DefectReport check_unitary_relations(const GnsContext& ctx);

/// distance(tau, U Delta^{1/2}).
double check_polar(const GnsContext& ctx);

struct AlphaResult {
  ComplexMatrix image;  ///< U A U*
  /// max over units E_kl of ||[U A U*, L(E_kl)]||_F; zero when A is a left multiplication.
  double commutant_defect = 0.0;
};
AlphaResult alpha(const GnsContext& ctx, const ComplexMatrix& op);

struct VBetaMembership {
  bool member = false;
  /// a = rho^{-beta} xi rho^{beta - 1/2}, so that xi = Delta^beta a Omega.
  ComplexMatrix element;
  double min_eigenvalue = 0.0;
  double hermiticity_defect = 0.0;
};
/// Exact in finite dimension: the cone is closed. Throws BetaOutOfRange outside [0, 1/2].
VBetaMembership v_beta_member(const GnsContext& ctx, double beta, const ComplexMatrix& xi);
/// Delta^beta a Omega.
ComplexMatrix v_beta_vector(const GnsContext& ctx, double beta, const ComplexMatrix& a);

struct DualityReport {
  double min_real_pairing = 0.0;  ///< over unit-trace generators
  double max_imag_pairing = 0.0;
  int flip_failures = 0;          ///< U xi not in V_{1/2 - beta}
  double flip_min_eigenvalue = 0.0;
  int samples = 0;
};
DualityReport v_beta_duality_check(const GnsContext& ctx, double beta, int samples, std::uint64_t seed);

struct TPhi {
  LinearMapRep phi;
  Superoperator t;
  /// max_ij |omega(phi(E_ij)) - omega(E_ij)|; nonzero means omega is not invariant.
  double invariance_defect = 0.0;
  bool invariance_warning = false;
  double delta_commutation_defect = 0.0;
  /// max(0, ||T||_op - 1).
  double contraction_defect = 0.0;
  /// max_ij ||T(E_ij Omega) - phi(E_ij) Omega||_F.
  double unit_defect = 0.0;
};
/// phi acts on frame matrices of the context.
TPhi t_phi(const GnsContext& ctx, const LinearMapRep& phi);

/// max over sampled a of max(0, -lambda_min(phi(a* a) - phi(a)* phi(a))).
double schwarz_check(const LinearMapRep& phi, int samples, std::uint64_t seed);

struct DbAdjoint {
  LinearMapRep map;
  /// max over unit pairs of |omega(a* phi(b)) - omega(psi(a*) b)|.
  double defect = 0.0;
  /// Block-positivity search on psi; only run when psi preserves Hermiticity.
  std::optional<BlockPosVerdict> positivity;
};
/// Solves omega(a* phi(b)) = omega(psi(a*) b) for psi; rho psi(E_ij) has entries
/// Tr(rho E_ij phi(E_kl)) at (l, k). Throws InconsistentSystem if the identity
/// defect exceeds 1e-10 after solving.
DbAdjoint db_adjoint(const GnsContext& ctx, const LinearMapRep& phi, std::uint64_t seed);

/// Density matrix of the vector state (xi, . xi) for xi in the natural cone; in the
/// frame it is xi xi*. Throws NotInNaturalCone.
ComplexMatrix cone_state(const GnsContext& ctx, const ComplexMatrix& xi);

struct ModularSuiteParams {
  int samples = 100;
  double flip_beta = 0.1;
};
/// Every identity of the modular theory on one context, with sampled inputs where
/// the identity quantifies over vectors.
DefectReport modular_suite(const GnsContext& ctx, const ModularSuiteParams& params, std::uint64_t seed);

}  // namespace posmap
