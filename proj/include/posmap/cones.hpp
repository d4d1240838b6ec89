// SPDX-License-Identifier: Apache-2.0
//
// Bipartite natural cones for (B(K_A) (x) B(K_B), omega_A (x) omega_B).
//
// A GNS vector of the composite system is a matrix on K_A (x) K_B written in the
// product frame x_p (x) y_i of the two density matrices, with K_A the slow index.
// The block matrix [a_ij] over B(K_A) uses the B index for the blocks:
//   a_ij(p, q) = A(p * dB + i, q * dB + j),
// so the block transpose [a_ji] is the partial transpose on the second factor and
// U~ = I (x) U_B acts on vectors as that same partial transpose.
//
// In finite dimension the natural cone is exactly the set
//   { Delta^{1/4} A Omega : A >= 0 } = { rho^{1/4} A rho^{1/4} : A >= 0 },
// which in the frame is the PSD cone, so membership is decided by one eigenvalue
// computation after reconstructing A.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "posmap/kpos.hpp"
#include "posmap/modular.hpp"

namespace posmap {

class BipartiteConeContext {
 public:
  BipartiteConeContext(GnsContext a, GnsContext b);

  const GnsContext& a() const { return a_; }
  const GnsContext& b() const { return b_; }
  /// Context of rho_A (x) rho_B in the product frame kron(X_A, X_B).
  const GnsContext& joint() const { return joint_; }
  int dim_a() const { return a_.dim(); }
  int dim_b() const { return b_.dim(); }
  int dim() const { return a_.dim() * b_.dim(); }

  /// x (x) y as an operator on composite GNS vectors. Both factors must share linearity.
  Superoperator tensor(const Superoperator& x, const Superoperator& y) const;

  Superoperator delta_n(double beta) const { return joint_.delta(beta); }
  ComplexMatrix omega_n() const { return joint_.omega(); }
  Superoperator utilde() const;
  Superoperator p() const;
  Superoperator q() const;
  /// (I + U_A (x) U_B) / 2.
  Superoperator ptot() const;
  /// Spectral projections of U_A and U_B.
  Superoperator pa() const;
  Superoperator qa() const;
  Superoperator pb() const;
  Superoperator qb() const;

  /// Delta_n^{1/4} A Omega_n.
  ComplexMatrix vector_of_blocks(const ComplexMatrix& blocks) const;
  /// Inverse of vector_of_blocks; exists for every vector because rho is invertible.
  ComplexMatrix blocks_of_vector(const ComplexMatrix& xi) const;

  /// J_m = J_A (x) J_B, Delta_n = Delta_A (x) Delta_B, Omega_n = Omega_A (x) Omega_B,
  /// U~ involution, and the P/Q projection algebra.
  DefectReport structure_defects() const;

 private:
  GnsContext a_;
  GnsContext b_;
  GnsContext joint_;
  /// Permutation from composite vec order to vec(H_A) (x) vec(H_B) order.
  ComplexMatrix reshuffle_;
};

BipartiteConeContext bipartite_context(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b);

/// [a_ij] -> [a_ji].
ComplexMatrix block_transpose(const ComplexMatrix& blocks, int dim_a, int dim_b);

struct ConeMembership {
  ComplexMatrix blocks;
  double blocks_hermiticity_defect = 0.0;
  double min_eig_p = 0.0;
  /// Smallest eigenvalue of [a_ji] computed from the blocks.
  double min_eig_ptau = 0.0;
  /// The same quantity computed from the reconstruction of U~ xi.
  double min_eig_ptau_via_u = 0.0;
  /// ||[a_ji] - blocks(U~ xi)||_F; the two routes must agree.
  double route_defect = 0.0;
  bool in_p = false;
  bool in_ptau = false;
  bool in_intersection = false;
  /// True when xi lies in P or P^tau, or when the optional search below found no
  /// separating PPT functional. Never a proof on its own.
  bool in_hull_evidence = false;
  std::optional<DecompVerdict> hull_search;
};

/// Pass hull_params to run the hull search when xi is in neither cone.
ConeMembership cone_member(const BipartiteConeContext& ctx, const ComplexMatrix& xi,
                           const DecompParams* hull_params = nullptr, std::uint64_t seed = 0);

/// Random A >= 0 with [a_ji] >= 0 and trace 1, by 20 rounds of alternating PSD
/// projections on A and its block transpose. Draws that fail to converge to 1e-9
/// are discarded; after 64 discards the last draw is mixed with the identity.
ComplexMatrix sample_intersection_blocks(int dim_a, int dim_b, Rng& rng);
/// A random element of P with unit norm: rank one with probability 1/2, else full rank.
ComplexMatrix sample_cone_vector(const BipartiteConeContext& ctx, Rng& rng);

DefectReport transposed_cone_consistency(const BipartiteConeContext& ctx, int samples, std::uint64_t seed);

/// Both inclusions of {Delta^{1/4}[a_ij] Omega : [a_ij] >= 0, [a_ji] >= 0} = P cap P^tau
/// on sampled inputs, and U~-invariance of the intersection.
DefectReport intersection_identity_check(const BipartiteConeContext& ctx, int samples, std::uint64_t seed);

struct PqSplit {
  ComplexMatrix p;
  ComplexMatrix q;
  double orthogonality_defect = 0.0;  ///< |(P xi, Q xi)|
  double norm_defect = 0.0;           ///< | ||P xi||^2 + ||Q xi||^2 - ||xi||^2 |
  /// Q xi against Delta^{1/4}[(a_ij - a_ji) / 2] Omega.
  double closed_form_defect = 0.0;
};
PqSplit pq_split(const BipartiteConeContext& ctx, const ComplexMatrix& xi);

/// The inequalities that characterize P cap U~P through pairings with eta in P.
struct ConeInequalities {
  /// Per condition: smallest slack (right side minus left side) over all eta.
  double abs_q_by_p = 0.0;        ///< (eta, P xi) - |(eta, Q xi)|
  double pairing_nonnegative = 0.0;  ///< (eta, xi)
  double twice_q_by_xi = 0.0;     ///< (eta, xi) - 2 (eta, Q xi)
  double pb_over_qb = 0.0;        ///< (eta, (I (x) P_B) xi) - (eta, (I (x) Q_B) xi)
  double ua_pairing = 0.0;        ///< (eta, (P_A - Q_A) (x) I xi)
  double norm_q_by_p = 0.0;       ///< ||P xi|| - ||Q xi||
  double total_bound = 0.0;       ///< (eta, P^tot xi) - 2 (eta, Q_A (x) Q_B xi)
  int violations = 0;             ///< slacks below -1e-9 ||xi||, counted per (condition, eta)
  int samples = 0;
  /// The eta with the most negative slack on the first condition.
  ComplexMatrix worst_eta;

  double min_slack() const;
};

/// Evaluates the inequalities without checking that xi is in the intersection.
ConeInequalities cone_inequalities(const BipartiteConeContext& ctx, const ComplexMatrix& xi, int eta_samples,
                                   std::uint64_t seed, ExecutionPolicy policy = ExecutionPolicy::serial);
/// Throws NotInIntersection unless xi passes cone_member's intersection test.
ConeInequalities prop64_check(const BipartiteConeContext& ctx, const ComplexMatrix& xi, int eta_samples,
                              std::uint64_t seed, ExecutionPolicy policy = ExecutionPolicy::serial);

struct FixedPointFlags {
  bool q_in_p = false;
  bool q_zero = false;
  bool fixed = false;
  bool agree() const { return q_in_p == q_zero && q_zero == fixed; }
};
/// Requires dim_b = 2 (DimensionMismatch) and xi in P (NotInP).
FixedPointFlags prop65_check(const BipartiteConeContext& ctx, const ComplexMatrix& xi);

struct QPolar {
  Superoperator vtilde;
  ComplexMatrix xi_b;
  /// h with a_12 - a_12* = 2 i h.
  ComplexMatrix h;
  bool degenerate = false;
  double reconstruction_defect = 0.0;  ///< ||Q xi - V~ xi_b||_F
  bool xi_b_in_p = false;
};
/// Requirements as prop65_check. The partial isometry is v = W V* from the SVD
/// b = W S V* of b = (a_12 - a_12*) / 2.
QPolar q_polar(const BipartiteConeContext& ctx, const ComplexMatrix& xi);

// --- Weak k-decomposability through cones -------------------------------------------

struct WeakDecParams {
  int samples = 500;
  ExecutionPolicy policy = ExecutionPolicy::parallel;
  /// State on the domain algebra; tracial when empty.
  std::optional<ComplexMatrix> rho_a;
  /// State on B(C^n) for block size n; tracial when empty.
  std::function<ComplexMatrix(int)> block_state;
};

struct WeakDecVerdict {
  VerdictKind kind = VerdictKind::evidence;
  int k = 0;
  int block_size = 0;  ///< n of the refuting sample
  /// [a_ij] with both orderings PSD, in cones layout (A slow).
  ComplexMatrix blocks;
  /// eta = Delta_n^{1/4}[a_ij] Omega_n in P_n cap P_n^tau.
  ComplexMatrix eta;
  /// xi = v v* in P_n with Re (eta, (T_phi (x) I)* xi) = value.
  ComplexMatrix xi;
  double value = 0.0;
  double min_value = 0.0;
  int samples_per_size = 0;
  std::uint64_t seed = 0;
};

/// For n = 1..k: samples eta in P_n cap P_n^tau from the same block sampler and
/// streams as sk_check (sample 0 is the identity), and minimizes the pairing with
/// (T_phi (x) I)* xi over xi in P_n exactly. A negative pairing shows that
/// (T_phi (x) I)* P_n is not inside the closed convex hull of P_n and P_n^tau.
WeakDecVerdict weak_kdec_cone_check(const LinearMapRep& phi, int k, const WeakDecParams& params,
                                    std::uint64_t seed);

/// Recomputes a refutation from its blocks. Both orderings must be PSD and the
/// pairing with eta must match the stored value.
bool recheck_weak_kdec_violation(const LinearMapRep& phi, const WeakDecParams& params, const WeakDecVerdict& v,
                                 double* recomputed = nullptr);

/// phi in computational coordinates rewritten in the frame of ctx: x -> X* phi(X x X*) X.
LinearMapRep map_in_frame(const GnsContext& ctx, const LinearMapRep& phi);

}  // namespace posmap
