// SPDX-License-Identifier: Apache-2.0
//
// k-positivity, k-copositivity and the weak k-decomposability conditions.
//
// Every search here is one-sided: a `violation` carries a witness that
// re-evaluates to a value below the negative tolerance and is a proof; an
// `evidence` verdict only records that the search budget found nothing.
#pragma once

#include <cstdint>
#include <optional>

#include "posmap/choi.hpp"

namespace posmap {

struct KVerdict {
  int k = 0;
  VerdictKind kind = VerdictKind::evidence;
  /// Isometry W (n x r, r <= k) whose range carries the compression; p = W W*.
  ComplexMatrix isometry;
  ComplexMatrix projection;
  /// Unit vector in C^m (x) C^n supported on C^m (x) range(p) with <z, h z> = value.
  ComplexVector z;
  double value = 0.0;
  SearchStats stats;
};

/// min lambda_min((I (x) W)* h (I (x) W)) over isometries W: C^k -> C^n, searched by
/// alternating over the two Schmidt factors of the minimizing vector. For k >= min(m, n)
/// the minimum is the exact smallest eigenvalue of h.
KVerdict k_block_min(const LinearMapRep& phi, int k, const SearchParams& params, std::uint64_t seed);
KVerdict is_k_positive(const LinearMapRep& phi, int k, const SearchParams& params, std::uint64_t seed);
/// k-positivity of phi o t, whose Choi blocks are h'_ij = h_ji.
KVerdict is_k_copositive(const LinearMapRep& phi, int k, const SearchParams& params, std::uint64_t seed);

/// Re-checks a k-positivity violation witness against the Choi matrix h (or its
/// first-factor partial transpose for copositivity) at a possibly larger k.
bool recheck_k_violation(const ComplexMatrix& h, int m, int n, int k, const KVerdict& witness,
                         double* recomputed = nullptr);

// --- S_k ------------------------------------------------------------------------

struct SkVerdict {
  int k = 0;
  VerdictKind kind = VerdictKind::evidence;
  /// Block matrix a on C^k (x) C^m with a >= 0 and (t (x) id) a >= 0.
  ComplexMatrix block;
  /// Unit vector with <v, (id_k (x) phi)(a) v> = value.
  ComplexVector vector;
  double value = 0.0;
  double min_value = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// [phi(a_ij)] for a k x k block matrix a over B(C^m), i.e. (id_k (x) phi)(a).
ComplexMatrix apply_blockwise(const LinearMapRep& phi, const ComplexMatrix& block, int k);

/// Draws a on C^k (x) C^m with a >= 0 and (t (x) id) a >= 0, trace 1. With
/// probability 1/2 a separable sum of at most four products, otherwise a random
/// PSD matrix accepted only when its block transpose is PSD.
ComplexMatrix sample_ppt_block(int k, int m, Rng& rng);

struct SampleParams {
  int samples = 500;
  ExecutionPolicy policy = ExecutionPolicy::parallel;
};

/// Sample 0 is the identity block matrix; the remaining ones use sample_ppt_block.
SkVerdict sk_check(const LinearMapRep& phi, int k, const SampleParams& params, std::uint64_t seed);

// --- Decomposability -------------------------------------------------------------

struct DecompParams {
  int restarts = 4;
  int max_iterations = 2000;
  double step = 1e-2;
  double min_step = 1e-10;
  ExecutionPolicy policy = ExecutionPolicy::parallel;
};

struct DecompVerdict {
  VerdictKind kind = VerdictKind::evidence;
  /// Density matrix w with w >= 0 and (t (x) id) w >= 0, and Tr(w h) = value.
  ComplexMatrix state;
  double value = 0.0;
  /// h >= 0 or (t (x) id) h >= 0: decomposable by inspection, no search was run.
  bool decomposable_by_inspection = false;
  SearchStats stats;
};

/// Minimizes Tr(w h) over PPT density matrices by projected gradient steps. A
/// negative value with a feasible w proves phi_h is not decomposable.
DecompVerdict decomposability_witness(const ComplexMatrix& h, int m, int n, const DecompParams& params,
                                      std::uint64_t seed);

/// Feasibility and value re-check for a decomposability witness.
bool recheck_decomp_violation(const ComplexMatrix& h, int m, int n, const ComplexMatrix& state, double value);

struct PkParams {
  int projections = 100;
  DecompParams witness{1, 2000, 1e-2, 1e-10, ExecutionPolicy::serial};
  ExecutionPolicy policy = ExecutionPolicy::parallel;
};

struct PkVerdict {
  int k = 0;
  VerdictKind kind = VerdictKind::evidence;
  /// Isometry onto the range of the refuting projection.
  ComplexMatrix isometry;
  DecompVerdict corner;
  double min_value = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Samples rank-min(k, n) projections p and runs decomposability_witness on the
/// Choi matrix of the compression a -> p phi(a) p.
PkVerdict pk_check(const LinearMapRep& phi, int k, const PkParams& params, std::uint64_t seed);

// --- k-decomposable constructions --------------------------------------------------

struct DecompCertificate {
  LinearMapRep phi;
  LinearMapRep positive_part;
  LinearMapRep copositive_part;
  int k = 0;
  double residual = 0.0;
  KVerdict positive_evidence;
  KVerdict copositive_evidence;
};

/// Certifies phi = phi1 + phi2 with phi1 k-positive and phi2 k-copositive (both at
/// evidence level). Throws ComponentNotKPositive / ComponentNotKCopositive when a
/// component is refuted.
DecompCertificate dk_compose(const LinearMapRep& positive_part, const LinearMapRep& copositive_part, int k,
                             const SearchParams& params, std::uint64_t seed);

}  // namespace posmap
