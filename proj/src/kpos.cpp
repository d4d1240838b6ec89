// SPDX-License-Identifier: Apache-2.0
#include "posmap/kpos.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace posmap {
namespace {

void require_hermiticity_preserving(const LinearMapRep& phi) {
  if (!phi.is_hermiticity_preserving())
    throw Error(ErrorCode::NotHermitian, "map is not Hermiticity-preserving");
}

void require_k(int k, int n) {
  if (k < 1 || k > n)
    throw Error(ErrorCode::KOutOfRange, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r = Rng(seed).split(stream);
  return r.next_u64();
}

struct CompressedRun {
  ComplexMatrix isometry;
  ComplexVector z;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// Minimum over C^m (x) range(W): returns the lifted unit vector and its value.
CompressedRun evaluate_compression(const ComplexMatrix& h, int m, const ComplexMatrix& w) {
  const ComplexMatrix lift = kron(ComplexMatrix::Identity(m, m), w);
  const MinEigenPair pair = min_eigenpair(hermitian_part(lift.adjoint() * h * lift));
  CompressedRun run;
  run.isometry = w;
  run.z = lift * pair.vector;
  run.value = pair.value;
  return run;
}

// Alternating minimization over Schmidt-rank-k unit vectors z = sum_r u_r (x) v_r.
CompressedRun schmidt_seesaw(const ComplexMatrix& h, int m, int n, int k, const SearchParams& params, Rng rng) {
  ComplexMatrix q = haar_isometry(n, k, rng);
  CompressedRun best;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < params.max_iterations; ++it) {
    // Second factor fixed to range(q): exact compressed minimum.
    CompressedRun run = evaluate_compression(h, m, q);
    run.iterations = it + 1;
    const bool improved = run.value < best.value;
    if (improved) best = run;
    if (previous - run.value < params.improvement_tol) break;
    previous = run.value;

    // First-factor Schmidt vectors of the minimizer, then re-optimize the second factor freely.
    ComplexMatrix coeff(m, k);
    const ComplexVector reduced = kron(ComplexMatrix::Identity(m, m), q).adjoint() * run.z;
    for (int i = 0; i < m; ++i)
      for (int r = 0; r < k; ++r) coeff(i, r) = reduced(i * k + r);
    const ComplexMatrix u = orthonormal_columns(coeff);
    ComplexMatrix embed = ComplexMatrix::Zero(m * n, k * n);
    for (int r = 0; r < k; ++r)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < m; ++i) embed(i * n + l, r * n + l) = u(i, r);
    const MinEigenPair pair = min_eigenpair(hermitian_part(embed.adjoint() * h * embed));
    ComplexMatrix v(n, k);
    for (int r = 0; r < k; ++r)
      for (int l = 0; l < n; ++l) v(l, r) = pair.vector(r * n + l);
    q = orthonormal_columns(v);
  }
  best.iterations = std::max(best.iterations, 1);
  return best;
}

// Exact route for k >= min(m, n): the Schmidt rank bound is vacuous.
CompressedRun exact_minimum(const ComplexMatrix& h, int m, int n, int k) {
  const MinEigenPair pair = min_eigenpair(h);
  CompressedRun run;
  run.z = pair.vector;
  run.value = pair.value;
  run.iterations = 1;
  if (k >= n) {
    run.isometry = ComplexMatrix::Identity(n, n);
    return run;
  }
  // Second-factor support of z: z = sum_r s_r u_r (x) conj(v_r) for Z = U S V*.
  ComplexMatrix zmat(m, n);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < n; ++l) zmat(i, l) = pair.vector(i * n + l);
  Eigen::JacobiSVD<ComplexMatrix> svd(zmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index r = 0; r < s.size(); ++r)
    if (s(r) > 1e-12 * s(0)) ++rank;
  rank = std::max(rank, 1);
  run.isometry = svd.matrixV().leftCols(rank).conjugate();
  return run;
}

}  // namespace

KVerdict k_block_min(const LinearMapRep& phi, int k, const SearchParams& params, std::uint64_t seed) {
  require_hermiticity_preserving(phi);
  const int m = phi.m();
  const int n = phi.n();
  require_k(k, n);
  const ComplexMatrix h = choi_of_map(phi);

  KVerdict out;
  out.k = k;
  out.stats.seed = seed;
  CompressedRun best;
  if (k >= std::min(m, n)) {
    best = exact_minimum(h, m, n, k);
    out.stats.restarts = 0;
    out.stats.total_iterations = 1;
    out.stats.best_restart = -1;
  } else {
    const Rng base(seed);
    std::vector<CompressedRun> runs(static_cast<std::size_t>(params.restarts));
    for_each_index(params.policy, params.restarts, [&](int r) {
      runs[static_cast<std::size_t>(r)] =
          schmidt_seesaw(h, m, n, k, params, base.split(static_cast<std::uint64_t>(r)));
    });
    out.stats.restarts = params.restarts;
    for (int r = 0; r < params.restarts; ++r) {
      const CompressedRun& run = runs[static_cast<std::size_t>(r)];
      out.stats.total_iterations += run.iterations;
      if (run.value < best.value) {
        best = run;
        out.stats.best_restart = r;
      }
    }
  }
  out.isometry = best.isometry;
  out.projection = best.isometry * best.isometry.adjoint();
  out.z = best.z / best.z.norm();
  out.value = (out.z.adjoint() * h * out.z)(0, 0).real();
  out.stats.min_value = out.value;
  out.kind = out.value < -psd_tolerance(h) ? VerdictKind::violation : VerdictKind::evidence;
  return out;
}

KVerdict is_k_positive(const LinearMapRep& phi, int k, const SearchParams& params, std::uint64_t seed) {
  return k_block_min(phi, k, params, seed);
}

KVerdict is_k_copositive(const LinearMapRep& phi, int k, const SearchParams& params, std::uint64_t seed) {
  return k_block_min(phi.compose_transpose_input(), k, params, seed);
}

bool recheck_k_violation(const ComplexMatrix& h, int m, int n, int k, const KVerdict& witness,
                         double* recomputed) {
  if (h.rows() != m * n || witness.z.size() != m * n || witness.isometry.rows() != n) return false;
  const ComplexMatrix& w = witness.isometry;
  if (w.cols() > k) return false;
  if ((w.adjoint() * w - ComplexMatrix::Identity(w.cols(), w.cols())).norm() > 1e-10) return false;
  const ComplexMatrix p = w * w.adjoint();
  if ((p - witness.projection).norm() > 1e-9) return false;
  if (std::abs(witness.z.norm() - 1.0) > 1e-10) return false;
  const ComplexVector projected = kron(ComplexMatrix::Identity(m, m), p) * witness.z;
  if ((projected - witness.z).norm() > 1e-8) return false;
  const double value = (witness.z.adjoint() * h * witness.z)(0, 0).real();
  if (recomputed) *recomputed = value;
  if (std::abs(value - witness.value) > 1e-10 * std::max(1.0, h.norm())) return false;
  return value < -psd_tolerance(h);
}

// --- S_k ------------------------------------------------------------------------

ComplexMatrix apply_blockwise(const LinearMapRep& phi, const ComplexMatrix& block, int k) {
  const int m = phi.m();
  const int n = phi.n();
  if (block.rows() != k * m || block.cols() != k * m)
    throw Error(ErrorCode::DimensionMismatch, "block matrix must be " + std::to_string(k * m) + " square");
  ComplexMatrix out(k * n, k * n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.block(i * n, j * n, n, n) = phi.apply(block.block(i * m, j * m, m, m));
  return out;
}

ComplexMatrix sample_ppt_block(int k, int m, Rng& rng) {
  const int d = k * m;
  ComplexMatrix a;
  if (rng.uniform() < 0.5) {
    const int terms = 1 + static_cast<int>(rng.uniform() * 4.0);
    a = ComplexMatrix::Zero(d, d);
    for (int r = 0; r < terms; ++r) a += kron(random_psd(k, k, rng), random_psd(m, m, rng));
  } else {
    constexpr int kMaxDraws = 1000;
    bool accepted = false;
    for (int draw = 0; draw < kMaxDraws && !accepted; ++draw) {
      a = random_psd(d, 2 * d, rng);
      accepted = is_psd(partial_transpose(a, k, m, TransposeSide::first));
    }
    // Mixing toward the identity reaches the PPT set after finitely many halvings.
    const ComplexMatrix mixed = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    while (!accepted) {
      a = 0.5 * (a + mixed);
      accepted = is_psd(partial_transpose(a, k, m, TransposeSide::first));
    }
  }
  a = hermitian_part(a);
  return a / a.trace().real();
}

SkVerdict sk_check(const LinearMapRep& phi, int k, const SampleParams& params, std::uint64_t seed) {
  require_hermiticity_preserving(phi);
  if (k < 1) throw Error(ErrorCode::KOutOfRange, "k must be at least 1");
  const int m = phi.m();
  const int count = std::max(params.samples, 1);

  struct Sample {
    ComplexMatrix block;
    MinEigenPair pair;
    double tol = 0.0;
  };
  std::vector<Sample> results(static_cast<std::size_t>(count));
  const Rng base(seed);
  for_each_index(params.policy, count, [&](int s) {
    Sample& out = results[static_cast<std::size_t>(s)];
    if (s == 0) {
      out.block = ComplexMatrix::Identity(k * m, k * m) / static_cast<double>(k * m);
    } else {
      Rng rng = base.split(static_cast<std::uint64_t>(s));
      out.block = sample_ppt_block(k, m, rng);
    }
    const ComplexMatrix image = hermitian_part(apply_blockwise(phi, out.block, k));
    out.pair = min_eigenpair(image);
    out.tol = psd_tolerance(image);
  });

  SkVerdict verdict;
  verdict.k = k;
  verdict.samples = count;
  verdict.seed = seed;
  verdict.min_value = std::numeric_limits<double>::infinity();
  int worst = 0;
  for (int s = 0; s < count; ++s) {
    const Sample& r = results[static_cast<std::size_t>(s)];
    if (r.pair.value < verdict.min_value) {
      verdict.min_value = r.pair.value;
      worst = s;
    }
  }
  const Sample& w = results[static_cast<std::size_t>(worst)];
  verdict.block = w.block;
  verdict.vector = w.pair.vector;
  verdict.value = w.pair.value;
  verdict.kind = w.pair.value < -w.tol ? VerdictKind::violation : VerdictKind::evidence;
  return verdict;
}

// --- Decomposability -------------------------------------------------------------

namespace {

double min_eig_fast(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

// One round of alternating projections onto {w >= 0} and {(t (x) id) w >= 0}, then trace 1.
ComplexMatrix ppt_round(const ComplexMatrix& w, int m, int n) {
  const int d = m * n;
  ComplexMatrix x = psd_projection(w);
  x = partial_transpose(psd_projection(partial_transpose(x, m, n, TransposeSide::first)), m, n, TransposeSide::first);
  x = hermitian_part(x);
  const double tr = x.trace().real();
  if (!(tr > 1e-14)) return ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return x / tr;
}

// Mix with the maximally mixed state until both PSD constraints hold exactly.
ComplexMatrix make_feasible(const ComplexMatrix& w, int m, int n) {
  const int d = m * n;
  const double lo = std::min(min_eig_fast(w), min_eig_fast(partial_transpose(w, m, n, TransposeSide::first)));
  if (lo >= 0.0) return w;
  const double floor_value = 1.0 / static_cast<double>(d);
  const double eps = std::min(1.0, -lo / (floor_value - lo) * (1.0 + 1e-6) + 1e-15);
  ComplexMatrix out = (1.0 - eps) * w + eps * ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return hermitian_part(out);
}

struct DecompRun {
  ComplexMatrix state;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

DecompRun ppt_descent(const ComplexMatrix& h, int m, int n, const DecompParams& params, Rng rng) {
  const int d = m * n;
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
  ComplexMatrix w = ppt_round(0.5 * random_psd(d, d, rng) + 0.5 * eye / static_cast<double>(d), m, n);
  ComplexMatrix grad = h - (h.trace().real() / d) * eye;
  const double gnorm = grad.norm();
  DecompRun run;
  if (gnorm > 0.0) {
    grad /= gnorm;
    double f = hs_inner(w, h).real();
    double step = params.step;
    int it = 0;
    for (; it < params.max_iterations && step >= params.min_step; ++it) {
      const ComplexMatrix candidate = ppt_round(w - step * grad, m, n);
      const double fc = hs_inner(candidate, h).real();
      if (fc < f - 1e-15 * (1.0 + std::abs(f))) {
        w = candidate;
        f = fc;
      } else {
        step *= 0.5;
      }
    }
    run.iterations = it;
  }
  run.state = make_feasible(w, m, n);
  run.value = hs_inner(run.state, h).real();
  return run;
}

}  // namespace

DecompVerdict decomposability_witness(const ComplexMatrix& h, int m, int n, const DecompParams& params,
                                      std::uint64_t seed) {
  if (h.rows() != m * n || h.cols() != m * n)
    throw Error(ErrorCode::DimensionMismatch, "operator must be " + std::to_string(m * n) + " square");
  require_finite(h, "operator");
  if (hermiticity_defect(h) > kHermitianRelTol * std::max(1.0, h.norm()))
    throw Error(ErrorCode::NotHermitian, "decomposability witness requires a Hermitian operator");

  const int d = m * n;
  DecompVerdict out;
  out.stats.seed = seed;
  if (is_psd(h) || is_psd(partial_transpose(h, m, n, TransposeSide::first))) {
    out.decomposable_by_inspection = true;
    out.state = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    out.value = h.trace().real() / d;
    out.stats.min_value = out.value;
    return out;
  }

  const Rng base(seed);
  std::vector<DecompRun> runs(static_cast<std::size_t>(params.restarts));
  for_each_index(params.policy, params.restarts, [&](int r) {
    runs[static_cast<std::size_t>(r)] = ppt_descent(h, m, n, params, base.split(static_cast<std::uint64_t>(r)));
  });
  out.stats.restarts = params.restarts;
  out.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < params.restarts; ++r) {
    const DecompRun& run = runs[static_cast<std::size_t>(r)];
    out.stats.total_iterations += run.iterations;
    if (run.value < out.value) {
      out.value = run.value;
      out.state = run.state;
      out.stats.best_restart = r;
    }
  }
  out.stats.min_value = out.value;
  out.kind = recheck_decomp_violation(h, m, n, out.state, out.value) ? VerdictKind::violation
                                                                      : VerdictKind::evidence;
  return out;
}

bool recheck_decomp_violation(const ComplexMatrix& h, int m, int n, const ComplexMatrix& state, double value) {
  const int d = m * n;
  if (h.rows() != d || state.rows() != d || state.cols() != d) return false;
  if (hermiticity_defect(state) > 1e-12) return false;
  if (std::abs(state.trace().real() - 1.0) > 1e-10) return false;
  if (min_eig_fast(state) < -1e-12) return false;
  if (min_eig_fast(partial_transpose(state, m, n, TransposeSide::first)) < -1e-12) return false;
  const double recomputed = hs_inner(state, h).real();
  if (std::abs(recomputed - value) > 1e-10 * std::max(1.0, h.norm())) return false;
  return recomputed < -psd_tolerance(h);
}

PkVerdict pk_check(const LinearMapRep& phi, int k, const PkParams& params, std::uint64_t seed) {
  require_hermiticity_preserving(phi);
  if (k < 1) throw Error(ErrorCode::KOutOfRange, "k must be at least 1");
  const int m = phi.m();
  const int rank = std::min(k, phi.n());
  const int count = std::max(params.projections, 1);

  struct Sample {
    ComplexMatrix isometry;
    DecompVerdict corner;
  };
  std::vector<Sample> results(static_cast<std::size_t>(count));
  const Rng base(seed);
  for_each_index(params.policy, count, [&](int s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    Sample& out = results[static_cast<std::size_t>(s)];
    out.isometry = haar_isometry(phi.n(), rank, rng);
    const ComplexMatrix corner = choi_of_map(phi.compressed(out.isometry));
    out.corner = decomposability_witness(corner, m, rank, params.witness, rng.next_u64());
  });

  PkVerdict verdict;
  verdict.k = k;
  verdict.samples = count;
  verdict.seed = seed;
  verdict.min_value = std::numeric_limits<double>::infinity();
  int pick = 0;
  bool found_violation = false;
  for (int s = 0; s < count; ++s) {
    const Sample& r = results[static_cast<std::size_t>(s)];
    verdict.min_value = std::min(verdict.min_value, r.corner.value);
    if (r.corner.kind == VerdictKind::violation &&
        (!found_violation || r.corner.value < results[static_cast<std::size_t>(pick)].corner.value)) {
      pick = s;
      found_violation = true;
    }
  }
  verdict.kind = found_violation ? VerdictKind::violation : VerdictKind::evidence;
  verdict.isometry = results[static_cast<std::size_t>(pick)].isometry;
  verdict.corner = results[static_cast<std::size_t>(pick)].corner;
  return verdict;
}

DecompCertificate dk_compose(const LinearMapRep& positive_part, const LinearMapRep& copositive_part, int k,
                             const SearchParams& params, std::uint64_t seed) {
  if (positive_part.m() != copositive_part.m() || positive_part.n() != copositive_part.n())
    throw Error(ErrorCode::DimensionMismatch, "components must share dimensions");
  KVerdict pos = is_k_positive(positive_part, k, params, derived_seed(seed, 0));
  if (pos.kind == VerdictKind::violation)
    throw Error(ErrorCode::ComponentNotKPositive,
                "k-positivity refuted with value " + std::to_string(pos.value));
  KVerdict cop = is_k_copositive(copositive_part, k, params, derived_seed(seed, 1));
  if (cop.kind == VerdictKind::violation)
    throw Error(ErrorCode::ComponentNotKCopositive,
                "k-copositivity refuted with value " + std::to_string(cop.value));
  LinearMapRep phi = positive_part + copositive_part;
  const double residual =
      (choi_of_map(phi) - choi_of_map(positive_part) - choi_of_map(copositive_part)).norm();
  return DecompCertificate{std::move(phi), positive_part, copositive_part, k, residual, std::move(pos),
                           std::move(cop)};
}

}  // namespace posmap
