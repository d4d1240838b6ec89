// SPDX-License-Identifier: Apache-2.0
#include "posmap/cones.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace posmap {
namespace {

double min_eig(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

GnsContext joint_context(const GnsContext& a, const GnsContext& b) {
  RealVector lambda(a.dim() * b.dim());
  for (int p = 0; p < a.dim(); ++p)
    for (int i = 0; i < b.dim(); ++i) lambda(p * b.dim() + i) = a.eigenvalues()(p) * b.eigenvalues()(i);
  return gns_context_in_frame(kron(a.frame(), b.frame()), lambda);
}

ComplexMatrix reshuffle_matrix(int da, int db) {
  const int d = da * db;
  ComplexMatrix pi = ComplexMatrix::Zero(d * d, d * d);
  for (int p = 0; p < da; ++p)
    for (int i = 0; i < db; ++i)
      for (int q = 0; q < da; ++q)
        for (int j = 0; j < db; ++j) {
          const int composite = (p * db + i) * d + (q * db + j);
          const int factored = (p * da + q) * db * db + (i * db + j);
          pi(factored, composite) = 1.0;
        }
  return pi;
}

Superoperator half_sum(const Superoperator& a, double sign, int dim) {
  return Superoperator::linear(0.5 * (ComplexMatrix::Identity(dim, dim) + sign * a.matrix));
}

Superoperator zero_superop(int dim) { return Superoperator::linear(ComplexMatrix::Zero(dim, dim)); }

}  // namespace

// --- Context -------------------------------------------------------------------------

BipartiteConeContext::BipartiteConeContext(GnsContext a, GnsContext b)
    : a_(std::move(a)), b_(std::move(b)), joint_(joint_context(a_, b_)),
      reshuffle_(reshuffle_matrix(a_.dim(), b_.dim())) {}

BipartiteConeContext bipartite_context(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b) {
  return BipartiteConeContext(gns_context(rho_a), gns_context(rho_b));
}

Superoperator BipartiteConeContext::tensor(const Superoperator& x, const Superoperator& y) const {
  if (x.antilinear != y.antilinear)
    throw Error(ErrorCode::DimensionMismatch, "tensor factors must share linearity");
  if (x.dim() != dim_a() * dim_a() || y.dim() != dim_b() * dim_b())
    throw Error(ErrorCode::DimensionMismatch, "tensor factor sizes do not match the context");
  return {reshuffle_.transpose() * kron(x.matrix, y.matrix) * reshuffle_, x.antilinear};
}

Superoperator BipartiteConeContext::utilde() const {
  return tensor(Superoperator::identity(dim_a() * dim_a()), b_.u());
}

Superoperator BipartiteConeContext::p() const { return half_sum(utilde(), 1.0, dim() * dim()); }
Superoperator BipartiteConeContext::q() const { return half_sum(utilde(), -1.0, dim() * dim()); }
Superoperator BipartiteConeContext::ptot() const { return half_sum(tensor(a_.u(), b_.u()), 1.0, dim() * dim()); }

Superoperator BipartiteConeContext::pa() const {
  return tensor(half_sum(a_.u(), 1.0, dim_a() * dim_a()), Superoperator::identity(dim_b() * dim_b()));
}
Superoperator BipartiteConeContext::qa() const {
  return tensor(half_sum(a_.u(), -1.0, dim_a() * dim_a()), Superoperator::identity(dim_b() * dim_b()));
}
Superoperator BipartiteConeContext::pb() const {
  return tensor(Superoperator::identity(dim_a() * dim_a()), half_sum(b_.u(), 1.0, dim_b() * dim_b()));
}
Superoperator BipartiteConeContext::qb() const {
  return tensor(Superoperator::identity(dim_a() * dim_a()), half_sum(b_.u(), -1.0, dim_b() * dim_b()));
}

ComplexMatrix BipartiteConeContext::vector_of_blocks(const ComplexMatrix& blocks) const {
  if (blocks.rows() != dim() || blocks.cols() != dim())
    throw Error(ErrorCode::DimensionMismatch, "block matrix must be " + std::to_string(dim()) + " square");
  return delta_n(0.25).apply_matrix(blocks * omega_n());
}

ComplexMatrix BipartiteConeContext::blocks_of_vector(const ComplexMatrix& xi) const {
  if (xi.rows() != dim() || xi.cols() != dim())
    throw Error(ErrorCode::DimensionMismatch, "vector must be " + std::to_string(dim()) + " square");
  return delta_n(-0.25).apply_matrix(xi) * joint_.rho_power(-0.5);
}

DefectReport BipartiteConeContext::structure_defects() const {
  const int d = dim() * dim();
  const Superoperator id = Superoperator::identity(d);
  const Superoperator ut = utilde();
  const Superoperator pp = p();
  const Superoperator qq = q();
  return {
      {"Jm_is_tensor_of_factors", superop_distance(joint_.jm(), tensor(a_.jm(), b_.jm()))},
      {"Delta_is_tensor_of_factors", superop_distance(joint_.delta(1.0), tensor(a_.delta(1.0), b_.delta(1.0)))},
      {"Omega_is_tensor_of_factors", (omega_n() - kron(a_.omega(), b_.omega())).norm()},
      {"Utilde_involution", superop_distance(ut * ut, id)},
      {"P_idempotent", superop_distance(pp * pp, pp)},
      {"Q_idempotent", superop_distance(qq * qq, qq)},
      {"PQ_orthogonal", superop_distance(pp * qq, zero_superop(d))},
      {"P_plus_Q_identity", superop_distance(pp + qq, id)},
  };
}

ComplexMatrix block_transpose(const ComplexMatrix& blocks, int dim_a, int dim_b) {
  return partial_transpose(blocks, dim_a, dim_b, TransposeSide::second);
}

// --- Membership ----------------------------------------------------------------------

ConeMembership cone_member(const BipartiteConeContext& ctx, const ComplexMatrix& xi, const DecompParams* hull_params,
                           std::uint64_t seed) {
  require_finite(xi, "cone vector");
  ConeMembership out;
  out.blocks = ctx.blocks_of_vector(xi);
  const double scale = std::max(1.0, out.blocks.norm());
  out.blocks_hermiticity_defect = hermiticity_defect(out.blocks);
  const bool hermitian = out.blocks_hermiticity_defect <= kHermitianRelTol * scale;
  const ComplexMatrix transposed = block_transpose(out.blocks, ctx.dim_a(), ctx.dim_b());
  const ComplexMatrix via_u = ctx.blocks_of_vector(ctx.utilde().apply_matrix(xi));
  out.min_eig_p = min_eig(out.blocks);
  out.min_eig_ptau = min_eig(transposed);
  out.min_eig_ptau_via_u = min_eig(via_u);
  out.route_defect = (transposed - via_u).norm();
  out.in_p = hermitian && out.min_eig_p >= -kPsdRelTol * scale;
  out.in_ptau = hermitian && out.min_eig_ptau >= -kPsdRelTol * scale;
  out.in_intersection = out.in_p && out.in_ptau;
  out.in_hull_evidence = out.in_p || out.in_ptau;
  if (!out.in_hull_evidence && hermitian && hull_params) {
    out.hull_search = decomposability_witness(hermitian_part(out.blocks), ctx.dim_a(), ctx.dim_b(), *hull_params, seed);
    out.in_hull_evidence = out.hull_search->kind == VerdictKind::evidence;
  }
  return out;
}

ComplexMatrix sample_intersection_blocks(int dim_a, int dim_b, Rng& rng) {
  const int d = dim_a * dim_b;
  constexpr int kRounds = 20;
  constexpr int kDiscards = 64;
  ComplexMatrix a;
  for (int attempt = 0; attempt <= kDiscards; ++attempt) {
    a = random_psd(d, d, rng);
    for (int r = 0; r < kRounds; ++r) {
      a = psd_projection(a);
      a = block_transpose(psd_projection(block_transpose(a, dim_a, dim_b)), dim_a, dim_b);
    }
    a = hermitian_part(a);
    const double tr = a.trace().real();
    if (!(tr > 1e-12)) continue;
    a /= tr;
    if (min_eig(a) >= -1e-9 && min_eig(block_transpose(a, dim_a, dim_b)) >= -1e-9) return a;
  }
  // Mixing with the identity always lands inside both cones.
  const double lo = std::min(min_eig(a), min_eig(block_transpose(a, dim_a, dim_b)));
  const double eps = std::min(1.0, -lo / (1.0 / d - lo) * (1.0 + 1e-6));
  return hermitian_part((1.0 - eps) * a + eps * ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

ComplexMatrix sample_cone_vector(const BipartiteConeContext& ctx, Rng& rng) {
  const int d = ctx.dim();
  ComplexMatrix blocks;
  if (rng.uniform() < 0.5) {
    const ComplexVector v = random_unit_vector(d, rng);
    blocks = v * v.adjoint();
  } else {
    blocks = random_psd(d, d, rng);
  }
  const ComplexMatrix xi = ctx.vector_of_blocks(blocks);
  return xi / xi.norm();
}

DefectReport transposed_cone_consistency(const BipartiteConeContext& ctx, int samples, std::uint64_t seed) {
  const int d = ctx.dim();
  const Superoperator ut = ctx.utilde();
  const Superoperator jm = ctx.joint().jm();
  const Rng base(seed);
  double transposes = 0.0;
  double commutant_membership = 0.0;
  double commutant_pairing = 0.0;
  double hull_duality = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    const ComplexMatrix a = random_psd(d, 1 + s % d, rng);
    const ComplexMatrix lhs = ut.apply_matrix(ctx.vector_of_blocks(a));
    const ComplexMatrix rhs = ctx.vector_of_blocks(block_transpose(a, ctx.dim_a(), ctx.dim_b()));
    transposes = std::max(transposes, (lhs - rhs).norm());

    // Generator x j_m(x) Omega of the natural cone of B(K_A) (x) B(K_B)'.
    Superoperator x = zero_superop(d * d);
    for (int r = 0; r < 2; ++r) {
      const ComplexMatrix left = random_complex_matrix(ctx.dim_a(), ctx.dim_a(), rng);
      const ComplexMatrix right = random_complex_matrix(ctx.dim_b(), ctx.dim_b(), rng);
      x = x + ctx.tensor(left_multiplication(left), right_multiplication(right));
    }
    ComplexMatrix zeta = x.apply_matrix(jm.apply_matrix(x.apply_matrix(ctx.omega_n())));
    zeta /= zeta.norm();
    const ConeMembership flipped = cone_member(ctx, ut.apply_matrix(zeta));
    commutant_membership =
        std::max({commutant_membership, flipped.in_p ? 0.0 : 1.0, -flipped.min_eig_p, 0.0});
    const ComplexMatrix in_p = sample_cone_vector(ctx, rng);
    commutant_pairing = std::max(commutant_pairing, -hs_inner(zeta, ut.apply_matrix(in_p)).real());

    ComplexMatrix meet = ctx.vector_of_blocks(sample_intersection_blocks(ctx.dim_a(), ctx.dim_b(), rng));
    meet /= meet.norm();
    const ComplexMatrix generator = (s % 2 == 0) ? in_p : ut.apply_matrix(in_p);
    hull_duality = std::max(hull_duality, -hs_inner(meet, generator).real());
  }
  return {
      {"Utilde_transposes_blocks", transposes},
      {"commutant_cone_is_Utilde_P", commutant_membership},
      {"commutant_cone_pairing", std::max(0.0, commutant_pairing)},
      {"intersection_hull_duality", std::max(0.0, hull_duality)},
  };
}

DefectReport intersection_identity_check(const BipartiteConeContext& ctx, int samples, std::uint64_t seed) {
  const int d = ctx.dim();
  const Superoperator ut = ctx.utilde();
  const Rng base(seed);
  double construction = 0.0;
  double members = 0.0;
  double routes = 0.0;
  double invariance = 0.0;
  int found_members = 0;
  for (int s = 0; s < samples; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    const ComplexMatrix a = sample_intersection_blocks(ctx.dim_a(), ctx.dim_b(), rng);
    const ComplexMatrix xi = ctx.vector_of_blocks(a);
    const ConeMembership m = cone_member(ctx, xi);
    construction = std::max({construction, m.in_intersection ? 0.0 : 1.0, -m.min_eig_p, -m.min_eig_ptau});
    routes = std::max(routes, m.route_defect);
    const ConeMembership turned = cone_member(ctx, ut.apply_matrix(xi));
    invariance = std::max(invariance, turned.in_intersection ? 0.0 : 1.0);

    // Reverse inclusion: any vector of P that lands in the intersection has both
    // block orderings PSD when reconstructed.
    const ComplexMatrix probe = (s % 2 == 0) ? ctx.vector_of_blocks(random_psd(d, 1 + s % d, rng)) : xi;
    const ConeMembership pm = cone_member(ctx, probe);
    routes = std::max(routes, pm.route_defect);
    if (pm.in_intersection) {
      ++found_members;
      members = std::max({members, -pm.min_eig_p, -pm.min_eig_ptau, -pm.min_eig_ptau_via_u});
    }
  }
  return {
      {"constructed_vectors_in_intersection", std::max(0.0, construction)},
      {"intersection_members_have_both_orderings_psd", std::max(0.0, members)},
      {"transposed_cone_route_agreement", routes},
      {"Utilde_preserves_intersection", invariance},
      {"intersection_members_found_deficit", found_members > 0 ? 0.0 : 1.0},
  };
}

// --- P/Q ---------------------------------------------------------------------------------

PqSplit pq_split(const BipartiteConeContext& ctx, const ComplexMatrix& xi) {
  PqSplit out;
  out.p = ctx.p().apply_matrix(xi);
  out.q = ctx.q().apply_matrix(xi);
  out.orthogonality_defect = std::abs(hs_inner(out.p, out.q));
  out.norm_defect = std::abs(out.p.squaredNorm() + out.q.squaredNorm() - xi.squaredNorm());
  const ComplexMatrix blocks = ctx.blocks_of_vector(xi);
  const ComplexMatrix antisymmetric = 0.5 * (blocks - block_transpose(blocks, ctx.dim_a(), ctx.dim_b()));
  out.closed_form_defect = (out.q - ctx.vector_of_blocks(antisymmetric)).norm();
  return out;
}

double ConeInequalities::min_slack() const {
  return std::min({abs_q_by_p, pairing_nonnegative, twice_q_by_xi, pb_over_qb, ua_pairing, norm_q_by_p, total_bound});
}

ConeInequalities cone_inequalities(const BipartiteConeContext& ctx, const ComplexMatrix& xi, int eta_samples,
                                   std::uint64_t seed, ExecutionPolicy policy) {
  const PqSplit split = pq_split(ctx, xi);
  const Superoperator pa = ctx.pa();
  const Superoperator qa = ctx.qa();
  const Superoperator pb = ctx.pb();
  const Superoperator qb = ctx.qb();
  const ComplexMatrix papb = (pa * pb).apply_matrix(xi);
  const ComplexMatrix qapb = (qa * pb).apply_matrix(xi);
  const ComplexMatrix paqb = (pa * qb).apply_matrix(xi);
  const ComplexMatrix qaqb = (qa * qb).apply_matrix(xi);
  const ComplexMatrix tot = ctx.ptot().apply_matrix(xi);

  const int count = std::max(eta_samples, 1);
  struct Slacks {
    ComplexMatrix eta;
    double b, c1, c2, d, e, total;
  };
  std::vector<Slacks> slacks(static_cast<std::size_t>(count));
  const Rng base(seed);
  for_each_index(policy, count, [&](int s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    Slacks& out = slacks[static_cast<std::size_t>(s)];
    out.eta = sample_cone_vector(ctx, rng);
    const auto pair = [&](const ComplexMatrix& v) { return hs_inner(out.eta, v); };
    const cplx with_q = pair(split.q);
    const double with_p = pair(split.p).real();
    const double with_xi = pair(xi).real();
    out.b = with_p - std::abs(with_q);
    out.c1 = with_xi;
    out.c2 = with_xi - 2.0 * with_q.real();
    out.d = (pair(papb) + pair(qapb) - pair(paqb) - pair(qaqb)).real();
    out.e = (pair(papb) - pair(qapb) + pair(paqb) - pair(qaqb)).real();
    out.total = pair(tot).real() - 2.0 * pair(qaqb).real();
  });

  ConeInequalities out;
  out.samples = count;
  const double inf = std::numeric_limits<double>::infinity();
  out.abs_q_by_p = out.pairing_nonnegative = out.twice_q_by_xi = out.pb_over_qb = out.ua_pairing = out.total_bound = inf;
  out.norm_q_by_p = split.p.norm() - split.q.norm();
  const double tol = -1e-9 * std::max(1.0, xi.norm());
  if (out.norm_q_by_p < tol) ++out.violations;
  for (int s = 0; s < count; ++s) {
    const Slacks& r = slacks[static_cast<std::size_t>(s)];
    if (r.b < out.abs_q_by_p) {
      out.abs_q_by_p = r.b;
      out.worst_eta = r.eta;
    }
    out.pairing_nonnegative = std::min(out.pairing_nonnegative, r.c1);
    out.twice_q_by_xi = std::min(out.twice_q_by_xi, r.c2);
    out.pb_over_qb = std::min(out.pb_over_qb, r.d);
    out.ua_pairing = std::min(out.ua_pairing, r.e);
    out.total_bound = std::min(out.total_bound, r.total);
    for (const double v : {r.b, r.c1, r.c2, r.d, r.e, r.total})
      if (v < tol) ++out.violations;
  }
  return out;
}

ConeInequalities prop64_check(const BipartiteConeContext& ctx, const ComplexMatrix& xi, int eta_samples,
                              std::uint64_t seed, ExecutionPolicy policy) {
  const ConeMembership m = cone_member(ctx, xi);
  if (!m.in_intersection)
    throw Error(ErrorCode::NotInIntersection, "vector is not in P cap P^tau (min eigenvalues " +
                                                  std::to_string(m.min_eig_p) + ", " +
                                                  std::to_string(m.min_eig_ptau) + ")");
  return cone_inequalities(ctx, xi, eta_samples, seed, policy);
}

namespace {
void require_two_by_two_blocks(const BipartiteConeContext& ctx, const ComplexMatrix& xi) {
  if (ctx.dim_b() != 2) throw Error(ErrorCode::DimensionMismatch, "this check needs dim K_B = 2");
  if (!cone_member(ctx, xi).in_p) throw Error(ErrorCode::NotInP, "vector is not in the natural cone");
}
}  // namespace

FixedPointFlags prop65_check(const BipartiteConeContext& ctx, const ComplexMatrix& xi) {
  require_two_by_two_blocks(ctx, xi);
  const PqSplit split = pq_split(ctx, xi);
  const double scale = std::max(1.0, xi.norm());
  FixedPointFlags out;
  out.q_zero = split.q.norm() <= 1e-9 * scale;
  out.fixed = (ctx.utilde().apply_matrix(xi) - xi).norm() <= 2e-9 * scale;
  out.q_in_p = cone_member(ctx, split.q).in_p;
  return out;
}

QPolar q_polar(const BipartiteConeContext& ctx, const ComplexMatrix& xi) {
  require_two_by_two_blocks(ctx, xi);
  const int da = ctx.dim_a();
  const int d = ctx.dim();
  const ComplexMatrix blocks = ctx.blocks_of_vector(xi);
  ComplexMatrix b(da, da);
  for (int p = 0; p < da; ++p)
    for (int q = 0; q < da; ++q) b(p, q) = 0.5 * (blocks(p * 2, q * 2 + 1) - blocks(p * 2 + 1, q * 2));

  QPolar out;
  out.h = cplx(0.0, -1.0) * b;
  const ComplexMatrix qxi = ctx.q().apply_matrix(xi);
  if (b.norm() <= 1e-12 * std::max(1.0, blocks.norm())) {
    out.degenerate = true;
    out.vtilde = zero_superop(d * d);
    out.xi_b = ComplexMatrix::Zero(d, d);
    out.reconstruction_defect = qxi.norm();
    out.xi_b_in_p = true;
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix v = svd.matrixU() * svd.matrixV().adjoint();
  const ComplexMatrix abs_b = svd.matrixV() * svd.singularValues().cast<cplx>().asDiagonal() * svd.matrixV().adjoint();

  ComplexMatrix vm = ComplexMatrix::Zero(d, d);
  for (int p = 0; p < da; ++p)
    for (int q = 0; q < da; ++q) {
      vm(p * 2, q * 2 + 1) = v(p, q);
      vm(p * 2 + 1, q * 2) = -v(p, q);
    }
  const ComplexMatrix abs_big = kron(abs_b, ComplexMatrix::Identity(2, 2));
  out.vtilde = ctx.delta_n(0.25) * left_multiplication(vm) * ctx.delta_n(-0.25);
  out.xi_b = ctx.vector_of_blocks(abs_big);
  out.reconstruction_defect = (qxi - out.vtilde.apply_matrix(out.xi_b)).norm();
  out.xi_b_in_p = cone_member(ctx, out.xi_b).in_p;
  return out;
}

// --- Weak k-decomposability ----------------------------------------------------------------

LinearMapRep map_in_frame(const GnsContext& ctx, const LinearMapRep& phi) {
  const ComplexMatrix& x = ctx.frame();
  return LinearMapRep::from_function(phi.m(), phi.n(), [&](const ComplexMatrix& a) {
    return ComplexMatrix(x.adjoint() * phi.apply(x * a * x.adjoint()) * x);
  });
}

namespace {

struct WeakDecSetup {
  BipartiteConeContext ctx;
  Superoperator t_tensor;
};

WeakDecSetup weak_dec_setup(const LinearMapRep& phi, const WeakDecParams& params, int n) {
  const int m = phi.m();
  const ComplexMatrix rho_a = params.rho_a ? *params.rho_a : ComplexMatrix(ComplexMatrix::Identity(m, m) / m);
  const ComplexMatrix rho_b =
      params.block_state ? params.block_state(n) : ComplexMatrix(ComplexMatrix::Identity(n, n) / n);
  BipartiteConeContext ctx = bipartite_context(rho_a, rho_b);
  const TPhi t = t_phi(ctx.a(), map_in_frame(ctx.a(), phi));
  Superoperator tt = ctx.tensor(t.t, Superoperator::identity(n * n));
  return {std::move(ctx), std::move(tt)};
}

// kpos samples blocks on C^n (x) C^m with the block index slow; cones keeps K_A slow.
ComplexMatrix to_cones_layout(const ComplexMatrix& a, int n, int m) {
  ComplexMatrix out(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < m; ++p)
      for (int j = 0; j < n; ++j)
        for (int q = 0; q < m; ++q) out(p * n + i, q * n + j) = a(i * m + p, j * m + q);
  return out;
}

}  // namespace

WeakDecVerdict weak_kdec_cone_check(const LinearMapRep& phi, int k, const WeakDecParams& params,
                                    std::uint64_t seed) {
  if (phi.m() != phi.n()) throw Error(ErrorCode::DimensionMismatch, "T_phi needs a map of B(K_A) into itself");
  if (!phi.is_hermiticity_preserving())
    throw Error(ErrorCode::NotHermitian, "map is not Hermiticity-preserving");
  if (k < 1) throw Error(ErrorCode::KOutOfRange, "k must be at least 1");
  const int m = phi.m();
  const int count = std::max(params.samples, 1);

  WeakDecVerdict out;
  out.k = k;
  out.samples_per_size = count;
  out.seed = seed;
  out.min_value = std::numeric_limits<double>::infinity();
  out.value = std::numeric_limits<double>::infinity();
  const Rng base(seed);
  for (int n = 1; n <= k; ++n) {
    const WeakDecSetup setup = weak_dec_setup(phi, params, n);
    struct Sample {
      ComplexMatrix blocks, eta;
      MinEigenPair pair;
      double tol = 0.0;
    };
    std::vector<Sample> samples(static_cast<std::size_t>(count));
    for_each_index(params.policy, count, [&](int s) {
      Sample& r = samples[static_cast<std::size_t>(s)];
      ComplexMatrix a;
      if (s == 0) {
        a = ComplexMatrix::Identity(n * m, n * m) / static_cast<double>(n * m);
      } else {
        Rng rng = base.split(static_cast<std::uint64_t>(s));
        a = sample_ppt_block(n, m, rng);
      }
      r.blocks = to_cones_layout(a, n, m);
      r.eta = setup.ctx.vector_of_blocks(r.blocks);
      const ComplexMatrix z = hermitian_part(setup.t_tensor.apply_matrix(r.eta));
      r.pair = min_eigenpair(z);
      r.tol = psd_tolerance(z);
    });
    for (int s = 0; s < count; ++s) {
      const Sample& r = samples[static_cast<std::size_t>(s)];
      out.min_value = std::min(out.min_value, r.pair.value);
      const bool refutes = r.pair.value < -r.tol;
      const bool better = out.kind == VerdictKind::evidence ? (refutes || r.pair.value < out.value)
                                                            : (refutes && r.pair.value < out.value);
      if (better) {
        out.kind = refutes ? VerdictKind::violation : VerdictKind::evidence;
        out.block_size = n;
        out.blocks = r.blocks;
        out.eta = r.eta;
        out.xi = r.pair.vector * r.pair.vector.adjoint();
        out.value = r.pair.value;
      }
    }
  }
  return out;
}

bool recheck_weak_kdec_violation(const LinearMapRep& phi, const WeakDecParams& params, const WeakDecVerdict& v,
                                 double* recomputed) {
  if (v.block_size < 1 || v.block_size > v.k) return false;
  const int d = phi.m() * v.block_size;
  if (v.blocks.rows() != d || v.eta.rows() != d || v.xi.rows() != d) return false;
  const double scale = std::max(1.0, v.blocks.norm());
  if (hermiticity_defect(v.blocks) > kHermitianRelTol * scale) return false;
  if (min_eig(v.blocks) < -kPsdRelTol * scale) return false;
  if (min_eig(block_transpose(v.blocks, phi.m(), v.block_size)) < -kPsdRelTol * scale) return false;
  if (hermiticity_defect(v.xi) > 1e-12 || min_eig(v.xi) < -1e-12) return false;
  const WeakDecSetup setup = weak_dec_setup(phi, params, v.block_size);
  const ComplexMatrix eta = setup.ctx.vector_of_blocks(v.blocks);
  if ((eta - v.eta).norm() > 1e-10 * std::max(1.0, eta.norm())) return false;
  const ComplexMatrix z = setup.t_tensor.apply_matrix(eta);
  const double value = hs_inner(v.xi, z).real();
  if (recomputed) *recomputed = value;
  if (std::abs(value - v.value) > 1e-10 * std::max(1.0, z.norm())) return false;
  return value < -psd_tolerance(hermitian_part(z));
}

}  // namespace posmap
