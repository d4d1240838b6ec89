// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "posmap/kpos.hpp"
#include "support.hpp"

using namespace posmap;

namespace {
SearchParams search(int restarts = 16) {
  SearchParams p;
  p.restarts = restarts;
  return p;
}
SampleParams samples(int n) {
  SampleParams p;
  p.samples = n;
  return p;
}
ComplexMatrix pt_first(const ComplexMatrix& a, int k, int m) {
  return partial_transpose(a, k, m, TransposeSide::first);
}
}  // namespace

TEST_CASE("k-block minimum on identity and transposition") {
  for (int k = 1; k <= 2; ++k) {
    const KVerdict id = k_block_min(LinearMapRep::identity(2), k, search(), 1);
    CHECK(id.kind == VerdictKind::evidence);
    CHECK(id.value >= -1e-9);
  }
  const KVerdict t1 = k_block_min(LinearMapRep::transposition(2), 1, search(64), 2);
  CHECK(t1.kind == VerdictKind::evidence);
  CHECK(t1.value >= -1e-9);
  const KVerdict t2 = k_block_min(LinearMapRep::transposition(2), 2, search(), 3);
  CHECK(t2.kind == VerdictKind::violation);
  CHECK(t2.value == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(recheck_k_violation(swap_operator(2), 2, 2, 2, t2));
}

TEST_CASE("k out of range") {
  CHECK_THROWS_AS(is_k_positive(LinearMapRep::identity(2), 3, search(), 1), Error);
  CHECK_THROWS_AS(is_k_positive(LinearMapRep::identity(2), 0, search(), 1), Error);
}

TEST_CASE("lambda map straddles its k-positivity thresholds") {
  CHECK(is_k_positive(testing::lambda_map(3, 1.0), 1, search(), 4).kind == VerdictKind::evidence);
  const KVerdict below = is_k_positive(testing::lambda_map(3, 1.5), 2, search(), 5);
  CHECK(below.kind == VerdictKind::violation);
  CHECK(below.value == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(below.isometry.cols() <= 2);
  CHECK(recheck_k_violation(choi_of_map(testing::lambda_map(3, 1.5)), 3, 3, 2, below));
  CHECK(is_k_positive(testing::lambda_map(3, 2.05), 2, search(), 6).kind == VerdictKind::evidence);
  CHECK(is_k_positive(testing::lambda_map(3, 0.9), 1, search(), 7).kind == VerdictKind::violation);
}

TEST_CASE("k-copositivity") {
  CHECK(is_k_copositive(LinearMapRep::transposition(2), 2, search(), 1).kind == VerdictKind::evidence);
  const KVerdict id = is_k_copositive(LinearMapRep::identity(2), 2, search(), 2);
  CHECK(id.kind == VerdictKind::violation);
  CHECK(id.value == doctest::Approx(-1.0).epsilon(1e-10));
  Rng rng(3);
  const LinearMapRep cp = testing::random_cp_map(3, 2, rng);
  CHECK(is_k_copositive(cp, 1, search(), 3).kind == VerdictKind::evidence);
}

TEST_CASE("a tampered witness fails the recheck") {
  KVerdict t2 = k_block_min(LinearMapRep::transposition(2), 2, search(), 3);
  t2.value = -1.5;
  CHECK_FALSE(recheck_k_violation(swap_operator(2), 2, 2, 2, t2));
}

TEST_CASE("PPT block sampler produces doubly positive unit-trace blocks") {
  const Rng base(21);
  for (int s = 0; s < 50; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    const int k = 1 + s % 3;
    const ComplexMatrix a = sample_ppt_block(k, 3, rng);
    CHECK(a.trace().real() == doctest::Approx(1.0));
    CHECK(psd_min_eig(a) >= -1e-9);
    CHECK(psd_min_eig(pt_first(a, k, 3)) >= -1e-9);
  }
}

TEST_CASE("S_k sampling") {
  Rng rng(5);
  const LinearMapRep dec = testing::random_cp_map(2, 2, rng) + testing::random_cocp_map(2, 2, rng);
  const SkVerdict d = sk_check(dec, 2, samples(500), 9);
  CHECK(d.kind == VerdictKind::evidence);
  CHECK(d.samples == 500);
  const SkVerdict neg = sk_check(LinearMapRep::identity(2) * -1.0, 1, samples(10), 1);
  CHECK(neg.kind == VerdictKind::violation);
  // For -id every sample violates, and the reported block is the most negative one.
  CHECK(neg.value <= -0.5);
  for (int k = 1; k <= 3; ++k)
    CHECK(sk_check(LinearMapRep::transposition(2), k, samples(200), 4).kind == VerdictKind::evidence);
}

TEST_CASE("blockwise application") {
  const ComplexMatrix a = ComplexMatrix::Identity(4, 4);
  CHECK((apply_blockwise(LinearMapRep::transposition(2), swap_operator(2), 2) -
         partial_transpose(swap_operator(2), 2, 2, TransposeSide::second))
            .norm() < 1e-14);
  CHECK(apply_blockwise(LinearMapRep::identity(2), a, 2).isApprox(a));
}

TEST_CASE("decomposability witness") {
  DecompParams p;
  Rng rng(8);
  const DecompVerdict cp = decomposability_witness(random_psd(4, 4, rng), 2, 2, p, 1);
  CHECK(cp.kind == VerdictKind::evidence);
  CHECK(cp.decomposable_by_inspection);
  const DecompVerdict sw = decomposability_witness(swap_operator(2), 2, 2, p, 2);
  CHECK(sw.kind == VerdictKind::evidence);
  CHECK(sw.value >= -1e-9);

  const ComplexMatrix h = choi_of_map(testing::choi_map());
  const DecompVerdict choi = decomposability_witness(h, 3, 3, p, 3);
  CHECK(choi.kind == VerdictKind::violation);
  CHECK(choi.value <= -1e-4);
  CHECK_FALSE(choi.decomposable_by_inspection);
  CHECK(recheck_decomp_violation(h, 3, 3, choi.state, choi.value));
  CHECK(choi.state.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(psd_min_eig(choi.state) >= -1e-12);
  CHECK(psd_min_eig(pt_first(choi.state, 3, 3)) >= -1e-12);
  CHECK_FALSE(recheck_decomp_violation(h, 3, 3, choi.state, choi.value - 1e-3));
}

TEST_CASE("P_k sampling") {
  PkParams p;
  p.projections = 30;
  CHECK(pk_check(LinearMapRep::transposition(2), 1, p, 1).kind == VerdictKind::evidence);
  CHECK(pk_check(LinearMapRep::transposition(2), 2, p, 1).kind == VerdictKind::evidence);
  const PkVerdict neg = pk_check(LinearMapRep::identity(2) * -1.0, 1, p, 2);
  CHECK(neg.kind == VerdictKind::violation);
  CHECK(neg.isometry.cols() == 1);
  Rng rng(4);
  const LinearMapRep dec = testing::random_cp_map(3, 3, rng) + testing::random_cocp_map(3, 3, rng);
  CHECK(pk_check(dec, 2, p, 3).kind == VerdictKind::evidence);
}

TEST_CASE("rank-one corners reduce to positivity") {
  // For a 1 x 1 corner the compressed Choi matrix is m x m and PPT states on
  // C^m (x) C^1 are all states, so the corner verdict is plain positivity of x -> w* phi(x) w.
  PkParams p;
  p.projections = 20;
  const PkVerdict pos = pk_check(testing::lambda_map(3, 1.0), 1, p, 5);
  CHECK(pos.kind == VerdictKind::evidence);
  CHECK(pos.min_value >= -1e-9);
  const PkVerdict neg = pk_check(testing::lambda_map(3, 0.5), 1, p, 5);
  CHECK(neg.kind == VerdictKind::violation);
}

TEST_CASE("dk_compose certifies and rejects") {
  const DecompCertificate c =
      dk_compose(LinearMapRep::identity(2), LinearMapRep::transposition(2), 2, search(), 1);
  const LinearMapRep sum = LinearMapRep::from_function(2, 2, [](const ComplexMatrix& a) {
    return ComplexMatrix(a + a.transpose());
  });
  CHECK(c.phi.distance(sum) < 1e-14);
  CHECK(c.residual < 1e-12);
  Rng rng(7);
  CHECK_NOTHROW(dk_compose(testing::random_cp_map(3, 2, rng), LinearMapRep::zero(3, 2), 2, search(), 2));
  try {
    dk_compose(LinearMapRep::transposition(2), LinearMapRep::zero(2, 2), 2, search(), 3);
    FAIL("expected ComponentNotKPositive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ComponentNotKPositive);
  }
  try {
    dk_compose(LinearMapRep::zero(2, 2), LinearMapRep::identity(2), 2, search(), 4);
    FAIL("expected ComponentNotKCopositive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ComponentNotKCopositive);
  }
}
