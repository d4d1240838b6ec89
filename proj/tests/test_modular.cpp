// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "posmap/modular.hpp"
#include "support.hpp"

using namespace posmap;
using testing::diag;

namespace {
GnsContext tracial(int n) { return gns_context(ComplexMatrix::Identity(n, n) / static_cast<double>(n)); }
}  // namespace

TEST_CASE("context construction") {
  const GnsContext t = tracial(2);
  CHECK(superop_distance(t.delta(1.0), Superoperator::identity(4)) < 1e-14);

  const GnsContext c = gns_context(diag({2.0 / 3.0, 1.0 / 3.0}));
  const ComplexMatrix d = c.delta(1.0).matrix;
  CHECK(d(0, 0).real() == doctest::Approx(1.0));
  CHECK(d(1, 1).real() == doctest::Approx(2.0));
  CHECK(d(2, 2).real() == doctest::Approx(0.5));
  CHECK(d(3, 3).real() == doctest::Approx(1.0));
  CHECK((d - ComplexMatrix(d.diagonal().asDiagonal())).norm() < 1e-14);
  // A diagonal state keeps the computational basis.
  CHECK((c.frame() - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);

  for (const ComplexMatrix& bad : {ComplexMatrix(diag({1.0, 0.0})), ComplexMatrix(diag({1.0 - 1e-9, 1e-9}))}) {
    try {
      gns_context(bad);
      FAIL("expected NotFaithful");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotFaithful);
    }
  }
  try {
    gns_context(diag({0.5, 0.6}));
    FAIL("expected NotAState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAState);
  }
}

TEST_CASE("non-diagonal states use their eigenbasis") {
  Rng rng(3);
  const ComplexMatrix rho = random_faithful_state(3, rng);
  const GnsContext ctx = gns_context(rho);
  CHECK((ctx.from_frame(ctx.rho_frame()) - rho).norm() < 1e-13);
  CHECK((ctx.frame().adjoint() * ctx.frame() - ComplexMatrix::Identity(3, 3)).norm() < 1e-13);
}

TEST_CASE("transposition through the conjugations") {
  const GnsContext t = tracial(2);
  const TransposeViaJ e = transpose_via_j(t, matrix_unit(2, 0, 1), t.omega());
  CHECK((e.lhs - matrix_unit(2, 1, 0) / std::sqrt(2.0)).norm() < 1e-14);
  CHECK(e.defect < 1e-14);
  Rng rng(4);
  for (int n = 2; n <= 5; ++n) {
    const GnsContext ctx = gns_context(random_faithful_state(n, rng));
    const ComplexMatrix xi = random_complex_matrix(n, n, rng);
    const TransposeViaJ id = transpose_via_j(ctx, ComplexMatrix::Identity(n, n), xi);
    CHECK((id.lhs - xi).norm() < 1e-12);
    CHECK(id.defect < 1e-12);
    CHECK(transpose_via_j(ctx, random_complex_matrix(n, n, rng), xi).defect < 1e-10);
  }
}

TEST_CASE("unitary relations and polar decomposition") {
  CHECK(max_defect(check_unitary_relations(tracial(3))) <= 1e-12);
  CHECK(max_defect(check_unitary_relations(gns_context(diag({0.5, 0.3, 0.2})))) <= 1e-10);
  CHECK(superop_distance(tracial(3).tau(), tracial(3).u()) < 1e-14);
  CHECK(check_polar(gns_context(diag({2.0 / 3.0, 1.0 / 3.0}))) <= 1e-12);
  Rng rng(5);
  CHECK(check_polar(gns_context(random_faithful_state(5, rng))) <= 1e-10);
}

TEST_CASE("superoperator algebra handles antilinear factors") {
  const GnsContext ctx = gns_context(diag({0.6, 0.4}));
  // J is an involution and J_m J_m = I, both antilinear.
  CHECK(superop_distance(ctx.j() * ctx.j(), Superoperator::identity(4)) < 1e-14);
  CHECK((ctx.j() * ctx.jm()).antilinear == false);
  CHECK(ctx.jm().antilinear);
  const Superoperator s = ctx.jm() * ctx.delta(0.5);
  const ComplexMatrix a = matrix_unit(2, 0, 1) * cplx(0.0, 2.0);
  // S a Omega = a* Omega.
  CHECK((s.apply_matrix(ctx.vector_of(a)) - ctx.vector_of(a.adjoint())).norm() < 1e-13);
}

TEST_CASE("alpha maps left multiplications into the commutant") {
  const GnsContext ctx = gns_context(diag({0.5, 0.3, 0.2}));
  const AlphaResult id = alpha(ctx, ComplexMatrix::Identity(9, 9));
  CHECK((id.image - ComplexMatrix::Identity(9, 9)).norm() < 1e-14);
  const AlphaResult e12 = alpha(ctx, left_multiplication(matrix_unit(3, 0, 1)).matrix);
  CHECK(e12.commutant_defect <= 1e-12);
}

TEST_CASE("V_beta membership") {
  const GnsContext ctx = gns_context(diag({0.7, 0.3}));
  for (double beta : {0.0, 0.1, 0.25, 0.5}) {
    const VBetaMembership m = v_beta_member(ctx, beta, ctx.omega());
    CHECK(m.member);
    CHECK((m.element - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  const ComplexMatrix e11 = v_beta_vector(ctx, 0.25, matrix_unit(2, 0, 0));
  CHECK(v_beta_member(ctx, 0.25, e11).member);
  const ComplexMatrix anti = v_beta_vector(ctx, 0.1, matrix_unit(2, 0, 1) - matrix_unit(2, 1, 0));
  CHECK_FALSE(v_beta_member(ctx, 0.1, anti).member);
  CHECK_THROWS_AS(v_beta_member(ctx, 0.6, ctx.omega()), Error);
}

TEST_CASE("V_beta duality") {
  Rng rng(6);
  const GnsContext ctx = gns_context(random_faithful_state(3, rng));
  const DualityReport natural = v_beta_duality_check(ctx, 0.25, 100, 1);
  CHECK(natural.min_real_pairing >= -1e-10);
  const DualityReport flip = v_beta_duality_check(ctx, 0.1, 100, 2);
  CHECK(flip.flip_failures == 0);
  CHECK(flip.max_imag_pairing < 1e-12);
  const DualityReport ends = v_beta_duality_check(tracial(3), 0.0, 50, 3);
  CHECK(ends.min_real_pairing >= -1e-12);
}

TEST_CASE("induced Hilbert-space operator") {
  const GnsContext ctx = gns_context(diag({0.6, 0.4}));
  const TPhi id = t_phi(ctx, LinearMapRep::identity(2));
  CHECK(superop_distance(id.t, Superoperator::identity(4)) < 1e-13);
  CHECK(id.invariance_defect < 1e-14);
  CHECK(id.contraction_defect < 1e-12);
  CHECK(id.delta_commutation_defect < 1e-13);

  const GnsContext tr = tracial(3);
  CHECK(superop_distance(t_phi(tr, LinearMapRep::transposition(3)).t, tr.u()) < 1e-13);

  const ComplexMatrix rho = diag({0.6, 0.4});
  const LinearMapRep expect = LinearMapRep::from_function(2, 2, [&](const ComplexMatrix& a) {
    return ComplexMatrix((rho * a).trace() * ComplexMatrix::Identity(2, 2));
  });
  const TPhi rank1 = t_phi(ctx, expect);
  const ComplexVector om = ctx.omega_vector();
  CHECK((rank1.t.matrix - om * om.adjoint()).norm() < 1e-13);
  CHECK(rank1.contraction_defect < 1e-12);
  CHECK_FALSE(rank1.invariance_warning);
}

TEST_CASE("Schwarz inequality check") {
  CHECK(schwarz_check(LinearMapRep::identity(3), 50, 1) <= 1e-12);
  // Transposition sends a*a - (a^t)* a^t to conj(a*a - a a*), which is traceless
  // and nonzero for any non-normal a, so it is not a Schwarz map.
  CHECK(schwarz_check(LinearMapRep::transposition(3), 50, 2) > 1e-3);
  CHECK(schwarz_check(LinearMapRep::identity(2) * 2.0, 50, 3) > 0.1);
}

TEST_CASE("detailed balance adjoint") {
  const GnsContext ctx = gns_context(diag({0.5, 0.3, 0.2}));
  const DbAdjoint id = db_adjoint(ctx, LinearMapRep::identity(3), 1);
  CHECK(id.map.distance(LinearMapRep::identity(3)) < 1e-12);
  CHECK(id.defect <= 1e-10);
  REQUIRE(id.positivity.has_value());
  CHECK(id.positivity->kind == VerdictKind::evidence);

  ComplexMatrix u = diag({1.0, 1.0, 1.0});
  u(1, 1) = std::polar(1.0, 0.4);
  u(2, 2) = std::polar(1.0, -1.3);
  const LinearMapRep phi = LinearMapRep::from_conjugations({u}, {1.0});
  const LinearMapRep expect = LinearMapRep::from_conjugations({ComplexMatrix(u.adjoint())}, {1.0});
  const DbAdjoint conj = db_adjoint(ctx, phi, 2);
  CHECK(conj.map.distance(expect) < 1e-12);
  CHECK(conj.defect <= 1e-10);
}

TEST_CASE("vector states of cone elements") {
  const ComplexMatrix rho = diag({0.5, 0.3, 0.2});
  const GnsContext ctx = gns_context(rho);
  CHECK((cone_state(ctx, ctx.omega()) - rho).norm() < 1e-14);
  Rng rng(7);
  const ComplexMatrix xi = v_beta_vector(ctx, 0.25, random_psd(3, 3, rng));
  const ComplexMatrix flipped = cone_state(ctx, ctx.u().apply_matrix(xi));
  CHECK((flipped - cone_state(ctx, xi).transpose()).norm() <= 1e-10);
  const GnsContext tr = tracial(2);
  ComplexMatrix sym(2, 2);
  sym << 0.6, 0.2, 0.2, 0.4;
  const ComplexMatrix fixed = v_beta_vector(tr, 0.25, sym);
  CHECK((tr.u().apply_matrix(fixed) - fixed).norm() < 1e-14);
  const ComplexMatrix s = cone_state(tr, fixed);
  CHECK((s - s.transpose()).norm() < 1e-14);
  CHECK_THROWS_AS(cone_state(ctx, -ctx.omega()), Error);
}

TEST_CASE("the full modular suite on random states") {
  Rng rng(8);
  for (int n = 2; n <= 4; ++n) {
    const GnsContext ctx = gns_context(random_faithful_state(n, rng));
    const DefectReport r = modular_suite(ctx, ModularSuiteParams{40, 0.1}, static_cast<std::uint64_t>(n));
    CHECK(r.size() >= 18);
    CHECK(max_defect(r) <= 1e-9);
  }
}
