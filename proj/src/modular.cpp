// SPDX-License-Identifier: Apache-2.0
#include "posmap/modular.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace posmap {

// --- Superoperator algebra ------------------------------------------------------

ComplexVector Superoperator::apply(const ComplexVector& v) const {
  if (v.size() != matrix.cols()) throw Error(ErrorCode::DimensionMismatch, "superoperator input size");
  return antilinear ? ComplexVector(matrix * v.conjugate()) : ComplexVector(matrix * v);
}

ComplexMatrix Superoperator::apply_matrix(const ComplexMatrix& xi) const {
  return unvec(apply(vec(xi)), static_cast<int>(xi.rows()), static_cast<int>(xi.cols()));
}

Superoperator Superoperator::adjoint() const {
  return antilinear ? Superoperator{matrix.transpose(), true} : Superoperator{matrix.adjoint(), false};
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
  if (a.matrix.cols() != b.matrix.rows()) throw Error(ErrorCode::DimensionMismatch, "superoperator product");
  ComplexMatrix m = a.antilinear ? ComplexMatrix(a.matrix * b.matrix.conjugate()) : ComplexMatrix(a.matrix * b.matrix);
  return {std::move(m), a.antilinear != b.antilinear};
}

namespace {
void require_same_kind(const Superoperator& a, const Superoperator& b) {
  if (a.antilinear != b.antilinear || a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
    throw Error(ErrorCode::DimensionMismatch, "sum of superoperators of different shape or linearity");
}
}  // namespace

Superoperator operator+(const Superoperator& a, const Superoperator& b) {
  require_same_kind(a, b);
  return {a.matrix + b.matrix, a.antilinear};
}

Superoperator operator-(const Superoperator& a, const Superoperator& b) {
  require_same_kind(a, b);
  return {a.matrix - b.matrix, a.antilinear};
}

double superop_distance(const Superoperator& a, const Superoperator& b) {
  if (a.matrix.cols() != b.matrix.cols() || a.matrix.rows() != b.matrix.rows())
    throw Error(ErrorCode::DimensionMismatch, "superoperator distance");
  double worst = 0.0;
  const Eigen::Index d = a.matrix.cols();
  for (Eigen::Index k = 0; k < d; ++k) {
    for (const cplx scale : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
      ComplexVector e = ComplexVector::Zero(d);
      e(k) = scale;
      worst = std::max(worst, (a.apply(e) - b.apply(e)).norm());
    }
  }
  return worst;
}

Superoperator left_multiplication(const ComplexMatrix& a) {
  return Superoperator::linear(kron(a, ComplexMatrix::Identity(a.cols(), a.cols())));
}

Superoperator right_multiplication(const ComplexMatrix& b) {
  return Superoperator::linear(kron(ComplexMatrix::Identity(b.rows(), b.rows()), b.transpose()));
}

// --- Context ---------------------------------------------------------------------

namespace {

Superoperator superop_from_units(int n, bool antilinear, const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  ComplexMatrix m(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.col(i * n + j) = vec(f(matrix_unit(n, i, j)));
  return {std::move(m), antilinear};
}

ComplexMatrix unit_swap(int n) {
  ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(j * n + i, i * n + j) = 1.0;
  return m;
}

bool is_exactly_diagonal(const ComplexMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

void check_faithful(const RealVector& lambda) {
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  if (lo < kFaithfulMinEig)
    throw Error(ErrorCode::NotFaithful, "min eigenvalue " + std::to_string(lo) + " below 1e-8");
  if (hi / lo > kMaxConditionNumber)
    throw Error(ErrorCode::NotFaithful, "condition number " + std::to_string(hi / lo) + " above 1e6");
}

}  // namespace

GnsContext gns_context(const ComplexMatrix& rho) {
  require_square(rho, "rho");
  require_finite(rho, "rho");
  const double defect = hermiticity_defect(rho);
  if (defect > kHermitianRelTol * rho.norm())
    throw Error(ErrorCode::NotHermitian, "rho is not Hermitian");
  const cplx tr = rho.trace();
  if (std::abs(tr - 1.0) > kStateTraceTol)
    throw Error(ErrorCode::NotAState, "trace of rho differs from 1 by " + std::to_string(std::abs(tr - 1.0)));

  GnsContext ctx;
  ctx.n_ = static_cast<int>(rho.rows());
  ctx.rho_ = rho;
  if (is_exactly_diagonal(rho)) {
    ctx.frame_ = ComplexMatrix::Identity(ctx.n_, ctx.n_);
    ctx.lambda_ = rho.diagonal().real();
  } else {
    HermEig e = herm_eig(rho);
    ctx.frame_ = std::move(e.eigenvectors);
    ctx.lambda_ = std::move(e.eigenvalues);
  }
  check_faithful(ctx.lambda_);
  return ctx;
}

GnsContext gns_context_in_frame(const ComplexMatrix& frame, const RealVector& eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  if (frame.rows() != n || frame.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "frame must be square of the eigenvalue count");
  if ((frame.adjoint() * frame - ComplexMatrix::Identity(n, n)).norm() > 1e-10)
    throw Error(ErrorCode::DimensionMismatch, "frame is not unitary");
  // Products of two validated spectra carry rounding from both factors.
  if (std::abs(eigenvalues.sum() - 1.0) > 100.0 * kStateTraceTol)
    throw Error(ErrorCode::NotAState, "eigenvalues do not sum to 1");
  check_faithful(eigenvalues);
  GnsContext ctx;
  ctx.n_ = n;
  ctx.frame_ = frame;
  ctx.lambda_ = eigenvalues;
  ctx.rho_ = frame * eigenvalues.cast<cplx>().asDiagonal() * frame.adjoint();
  return ctx;
}

ComplexMatrix GnsContext::rho_frame() const { return lambda_.cast<cplx>().asDiagonal(); }

ComplexMatrix GnsContext::rho_power(double beta) const {
  RealVector p(n_);
  for (int i = 0; i < n_; ++i) p(i) = beta == 0.0 ? 1.0 : std::pow(lambda_(i), beta);
  return p.cast<cplx>().asDiagonal();
}

Superoperator GnsContext::delta(double beta) const {
  const ComplexMatrix left = rho_power(beta);
  const ComplexMatrix right = rho_power(-beta);
  return superop_from_units(n_, false, [&](const ComplexMatrix& e) { return ComplexMatrix(left * e * right); });
}

Superoperator GnsContext::jm() const { return Superoperator::conjugate_linear(unit_swap(n_)); }

Superoperator GnsContext::j() const { return Superoperator::conjugate_linear(ComplexMatrix::Identity(n_ * n_, n_ * n_)); }

Superoperator GnsContext::u() const { return Superoperator::linear(unit_swap(n_)); }

Superoperator GnsContext::tau() const {
  const ComplexMatrix om = omega();
  const ComplexMatrix om_inv = rho_power(-0.5);
  return superop_from_units(n_, false, [&](const ComplexMatrix& xi) {
    return ComplexMatrix((xi * om_inv).transpose() * om);
  });
}

Superoperator GnsContext::jc() const { return Superoperator::conjugate_linear(ComplexMatrix::Identity(n_, n_)); }

ComplexMatrix GnsContext::element_of(const ComplexMatrix& xi) const { return xi * rho_power(-0.5); }

// --- Identities -------------------------------------------------------------------

TransposeViaJ transpose_via_j(const GnsContext& ctx, const ComplexMatrix& a, const ComplexMatrix& xi) {
  const int n = ctx.dim();
  if (a.rows() != n || a.cols() != n || xi.rows() != n || xi.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "transpose_via_j expects " + std::to_string(n) + " square inputs");
  TransposeViaJ out;
  out.lhs = a.transpose() * xi;
  const Superoperator j = ctx.j();
  out.rhs = (j * left_multiplication(a.adjoint()) * j).apply_matrix(xi);
  out.defect = (out.lhs - out.rhs).norm();
  return out;
}

double max_defect(const DefectReport& report) {
  double worst = 0.0;
  for (const auto& [name, value] : report) worst = std::max(worst, std::isnan(value) ? 1e300 : value);
  return worst;
}

DefectReport check_unitary_relations(const GnsContext& ctx) {
  const int d = ctx.dim() * ctx.dim();
  const Superoperator u = ctx.u();
  const Superoperator j = ctx.j();
  const Superoperator jm = ctx.jm();
  const Superoperator delta = ctx.delta(1.0);
  const Superoperator delta_inv = ctx.delta(-1.0);
  return {
      {"U_squared_identity", superop_distance(u * u, Superoperator::identity(d))},
      {"U_selfadjoint", superop_distance(u, u.adjoint())},
      {"J_equals_U_Jm", superop_distance(j, u * jm)},
      {"J_Jm_commute", superop_distance(j * jm, jm * j)},
      {"J_U_commute", superop_distance(j * u, u * j)},
      {"Jm_U_commute", superop_distance(jm * u, u * jm)},
      {"J_Delta_commute", superop_distance(j * delta, delta * j)},
      {"U_Delta_inverse", superop_distance(u * delta, delta_inv * u)},
  };
}

double check_polar(const GnsContext& ctx) { return superop_distance(ctx.tau(), ctx.u() * ctx.delta(0.5)); }

AlphaResult alpha(const GnsContext& ctx, const ComplexMatrix& op) {
  const int n = ctx.dim();
  if (op.rows() != n * n || op.cols() != n * n)
    throw Error(ErrorCode::DimensionMismatch, "alpha expects an operator on the GNS space");
  const ComplexMatrix u = ctx.u().matrix;
  AlphaResult out;
  out.image = u * op * u.adjoint();
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const ComplexMatrix left = left_multiplication(matrix_unit(n, k, l)).matrix;
      out.commutant_defect = std::max(out.commutant_defect, (out.image * left - left * out.image).norm());
    }
  return out;
}

namespace {
void require_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 0.5))
    throw Error(ErrorCode::BetaOutOfRange, "beta = " + std::to_string(beta) + " outside [0, 1/2]");
}

double min_eig_of_hermitian_part(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}
}  // namespace

ComplexMatrix v_beta_vector(const GnsContext& ctx, double beta, const ComplexMatrix& a) {
  require_beta(beta);
  return ctx.rho_power(beta) * a * ctx.rho_power(0.5 - beta);
}

VBetaMembership v_beta_member(const GnsContext& ctx, double beta, const ComplexMatrix& xi) {
  require_beta(beta);
  const int n = ctx.dim();
  if (xi.rows() != n || xi.cols() != n) throw Error(ErrorCode::DimensionMismatch, "vector has wrong size");
  VBetaMembership out;
  out.element = ctx.rho_power(-beta) * xi * ctx.rho_power(beta - 0.5);
  out.hermiticity_defect = hermiticity_defect(out.element);
  out.min_eigenvalue = min_eig_of_hermitian_part(out.element);
  const double scale = std::max(1.0, out.element.norm());
  out.member = out.hermiticity_defect <= kHermitianRelTol * scale && out.min_eigenvalue >= -kPsdRelTol * scale;
  return out;
}

DualityReport v_beta_duality_check(const GnsContext& ctx, double beta, int samples, std::uint64_t seed) {
  require_beta(beta);
  const int n = ctx.dim();
  const Superoperator u = ctx.u();
  const Rng base(seed);
  DualityReport out;
  out.samples = samples;
  out.min_real_pairing = std::numeric_limits<double>::infinity();
  out.flip_min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    const int rank = 1 + s % n;
    const ComplexMatrix a = random_psd(n, rank, rng);
    const ComplexMatrix b = random_psd(n, 1 + (s / n) % n, rng);
    const ComplexMatrix xi = v_beta_vector(ctx, beta, a);
    const ComplexMatrix eta = v_beta_vector(ctx, 0.5 - beta, b);
    const cplx pairing = hs_inner(eta, xi);
    out.min_real_pairing = std::min(out.min_real_pairing, pairing.real());
    out.max_imag_pairing = std::max(out.max_imag_pairing, std::abs(pairing.imag()));
    const VBetaMembership flipped = v_beta_member(ctx, 0.5 - beta, u.apply_matrix(xi));
    if (!flipped.member) ++out.flip_failures;
    out.flip_min_eigenvalue = std::min(out.flip_min_eigenvalue, flipped.min_eigenvalue);
  }
  return out;
}

TPhi t_phi(const GnsContext& ctx, const LinearMapRep& phi) {
  const int n = ctx.dim();
  if (phi.m() != n || phi.n() != n)
    throw Error(ErrorCode::DimensionMismatch, "T_phi needs a map on B(C^" + std::to_string(n) + ")");
  ComplexMatrix big(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) big.col(i * n + j) = vec(phi.unit_image(i, j));
  const Superoperator phi_op = Superoperator::linear(big);
  const Superoperator r = right_multiplication(ctx.omega());
  const Superoperator r_inv = right_multiplication(ctx.rho_power(-0.5));
  TPhi out{phi, r * phi_op * r_inv};

  const ComplexMatrix rho = ctx.rho_frame();
  const ComplexMatrix om = ctx.omega();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const ComplexMatrix e = matrix_unit(n, i, j);
      const cplx moved = (rho * phi.unit_image(i, j)).trace();
      out.invariance_defect = std::max(out.invariance_defect, std::abs(moved - rho(j, i)));
      const ComplexMatrix lhs = out.t.apply_matrix(e * om);
      out.unit_defect = std::max(out.unit_defect, (lhs - phi.unit_image(i, j) * om).norm());
    }
  out.invariance_warning = out.invariance_defect > 1e-8;
  const ComplexMatrix delta = ctx.delta(1.0).matrix;
  out.delta_commutation_defect = (out.t.matrix * delta - delta * out.t.matrix).norm();
  Eigen::JacobiSVD<ComplexMatrix> svd(out.t.matrix);
  out.contraction_defect = std::max(0.0, svd.singularValues()(0) - 1.0);
  return out;
}

double schwarz_check(const LinearMapRep& phi, int samples, std::uint64_t seed) {
  const Rng base(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));
    ComplexMatrix a = random_complex_matrix(phi.m(), phi.m(), rng);
    a /= a.norm();
    const ComplexMatrix fa = phi.apply(a);
    const ComplexMatrix gap = phi.apply(a.adjoint() * a) - fa.adjoint() * fa;
    worst = std::max(worst, -min_eig_of_hermitian_part(gap));
  }
  return worst;
}

DbAdjoint db_adjoint(const GnsContext& ctx, const LinearMapRep& phi, std::uint64_t seed) {
  const int n = ctx.dim();
  if (phi.m() != n || phi.n() != n)
    throw Error(ErrorCode::DimensionMismatch, "detailed balance needs a map on B(C^" + std::to_string(n) + ")");
  const RealVector& lambda = ctx.eigenvalues();
  // Tr(rho E_ij phi(E_kl)) = lambda_i phi(E_kl)(j, i) since rho is diagonal in the frame.
  std::vector<ComplexMatrix> images;
  images.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ComplexMatrix rho_psi(n, n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) rho_psi(l, k) = lambda(i) * phi.unit_image(k, l)(j, i);
      images.push_back(ctx.rho_power(-1.0) * rho_psi);
    }
  DbAdjoint out{LinearMapRep(n, n, std::move(images)), 0.0, std::nullopt};

  const ComplexMatrix rho = ctx.rho_frame();
  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const ComplexMatrix eij = matrix_unit(n, i, j);
          const cplx lhs = (rho * eij * phi.unit_image(k, l)).trace();
          const cplx rhs = (rho * out.map.unit_image(i, j) * matrix_unit(n, k, l)).trace();
          scale = std::max(scale, std::abs(lhs));
          out.defect = std::max(out.defect, std::abs(lhs - rhs));
        }
  if (out.defect > 1e-10 * scale)
    throw Error(ErrorCode::InconsistentSystem, "detailed-balance defect " + std::to_string(out.defect));
  if (out.map.is_hermiticity_preserving(1e-9)) {
    SearchParams params;
    params.restarts = 8;
    params.max_iterations = 100;
    params.policy = ExecutionPolicy::serial;
    out.positivity = block_positivity(choi_of_map(out.map), n, n, params, seed);
  }
  return out;
}

ComplexMatrix cone_state(const GnsContext& ctx, const ComplexMatrix& xi) {
  const VBetaMembership m = v_beta_member(ctx, 0.25, xi);
  if (!m.member)
    throw Error(ErrorCode::NotInNaturalCone, "vector is not in the natural cone (min eigenvalue " +
                                                 std::to_string(m.min_eigenvalue) + ")");
  return xi * xi.adjoint();
}

// --- Suite -------------------------------------------------------------------------

namespace {

double membership_defect(const VBetaMembership& m) {
  if (!m.member) return 1.0;
  return std::max({0.0, -m.min_eigenvalue, m.hermiticity_defect});
}

}  // namespace

DefectReport modular_suite(const GnsContext& ctx, const ModularSuiteParams& params, std::uint64_t seed) {
  const int n = ctx.dim();
  const int samples = std::max(params.samples, 1);
  const Rng base(seed);
  DefectReport report;

  {
    double worst = 0.0;
    Rng rng = base.split(0);
    for (int s = 0; s < samples; ++s) {
      ComplexMatrix a = random_complex_matrix(n, n, rng);
      ComplexMatrix xi = random_complex_matrix(n, n, rng);
      a /= a.norm();
      xi /= xi.norm();
      worst = std::max(worst, transpose_via_j(ctx, a, xi).defect);
    }
    report.emplace_back("transpose_via_J", worst);
  }

  for (auto& entry : check_unitary_relations(ctx)) report.push_back(std::move(entry));
  report.emplace_back("tau_polar_decomposition", check_polar(ctx));

  {
    double commutant = 0.0;
    double involution = 0.0;
    Rng rng = base.split(1);
    const int probes = std::min(samples, 5);
    for (int s = 0; s < probes; ++s) {
      ComplexMatrix a = random_complex_matrix(n, n, rng);
      a /= a.norm();
      const ComplexMatrix left = left_multiplication(a).matrix;
      const AlphaResult once = alpha(ctx, left);
      commutant = std::max(commutant, once.commutant_defect);
      involution = std::max(involution, (alpha(ctx, once.image).image - left).norm());
    }
    report.emplace_back("alpha_into_commutant", commutant);
    report.emplace_back("alpha_involution", involution);
  }

  {
    double pairing = 0.0;
    double imag = 0.0;
    double flip = 0.0;
    std::uint64_t stream = 2;
    for (const double beta : {0.0, params.flip_beta, 0.25, 0.5}) {
      const DualityReport d = v_beta_duality_check(ctx, beta, samples, base.split(stream++).next_u64());
      pairing = std::max(pairing, -d.min_real_pairing);
      imag = std::max(imag, d.max_imag_pairing);
      flip = std::max(flip, d.flip_failures > 0 ? 1.0 : std::max(0.0, -d.flip_min_eigenvalue));
    }
    report.emplace_back("v_beta_duality_pairing", pairing);
    report.emplace_back("v_beta_pairing_imaginary", imag);
    report.emplace_back("U_maps_v_beta_to_dual", flip);
  }

  {
    const Superoperator polar = ctx.u() * ctx.delta(0.5);
    const TPhi t_id = t_phi(ctx, LinearMapRep::identity(n));
    const TPhi t_tr = t_phi(ctx, LinearMapRep::transposition(n));
    double id_defect = 0.0;
    double tr_defect = 0.0;
    Rng rng = base.split(10);
    for (int s = 0; s < samples; ++s) {
      const ComplexMatrix xi = v_beta_vector(ctx, 0.0, random_psd(n, 1 + s % n, rng));
      const ComplexMatrix turned = polar.apply_matrix(xi);
      id_defect = std::max({id_defect, membership_defect(v_beta_member(ctx, 0.0, turned)),
                            membership_defect(v_beta_member(ctx, 0.0, t_id.t.apply_matrix(turned)))});
      tr_defect = std::max(tr_defect, membership_defect(v_beta_member(ctx, 0.0, t_tr.t.apply_matrix(turned))));
    }
    report.emplace_back("V0_invariance_identity", id_defect);
    report.emplace_back("V0_invariance_transposition", tr_defect);
    report.emplace_back("T_phi_unit_action", std::max(t_id.unit_defect, t_tr.unit_defect));
  }

  {
    double worst = (cone_state(ctx, ctx.omega()) - ctx.rho_frame()).norm();
    const Superoperator u = ctx.u();
    Rng rng = base.split(11);
    for (int s = 0; s < samples; ++s) {
      const ComplexMatrix xi = v_beta_vector(ctx, 0.25, random_psd(n, 1 + s % n, rng));
      const ComplexMatrix direct = cone_state(ctx, xi);
      const ComplexMatrix flipped = cone_state(ctx, u.apply_matrix(xi));
      worst = std::max(worst, (flipped - direct.transpose()).norm());
    }
    report.emplace_back("cone_state_transposition", worst);
  }

  {
    const ComplexMatrix full = ctx.delta(1.0).matrix;
    double worst = 0.0;
    for (const double beta : {0.25, 0.5, -0.5}) {
      const ComplexMatrix powered = frac_power(full, beta);
      const ComplexMatrix direct = ctx.delta(beta).matrix;
      worst = std::max(worst, (powered - direct).norm() / std::max(1.0, direct.norm()));
    }
    report.emplace_back("delta_power_consistency", worst);
  }
  return report;
}

}  // namespace posmap
