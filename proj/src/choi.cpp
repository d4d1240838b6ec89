// SPDX-License-Identifier: Apache-2.0
#include "posmap/choi.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>

namespace posmap {

const char* to_string(VerdictKind kind) noexcept {
  return kind == VerdictKind::violation ? "violation" : "evidence";
}

LinearMapRep::LinearMapRep(int m, int n, std::vector<ComplexMatrix> images)
    : m_(m), n_(n), images_(std::move(images)) {
  if (m <= 0 || n <= 0) throw Error(ErrorCode::DimensionMismatch, "map dimensions must be positive");
  if (images_.size() != static_cast<std::size_t>(m * m))
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(m * m) + " unit images, got " + std::to_string(images_.size()));
  for (const auto& img : images_) {
    if (img.rows() != n || img.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "unit image must be " + std::to_string(n) + "x" + std::to_string(n));
    require_finite(img, "unit image");
  }
}

LinearMapRep LinearMapRep::from_function(int m, int n,
                                         const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  std::vector<ComplexMatrix> images;
  images.reserve(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) images.push_back(f(matrix_unit(m, i, j)));
  return LinearMapRep(m, n, std::move(images));
}

LinearMapRep LinearMapRep::identity(int n) {
  return from_function(n, n, [](const ComplexMatrix& a) { return a; });
}

LinearMapRep LinearMapRep::transposition(int n) {
  return from_function(n, n, [](const ComplexMatrix& a) { return ComplexMatrix(a.transpose()); });
}

LinearMapRep LinearMapRep::trace_map(int m, int n) {
  return from_function(m, n, [n](const ComplexMatrix& a) {
    return ComplexMatrix(a.trace() * ComplexMatrix::Identity(n, n));
  });
}

LinearMapRep LinearMapRep::zero(int m, int n) {
  return from_function(m, n, [n](const ComplexMatrix&) { return ComplexMatrix(ComplexMatrix::Zero(n, n)); });
}

LinearMapRep LinearMapRep::from_conjugations(const std::vector<ComplexMatrix>& kraus,
                                             const std::vector<double>& weights) {
  if (kraus.empty()) throw Error(ErrorCode::DimensionMismatch, "at least one conjugation operator required");
  if (!weights.empty() && weights.size() != kraus.size())
    throw Error(ErrorCode::DimensionMismatch, "weights must match the number of operators");
  const int n = static_cast<int>(kraus.front().rows());
  const int m = static_cast<int>(kraus.front().cols());
  for (const auto& k : kraus)
    if (k.rows() != n || k.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "conjugation operators must share one shape");
  return from_function(m, n, [&](const ComplexMatrix& a) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (std::size_t r = 0; r < kraus.size(); ++r) {
      const double w = weights.empty() ? 1.0 : weights[r];
      out += w * kraus[r] * a * kraus[r].adjoint();
    }
    return out;
  });
}

ComplexMatrix LinearMapRep::apply(const ComplexMatrix& a) const {
  if (a.rows() != m_ || a.cols() != m_)
    throw Error(ErrorCode::DimensionMismatch, "map input must be " + std::to_string(m_) + "x" + std::to_string(m_));
  ComplexMatrix out = ComplexMatrix::Zero(n_, n_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      if (a(i, j) != cplx(0.0)) out += a(i, j) * unit_image(i, j);
  return out;
}

bool LinearMapRep::is_hermiticity_preserving(double tol) const {
  for (int i = 0; i < m_; ++i)
    for (int j = i; j < m_; ++j)
      if ((unit_image(j, i) - unit_image(i, j).adjoint()).norm() > tol * std::max(1.0, unit_image(i, j).norm()))
        return false;
  return true;
}

LinearMapRep LinearMapRep::operator+(const LinearMapRep& other) const {
  if (m_ != other.m_ || n_ != other.n_) throw Error(ErrorCode::DimensionMismatch, "map sum dimension mismatch");
  std::vector<ComplexMatrix> images(images_.size());
  for (std::size_t k = 0; k < images_.size(); ++k) images[k] = images_[k] + other.images_[k];
  return LinearMapRep(m_, n_, std::move(images));
}

LinearMapRep LinearMapRep::operator-(const LinearMapRep& other) const { return *this + other * -1.0; }

LinearMapRep LinearMapRep::operator*(double s) const {
  std::vector<ComplexMatrix> images(images_.size());
  for (std::size_t k = 0; k < images_.size(); ++k) images[k] = s * images_[k];
  return LinearMapRep(m_, n_, std::move(images));
}

LinearMapRep LinearMapRep::compose_transpose_input() const {
  std::vector<ComplexMatrix> images(images_.size());
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) images[static_cast<std::size_t>(i * m_ + j)] = unit_image(j, i);
  return LinearMapRep(m_, n_, std::move(images));
}

LinearMapRep LinearMapRep::compressed(const ComplexMatrix& isometry) const {
  if (isometry.rows() != n_) throw Error(ErrorCode::DimensionMismatch, "isometry rows must equal n");
  const int r = static_cast<int>(isometry.cols());
  std::vector<ComplexMatrix> images(images_.size());
  for (std::size_t k = 0; k < images_.size(); ++k) images[k] = isometry.adjoint() * images_[k] * isometry;
  return LinearMapRep(m_, r, std::move(images));
}

double LinearMapRep::distance(const LinearMapRep& other) const {
  if (m_ != other.m_ || n_ != other.n_) throw Error(ErrorCode::DimensionMismatch, "map distance dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < images_.size(); ++k) acc += (images_[k] - other.images_[k]).squaredNorm();
  return std::sqrt(acc);
}

// --- Choi correspondence -----------------------------------------------------

ComplexMatrix choi_of_map(const LinearMapRep& phi) {
  const int m = phi.m();
  const int n = phi.n();
  ComplexMatrix h = ComplexMatrix::Zero(m * n, m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h.block(i * n, j * n, n, n) = phi.unit_image(i, j);
  return h;
}

ComplexMatrix choi_block(const ComplexMatrix& h, int m, int n, int i, int j) {
  if (h.rows() != m * n || h.cols() != m * n)
    throw Error(ErrorCode::DimensionMismatch, "Choi matrix must be " + std::to_string(m * n) + " square");
  return h.block(i * n, j * n, n, n);
}

LinearMapRep map_of_choi(const ComplexMatrix& h, int m, int n) {
  if (m <= 0 || n <= 0 || h.rows() != m * n || h.cols() != m * n)
    throw Error(ErrorCode::DimensionMismatch, "Choi matrix must be " + std::to_string(m * n) + " square");
  require_finite(h, "Choi matrix");
  std::vector<ComplexMatrix> images;
  images.reserve(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) images.push_back(choi_block(h, m, n, i, j));
  return LinearMapRep(m, n, std::move(images));
}

ComplexMatrix g_of_map(const LinearMapRep& phi) {
  const int m = phi.m();
  const int n = phi.n();
  const int mm = m * m;
  // Pairing matrix M[(i,j),(p,q)] = Tr(E_ij E_pq) between units and the unknown's coordinates.
  ComplexMatrix pairing = ComplexMatrix::Zero(mm, mm);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          pairing(i * m + j, p * m + q) = (matrix_unit(m, i, j) * matrix_unit(m, p, q)).trace();
  const Eigen::PartialPivLU<ComplexMatrix> lu(pairing);

  ComplexMatrix g = ComplexMatrix::Zero(m * n, m * n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      // Tr(E_ij g_lk) = phi(E_ij)_{kl}
      ComplexVector rhs(mm);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) rhs(i * m + j) = phi.unit_image(i, j)(k, l);
      const ComplexMatrix g_lk = unvec(lu.solve(rhs), m, m);
      g += kron(g_lk, matrix_unit(n, l, k));
    }
  return g;
}

double check_g_h(const LinearMapRep& phi) {
  return (choi_of_map(phi) - ComplexMatrix(g_of_map(phi).transpose())).norm();
}

CpVerdict is_cp(const LinearMapRep& phi) {
  if (!phi.is_hermiticity_preserving())
    throw Error(ErrorCode::NotHermitian, "map is not Hermiticity-preserving");
  const ComplexMatrix h = choi_of_map(phi);
  const MinEigenPair pair = min_eigenpair(h);
  CpVerdict out;
  out.min_eigenvalue = pair.value;
  out.completely_positive = pair.value >= -psd_tolerance(h);
  out.witness = pair.vector;
  return out;
}

// --- Block positivity -----------------------------------------------------------

double product_form(const ComplexMatrix& h, const ComplexVector& x, const ComplexVector& y) {
  const ComplexVector z = kron(ComplexMatrix(x), ComplexMatrix(y));
  return (z.adjoint() * h * z)(0, 0).real();
}

namespace {

// (I (x) y)* h (I (x) y), an m x m matrix.
ComplexMatrix contract_second(const ComplexMatrix& h, int m, int n, const ComplexVector& y) {
  ComplexMatrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out(i, j) = (y.adjoint() * h.block(i * n, j * n, n, n) * y)(0, 0);
  return hermitian_part(out);
}

// (x (x) I)* h (x (x) I), an n x n matrix.
ComplexMatrix contract_first(const ComplexMatrix& h, int m, int n, const ComplexVector& x) {
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cplx c = std::conj(x(i)) * x(j);
      if (c != cplx(0.0)) out += c * h.block(i * n, j * n, n, n);
    }
  return hermitian_part(out);
}

struct ProductRun {
  ComplexVector x;
  ComplexVector y;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

ProductRun product_seesaw(const ComplexMatrix& h, int m, int n, const SearchParams& params, Rng rng) {
  ProductRun run;
  run.y = random_unit_vector(n, rng);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < params.max_iterations; ++it) {
    run.x = min_eigenpair(contract_second(h, m, n, run.y)).vector;
    const MinEigenPair ypair = min_eigenpair(contract_first(h, m, n, run.x));
    run.y = ypair.vector;
    run.value = ypair.value;
    run.iterations = it + 1;
    if (previous - run.value < params.improvement_tol) break;
    previous = run.value;
  }
  run.value = product_form(h, run.x, run.y);
  return run;
}

}  // namespace

BlockPosVerdict block_positivity(const ComplexMatrix& h, int m, int n, const SearchParams& params,
                                 std::uint64_t seed) {
  if (h.rows() != m * n || h.cols() != m * n)
    throw Error(ErrorCode::DimensionMismatch, "Choi matrix must be " + std::to_string(m * n) + " square");
  require_finite(h, "Choi matrix");
  if (hermiticity_defect(h) > kHermitianRelTol * std::max(1.0, h.norm()))
    throw Error(ErrorCode::NotHermitian, "block positivity requires a Hermitian operator");

  const Rng base(seed);
  std::vector<ProductRun> runs(static_cast<std::size_t>(params.restarts));
  for_each_index(params.policy, params.restarts, [&](int r) {
    runs[static_cast<std::size_t>(r)] = product_seesaw(h, m, n, params, base.split(static_cast<std::uint64_t>(r)));
  });

  BlockPosVerdict out;
  out.stats.seed = seed;
  out.stats.restarts = params.restarts;
  out.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < params.restarts; ++r) {
    const ProductRun& run = runs[static_cast<std::size_t>(r)];
    out.stats.total_iterations += run.iterations;
    if (run.value < out.value) {
      out.value = run.value;
      out.x = run.x;
      out.y = run.y;
      out.stats.best_restart = r;
    }
  }
  out.stats.min_value = out.value;
  out.kind = out.value < -psd_tolerance(h) ? VerdictKind::violation : VerdictKind::evidence;
  return out;
}

BlockPosForms blockpos_forms(const ComplexMatrix& h, int m, int n, const ComplexVector& x,
                             const ComplexVector& y) {
  if (h.rows() != m * n || h.cols() != m * n || x.size() != m || y.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "blockpos_forms dimensions are inconsistent");
  BlockPosForms out{};
  out.product = product_form(h, x, y);

  // A_kl in B(C^m): (A_kl)_{ij} = h[(i,k),(j,l)].
  cplx second = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      ComplexMatrix a_kl(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a_kl(i, j) = h(i * n + k, j * n + l);
      second += std::conj(y(k)) * y(l) * (x.adjoint() * a_kl * x)(0, 0);
    }
  out.first_factor_blocks = second.real();

  cplx third = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      third += std::conj(x(i)) * x(j) * (y.adjoint() * choi_block(h, m, n, i, j) * y)(0, 0);
  out.second_factor_blocks = third.real();
  return out;
}

}  // namespace posmap
