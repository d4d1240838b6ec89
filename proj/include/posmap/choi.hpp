// SPDX-License-Identifier: Apache-2.0
//
// Maps B(C^m) -> B(C^n), their Choi matrices h = sum_ij E_ij (x) phi(E_ij), and the
// base positivity tests on h.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "posmap/matkernel.hpp"
#include "posmap/parallel.hpp"

namespace posmap {

/// A linear map phi: B(C^m) -> B(C^n), stored as its images of the matrix units.
class LinearMapRep {
 public:
  /// Images in row-major unit order: images[i * m + j] = phi(E_ij), each n x n.
  LinearMapRep(int m, int n, std::vector<ComplexMatrix> images);

  static LinearMapRep from_function(int m, int n, const std::function<ComplexMatrix(const ComplexMatrix&)>& f);
  static LinearMapRep identity(int n);
  static LinearMapRep transposition(int n);
  /// a -> Tr(a) I_n.
  static LinearMapRep trace_map(int m, int n);
  static LinearMapRep zero(int m, int n);
  /// a -> sum_r weights[r] K_r a K_r*, with K_r of size n x m.
  static LinearMapRep from_conjugations(const std::vector<ComplexMatrix>& kraus,
                                        const std::vector<double>& weights);

  int m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  const ComplexMatrix& unit_image(int i, int j) const { return images_[static_cast<std::size_t>(i * m_ + j)]; }
  const std::vector<ComplexMatrix>& images() const noexcept { return images_; }

  ComplexMatrix apply(const ComplexMatrix& a) const;

  /// phi(a*) = phi(a)* on all units, to tol.
  bool is_hermiticity_preserving(double tol = 1e-10) const;

  LinearMapRep operator+(const LinearMapRep& other) const;
  LinearMapRep operator-(const LinearMapRep& other) const;
  LinearMapRep operator*(double s) const;

  /// phi o t (transpose the input first).
  LinearMapRep compose_transpose_input() const;
  /// a -> W* phi(a) W for an isometry W (n x r): the compression of phi to the range of W.
  LinearMapRep compressed(const ComplexMatrix& isometry) const;

  /// Frobenius distance between the Choi matrices.
  double distance(const LinearMapRep& other) const;

 private:
  int m_;
  int n_;
  std::vector<ComplexMatrix> images_;
};

enum class VerdictKind { violation, evidence };
const char* to_string(VerdictKind kind) noexcept;

/// Multi-start alternating search budget. Restart r draws from Rng(seed).split(r).
struct SearchParams {
  int restarts = 32;
  int max_iterations = 200;
  double improvement_tol = 1e-12;
  ExecutionPolicy policy = ExecutionPolicy::parallel;
};

struct SearchStats {
  double min_value = 0.0;
  int restarts = 0;
  int total_iterations = 0;
  int best_restart = -1;
  std::uint64_t seed = 0;
};

// --- Choi correspondence -----------------------------------------------------

ComplexMatrix choi_of_map(const LinearMapRep& phi);
/// phi(E_ij) = V_i* h V_j with V_x y = x (x) y.
LinearMapRep map_of_choi(const ComplexMatrix& h, int m, int n);

/// The block operator g = sum_kl g_kl (x) F_kl of the trace representation
/// phi(a) = sum_kl Tr(a g_lk) F_kl, solved from trace pairings with matrix units.
ComplexMatrix g_of_map(const LinearMapRep& phi);
/// ||h - g^t||_F with ^t the full transposition in the product basis.
double check_g_h(const LinearMapRep& phi);

// --- Positivity ---------------------------------------------------------------

struct CpVerdict {
  bool completely_positive = false;
  double min_eigenvalue = 0.0;
  /// Unit eigenvector for min_eigenvalue; <z, h z> < 0 certifies non-CP.
  ComplexVector witness;
};

/// Exact: CP iff the Choi matrix is PSD. Throws NotHermitian unless phi is
/// Hermiticity-preserving.
CpVerdict is_cp(const LinearMapRep& phi);

struct BlockPosVerdict {
  VerdictKind kind = VerdictKind::evidence;
  /// Best product vector found (unit x in C^m, unit y in C^n) and <x(x)y, h x(x)y>.
  ComplexVector x;
  ComplexVector y;
  double value = 0.0;
  SearchStats stats;
};

/// See-saw minimization of <x (x) y, h (x (x) y)> over unit product vectors.
BlockPosVerdict block_positivity(const ComplexMatrix& h, int m, int n, const SearchParams& params,
                                 std::uint64_t seed);

double product_form(const ComplexMatrix& h, const ComplexVector& x, const ComplexVector& y);

/// The three equivalent quadratic forms for h = sum A_kl (x) F_kl = sum E_ij (x) A'_ij:
/// (i) <x(x)y, h x(x)y>, (ii) sum conj(l_k) l_l <x, A_kl x> with l = coordinates of y,
/// (iii) sum conj(u_i) u_j <y, A'_ij y> with u = coordinates of x.
struct BlockPosForms {
  double product;
  double first_factor_blocks;
  double second_factor_blocks;
};
BlockPosForms blockpos_forms(const ComplexMatrix& h, int m, int n, const ComplexVector& x,
                             const ComplexVector& y);

/// h_ij = V_i* h V_j (the block of h indexed by first-factor units).
ComplexMatrix choi_block(const ComplexMatrix& h, int m, int n, int i, int j);

}  // namespace posmap
