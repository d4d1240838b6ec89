// SPDX-License-Identifier: Apache-2.0
//
// Fixtures shared by the unit tests and the acceptance binary.
#pragma once

#include <cmath>

#include "posmap/choi.hpp"

namespace posmap::testing {

inline ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix d = ComplexMatrix::Zero(static_cast<int>(values.size()), static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) {
    d(i, i) = v;
    ++i;
  }
  return d;
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline ComplexMatrix pauli_z() { return diag({1.0, -1.0}); }

/// phi_lambda(a) = lambda Tr(a) I_n - a on B(C^n). k-positive exactly when lambda >= k.
inline LinearMapRep lambda_map(int n, double lambda) {
  return LinearMapRep::trace_map(n, n) * lambda - LinearMapRep::identity(n);
}

/// The Choi map on B(C^3): phi(x) = -x + diag(x11 + x33, x22 + x11, x33 + x22).
/// Positive but not decomposable.
inline LinearMapRep choi_map() {
  return LinearMapRep::from_function(3, 3, [](const ComplexMatrix& x) {
    ComplexMatrix y = -x;
    y(0, 0) = x(0, 0) + x(2, 2);
    y(1, 1) = x(1, 1) + x(0, 0);
    y(2, 2) = x(2, 2) + x(1, 1);
    return y;
  });
}

/// Arbitrary (not necessarily Hermiticity-preserving) map with Gaussian unit images.
inline LinearMapRep random_map(int m, int n, Rng& rng) {
  std::vector<ComplexMatrix> images;
  for (int u = 0; u < m * m; ++u) images.push_back(random_complex_matrix(n, n, rng));
  return LinearMapRep(m, n, std::move(images));
}

/// Completely positive map whose Choi matrix is a random PSD matrix.
inline LinearMapRep random_cp_map(int m, int n, Rng& rng) {
  const ComplexMatrix h = random_psd(m * n, m * n, rng);
  return map_of_choi(h / h.trace().real(), m, n);
}

/// Completely copositive map: a random CP map composed with the input transposition.
inline LinearMapRep random_cocp_map(int m, int n, Rng& rng) { return random_cp_map(m, n, rng).compose_transpose_input(); }

inline ComplexVector max_entangled(int d) {
  ComplexVector v = ComplexVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

}  // namespace posmap::testing
