#pragma once

// Shared builders and brute-force helpers for the test suites. The helpers
// here are intentionally naive (cofactor expansions, plain loops) so they
// stay independent of the code paths they check.

#include <vector>

#include "subsample/function_system.hpp"
#include "subsample/types.hpp"

namespace subsample::testing {

// Inverse by cofactor expansion; O(n!) determinants, fine for dim <= 5.
inline Complex det_recursive(const std::vector<std::vector<Complex>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  Complex det = 0.0;
  double sign = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Complex>> minor(n - 1,
                                            std::vector<Complex>(n - 1));
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t col = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor[i - 1][col++] = a[i][j];
      }
    }
    det += sign * a[0][c] * det_recursive(minor);
    sign = -sign;
  }
  return det;
}

inline std::vector<std::vector<Complex>> to_nested(const Matrix& m) {
  std::vector<std::vector<Complex>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
  }
  return out;
}

// Tr(A^-1) through the adjugate: sum of principal-minor determinants over det.
inline double trace_inverse_cofactor(const Matrix& m) {
  const auto a = to_nested(m);
  const std::size_t n = a.size();
  Complex acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<Complex>> minor(n - 1,
                                            std::vector<Complex>(n - 1));
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      std::size_t col = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        minor[row][col++] = a[i][j];
      }
      ++row;
    }
    acc += det_recursive(minor);
  }
  const Complex det = det_recursive(a);
  return (acc / det).real();
}

inline Matrix random_hermitian_pd(int dim, Rng& rng, double ridge = 0.5) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.normal(), rng.normal());
    }
  }
  Matrix a = g * g.adjoint() / double(dim);
  a += ridge * Matrix::Identity(dim, dim);
  return a;
}

inline Vector random_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(rng.normal(), rng.normal());
  return v;
}

// Finite uniform grid on [0,1] with a random orthonormalized m-dim lower
// family and an optional independent upper family scaled to j_scales.
struct DiscreteFixture {
  std::vector<Point> points;
  RealVector mu;
  Matrix a_raw;
  Matrix b_orth;
};

inline DiscreteFixture make_discrete_fixture(int n_points, int m, int nb,
                                             Rng& rng,
                                             bool uniform_measure = true) {
  DiscreteFixture fix;
  fix.points.resize(static_cast<std::size_t>(n_points));
  fix.mu.resize(n_points);
  double total = 0.0;
  for (int i = 0; i < n_points; ++i) {
    fix.points[static_cast<std::size_t>(i)] =
        Point{(i + 0.5) / n_points, 0.0};
    fix.mu[i] = uniform_measure ? 1.0 : 0.2 + rng.uniform();
    total += fix.mu[i];
  }
  fix.mu /= total;
  fix.a_raw.resize(m, n_points);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n_points; ++c) {
      fix.a_raw(r, c) = Complex(rng.normal(), rng.normal());
    }
  }
  if (nb > 0) {
    Matrix braw(nb, n_points);
    for (int r = 0; r < nb; ++r) {
      for (int c = 0; c < n_points; ++c) {
        braw(r, c) = Complex(rng.normal(), rng.normal());
      }
    }
    fix.b_orth = orthonormalize_rows(braw, fix.mu);
  } else {
    fix.b_orth = Matrix(0, n_points);
  }
  return fix;
}

}  // namespace subsample::testing
