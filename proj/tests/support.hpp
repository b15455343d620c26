#pragma once
//
// Shared generators and independent oracles for the test suites. The oracles
// deliberately avoid the library's own kernels: rank is exact integer
// elimination, equation values are plain loops over atoms.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cframe/cframe.hpp"

namespace testing_support {

using cframe::Field;
using cframe::Matrix;
using cframe::Scalar;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

  Scalar scalar(Field f, double scale = 1.0) {
    if (f == Field::Real) return {real(-scale, scale), 0.0};
    return {real(-scale, scale), real(-scale, scale)};
  }

  Matrix matrix(std::size_t rows, std::size_t cols, Field f, double scale = 1.0) {
    Matrix m(rows, cols);
    for (auto& z : m.data()) z = scalar(f, scale);
    return m;
  }

  Matrix integer_matrix(std::size_t rows, std::size_t cols, int lo, int hi) {
    Matrix m(rows, cols);
    for (auto& z : m.data()) z = static_cast<double>(integer(lo, hi));
    return m;
  }

  /// Weights p/q with small integers, as doubles.
  std::shared_ptr<const cframe::MeasureSpace> space(std::size_t m, Field f, bool rational = true) {
    std::vector<cframe::Atom> atoms;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = rational ? static_cast<double>(integer(1, 9)) / static_cast<double>(integer(1, 4))
                                : real(0.25, 4.0);
      atoms.push_back({"x" + std::to_string(i), w});
    }
    return std::make_shared<const cframe::MeasureSpace>(f, std::move(atoms));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Exact rank of an integer-valued real matrix by fraction-free elimination.
inline std::size_t bareiss_rank(const Matrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<__int128>> a(rows, std::vector<__int128>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = static_cast<__int128>(std::llround(m(i, j).real()));
  std::size_t rank = 0;
  __int128 prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) a[i][j] = (a[rank][c] * a[i][j] - a[i][c] * a[rank][j]) / prev;
      a[i][c] = 0;
    }
    prev = a[rank][c];
    ++rank;
  }
  return rank;
}

/// sum_x mu(x) phi_x phi_x^H by direct summation.
inline Matrix frame_operator_oracle(const cframe::FrameFamily& f) {
  const std::size_t n = f.n();
  Matrix s(n, n);
  for (std::size_t x = 0; x < f.atoms(); ++x) {
    const double w = f.space()->weight(x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) += w * f.vectors()(x, i) * std::conj(f.vectors()(x, j));
  }
  return s;
}

/// sum_x mu(x) h(x) phi_x over the given atoms.
inline std::vector<Scalar> integral_oracle(const cframe::FrameFamily& f, const std::vector<Scalar>& h,
                                           const std::vector<std::size_t>& atoms) {
  std::vector<Scalar> out(f.n());
  for (auto x : atoms)
    for (std::size_t k = 0; k < f.n(); ++k) out[k] += f.space()->weight(x) * h[x] * f.vectors()(x, k);
  return out;
}

/// sum_x mu(x) h(x) <b, phi_x> phi_x.
inline std::vector<Scalar> quadratic_oracle(const cframe::FrameFamily& f, const std::vector<Scalar>& b,
                                            const std::vector<Scalar>& h) {
  std::vector<Scalar> out(f.n());
  for (std::size_t x = 0; x < f.atoms(); ++x) {
    Scalar bp{};
    for (std::size_t k = 0; k < f.n(); ++k) bp += b[k] * std::conj(f.vectors()(x, k));
    for (std::size_t k = 0; k < f.n(); ++k) out[k] += f.space()->weight(x) * h[x] * bp * f.vectors()(x, k);
  }
  return out;
}

inline double distance(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

inline double norm(const std::vector<Scalar>& a) { return distance(a, std::vector<Scalar>(a.size())); }

/// Smallest eigenvalue of a 1x1, 2x2 or 3x3 Hermitian matrix from the
/// characteristic polynomial (closed form, independent of the Jacobi solver).
/// Smallest |R_ii| relative to the largest column norm, from classical
/// Gram-Schmidt run twice per column. Columns are the tuple components.
inline double relative_gs_diagonal(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<std::vector<Scalar>> q;
  double largest = 0.0, smallest = INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Scalar> v(m);
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = a(i, k);
      c += std::norm(v[i]);
    }
    largest = std::max(largest, std::sqrt(c));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) {
        Scalar p{};
        for (std::size_t i = 0; i < m; ++i) p += v[i] * std::conj(e[i]);
        for (std::size_t i = 0; i < m; ++i) v[i] -= p * e[i];
      }
    double r = 0.0;
    for (const auto& z : v) r += std::norm(z);
    r = std::sqrt(r);
    smallest = std::min(smallest, r);
    if (r > 0.0) {
      for (auto& z : v) z /= r;
      q.push_back(v);
    }
  }
  return largest > 0.0 ? smallest / largest : 0.0;
}

inline double min_eigenvalue_closed_form(const Matrix& s) {
  const std::size_t n = s.rows();
  if (n == 1) return s(0, 0).real();
  if (n == 2) {
    const double a = s(0, 0).real(), d = s(1, 1).real();
    const double off = std::norm(s(0, 1));
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + off);
  }
  // Trigonometric solution of the depressed cubic.
  const double q = (s(0, 0).real() + s(1, 1).real() + s(2, 2).real()) / 3.0;
  const double p1 = std::norm(s(0, 1)) + std::norm(s(0, 2)) + std::norm(s(1, 2));
  const double p2 = std::pow(s(0, 0).real() - q, 2) + std::pow(s(1, 1).real() - q, 2) +
                    std::pow(s(2, 2).real() - q, 2) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return q;
  Matrix b = s;
  for (std::size_t i = 0; i < 3; ++i) b(i, i) -= q;
  b *= 1.0 / p;
  const Scalar det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                     b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                     b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det.real() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
}

}  // namespace testing_support
