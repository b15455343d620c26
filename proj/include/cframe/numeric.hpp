#pragma once
//
// Dense small-matrix kernels over R or C.
//
// Everything is stored as std::complex<double>; a Real-field quantity is
// simply one whose imaginary parts are exactly zero. The kernels below never
// introduce a nonzero imaginary part when fed real data.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "cframe/error.hpp"

namespace cframe {

using Scalar = std::complex<double>;

enum class Field { Real, Complex };

inline const char* to_string(Field f) { return f == Field::Real ? "R" : "C"; }

/// Default relative threshold for rank decisions (times the largest column norm).
inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kEigenTolerance = 1e-12;
inline constexpr int kMaxJacobiSweeps = 40;

inline bool is_finite(const Scalar& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Scalar fill = {})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Build from nested rows; all rows must have the same length.
  static Matrix from_rows(const std::vector<std::vector<Scalar>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c)
        throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Scalar> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Scalar> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<Scalar> column(std::size_t j) const {
    std::vector<Scalar> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_column(std::size_t j, std::span<const Scalar> values) {
    if (values.size() != rows_) throw Error(ErrorCode::DimensionMismatch, "column length");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
  }

  std::span<const Scalar> data() const noexcept { return data_; }
  std::span<Scalar> data() noexcept { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Scalar& z) { return is_finite(z); });
  }
  bool is_real() const {
    return std::all_of(data_.begin(), data_.end(), [](const Scalar& z) { return z.imag() == 0.0; });
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(Scalar s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Scalar s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, Scalar s) { return a *= s; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

inline Matrix adjoint(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Scalar aik = a(i, k);
      if (aik == Scalar{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return std::sqrt(s);
}

inline double trace_real(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) s += m(i, i).real();
  return s;
}

// Euclidean vector helpers (unweighted).

inline Scalar dot(std::span<const Scalar> u, std::span<const Scalar> v) {
  Scalar s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * std::conj(v[i]);
  return s;
}

inline double norm2(std::span<const Scalar> u) {
  double s = 0.0;
  for (const auto& z : u) s += std::norm(z);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver
// ---------------------------------------------------------------------------

struct HermitianSpectrum {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
  double residual = 0.0;            // off-diagonal Frobenius norm at exit
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Converges when the off-diagonal Frobenius norm
/// drops below tol * ||M||_F.
inline HermitianSpectrum hermitian_eigenvalues(const Matrix& input, double tol = kEigenTolerance,
                                               int max_sweeps = kMaxJacobiSweeps) {
  if (input.rows() != input.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix not square");
  if (!input.all_finite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
  const std::size_t n = input.rows();
  const double scale = frobenius_norm(input);

  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      asym = std::max(asym, std::abs(input(i, j) - std::conj(input(j, i))));
  if (asym > tol * scale)
    throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");

  // Work on the exactly Hermitian part.
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = input(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Scalar v = 0.5 * (input(i, j) + std::conj(input(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  HermitianSpectrum out;
  double off = off_norm();
  int sweep = 0;
  while (off > tol * scale && sweep < max_sweeps) {
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double beta = std::abs(a(p, q));
        if (beta == 0.0) continue;
        const Scalar phase = a(p, q) / beta;
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        const double theta = (gamma - alpha) / (2.0 * beta);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on coordinates (p, q).
        const Scalar jpp = c;
        const Scalar jpq = s;
        const Scalar jqp = -s * std::conj(phase);
        const Scalar jqq = c * std::conj(phase);
        // A <- A J
        for (std::size_t k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
        // A <- J^H A
        for (std::size_t k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
    off = off_norm();
  }
  if (off > tol * scale)
    throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exhausted",
                "off-diagonal norm " + std::to_string(off));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  out.residual = off;
  out.sweeps = sweep;
  return out;
}

// ---------------------------------------------------------------------------
// Determinant
// ---------------------------------------------------------------------------

/// LU with partial pivoting. Singular input yields exactly zero.
inline Scalar determinant(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix not square");
  const std::size_t n = m.rows();
  Matrix lu = m;
  Scalar det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(lu(i, k));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      det = -det;
    }
    det *= lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Scalar f = lu(i, k) / lu(k, k);
      if (f == Scalar{}) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Pivoted orthogonalization, rank, complements
// ---------------------------------------------------------------------------

struct PivotedBasis {
  Matrix q;                         // ambient x rank, orthonormal columns
  std::vector<std::size_t> pivots;  // input columns selected, in selection order
  std::vector<double> diagonal;     // residual norm of each pivot when selected
  std::size_t rank = 0;
};

namespace detail {

// Project v against the first `count` columns of q, twice.
inline void orthogonalize_against(const Matrix& q, std::size_t count, std::vector<Scalar>& v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < count; ++j) {
      Scalar c{};
      for (std::size_t i = 0; i < v.size(); ++i) c += v[i] * std::conj(q(i, j));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q(i, j);
    }
  }
}

}  // namespace detail

/// Gram-Schmidt with column pivoting (largest remaining residual first) and
/// reorthogonalization. A column counts toward the rank while its residual
/// norm exceeds tol * (largest input column norm).
inline PivotedBasis pivoted_orthonormalize(const Matrix& columns, double tol = kRankTolerance) {
  const std::size_t m = columns.rows();
  const std::size_t k = columns.cols();
  PivotedBasis out;
  out.q = Matrix(m, std::min(m, k));

  std::vector<std::vector<Scalar>> residual(k);
  double largest = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    residual[j] = columns.column(j);
    largest = std::max(largest, norm2(residual[j]));
  }
  const double threshold = tol * largest;
  std::vector<bool> used(k, false);

  while (out.rank < std::min(m, k)) {
    std::size_t best = k;
    double best_norm = threshold;
    for (std::size_t j = 0; j < k; ++j) {
      if (used[j]) continue;
      std::vector<Scalar> r = residual[j];
      detail::orthogonalize_against(out.q, out.rank, r);
      const double rn = norm2(r);
      residual[j] = std::move(r);
      if (rn > best_norm) {
        best_norm = rn;
        best = j;
      }
    }
    if (best == k || largest == 0.0) break;
    used[best] = true;
    for (std::size_t i = 0; i < m; ++i) out.q(i, out.rank) = residual[best][i] / best_norm;
    out.pivots.push_back(best);
    out.diagonal.push_back(best_norm);
    ++out.rank;
  }
  Matrix trimmed(m, out.rank);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < out.rank; ++j) trimmed(i, j) = out.q(i, j);
  out.q = std::move(trimmed);
  return out;
}

inline std::size_t numeric_rank(const Matrix& columns, double tol = kRankTolerance) {
  return pivoted_orthonormalize(columns, tol).rank;
}

/// Orthonormal basis (as columns) of the orthogonal complement of the span
/// of `vectors`' columns in F^ambient_dim. Completion vectors are drawn from
/// the standard basis, largest residual first.
inline Matrix orthonormal_complement_basis(const Matrix& vectors, std::size_t ambient_dim,
                                           double tol = kRankTolerance) {
  if (vectors.cols() > 0 && vectors.rows() != ambient_dim)
    throw Error(ErrorCode::DimensionMismatch, "vector length differs from ambient dimension");
  if (vectors.cols() > ambient_dim)
    throw Error(ErrorCode::DimensionMismatch, "more vectors than ambient dimension");
  PivotedBasis span = vectors.cols() == 0 ? PivotedBasis{Matrix(ambient_dim, 0), {}, {}, 0}
                                          : pivoted_orthonormalize(vectors, tol);
  const std::size_t target = ambient_dim - span.rank;
  Matrix q(ambient_dim, ambient_dim);
  for (std::size_t i = 0; i < ambient_dim; ++i)
    for (std::size_t j = 0; j < span.rank; ++j) q(i, j) = span.q(i, j);
  std::size_t count = span.rank;

  std::vector<bool> taken(ambient_dim, false);
  for (std::size_t step = 0; step < target; ++step) {
    std::size_t best = ambient_dim;
    double best_norm = -1.0;
    std::vector<Scalar> best_vec;
    for (std::size_t e = 0; e < ambient_dim; ++e) {
      if (taken[e]) continue;
      std::vector<Scalar> r(ambient_dim);
      r[e] = 1.0;
      detail::orthogonalize_against(q, count, r);
      const double rn = norm2(r);
      if (rn > best_norm) {
        best_norm = rn;
        best = e;
        best_vec = std::move(r);
      }
    }
    taken[best] = true;
    for (std::size_t i = 0; i < ambient_dim; ++i) q(i, count) = best_vec[i] / best_norm;
    ++count;
  }
  Matrix out(ambient_dim, target);
  for (std::size_t i = 0; i < ambient_dim; ++i)
    for (std::size_t j = 0; j < target; ++j) out(i, j) = q(i, span.rank + j);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Horner evaluation of ascending coefficients.
template <typename T>
T evaluate_polynomial(std::span<const T> coefficients, double t) {
  T acc{};
  for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * t + coefficients[k];
  return acc;
}

/// `count` Chebyshev points of the first kind mapped onto [a, b].
inline std::vector<double> chebyshev_nodes(std::size_t count, double a, double b) {
  std::vector<double> nodes(count);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < count; ++i)
    nodes[i] = mid + half * std::cos((2.0 * static_cast<double>(i) + 1.0) * std::numbers::pi /
                                     (2.0 * static_cast<double>(count)));
  return nodes;
}

/// Monomial coefficients (ascending) of the interpolant through the samples.
///
/// The nodes are first mapped affinely onto [-1, 1]; Newton divided
/// differences are taken there and expanded, and the result is substituted
/// back into t. Trailing coefficients that are negligible against the largest
/// one are dropped.
inline std::vector<Scalar> interpolate_polynomial(std::span<const std::pair<double, Scalar>> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "no interpolation samples");
  double tscale = 0.0;
  double lo = samples[0].first, hi = samples[0].first;
  for (const auto& s : samples) {
    if (!std::isfinite(s.first) || !is_finite(s.second))
      throw Error(ErrorCode::InvalidArgument, "non-finite interpolation sample");
    tscale = std::max(tscale, std::abs(s.first));
    lo = std::min(lo, s.first);
    hi = std::max(hi, s.first);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(samples[i].first - samples[j].first) <=
          4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, tscale))
        throw Error(ErrorCode::DuplicateNodes, "interpolation nodes must be distinct");

  // s = alpha t + beta maps [lo, hi] onto [-1, 1].
  const double half = n > 1 ? 0.5 * (hi - lo) : 1.0;
  const double alpha = 1.0 / half;
  const double beta = n > 1 ? -0.5 * (hi + lo) / half : -lo;
  std::vector<double> s(n);
  std::vector<Scalar> dd(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = alpha * samples[i].first + beta;
    dd[i] = samples[i].second;
  }
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = n - 1; i >= k; --i) dd[i] = (dd[i] - dd[i - 1]) / (s[i] - s[i - k]);

  // Newton form -> monomials in s.
  std::vector<Scalar> in_s(1, dd[n - 1]);
  for (std::size_t k = n - 1; k-- > 0;) {
    std::vector<Scalar> next(in_s.size() + 1, Scalar{});
    for (std::size_t j = 0; j < in_s.size(); ++j) {
      next[j + 1] += in_s[j];
      next[j] -= s[k] * in_s[j];
    }
    next[0] += dd[k];
    in_s = std::move(next);
  }
  // Substitute s = alpha t + beta by Horner's rule.
  std::vector<Scalar> coeffs(1, in_s.back());
  for (std::size_t k = in_s.size() - 1; k-- > 0;) {
    std::vector<Scalar> next(coeffs.size() + 1, Scalar{});
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      next[j + 1] += alpha * coeffs[j];
      next[j] += beta * coeffs[j];
    }
    next[0] += in_s[k];
    coeffs = std::move(next);
  }

  double largest = 0.0;
  for (const auto& c : coeffs) largest = std::max(largest, std::abs(c));
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-12 * largest) coeffs.pop_back();
  return coeffs;
}

}  // namespace cframe
