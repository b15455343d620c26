#pragma once
//
// Paths on St(n, H), H = L^2(X, mu; F): decomposition into free systems,
// span membership, two-segment polygonal connection, Gram-Schmidt retraction
// and polynomial-path density probes.
//

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cframe/error.hpp"
#include "cframe/measure.hpp"
#include "cframe/numeric.hpp"

namespace cframe {

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

/// Components are linearly independent: the sqrt(mu)-weighted column rank is n.
inline bool in_stiefel(const StiefelTuple& h, double tol = kRankTolerance) {
  if (h.ambient() < h.n()) return false;
  return weighted_rank(*h.space(), h.components(), tol) == h.n();
}

inline double gram_determinant(const StiefelTuple& h) { return determinant(h.gram()).real(); }

/// Orthonormal: ||Gram - I||_F <= tol.
inline bool in_orthonormal_stiefel(const StiefelTuple& h, double tol = 1e-10) {
  return frobenius_norm(h.gram() - Matrix::identity(h.n())) <= tol;
}

namespace detail {

inline void require_same_shape(const StiefelTuple& a, const StiefelTuple& b, const char* what) {
  if (a.n() != b.n() || a.ambient() != b.ambient())
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": tuple shapes differ");
}

inline double max_abs_entry(const Matrix& m) {
  double best = 0.0;
  for (const auto& z : m.data()) best = std::max(best, std::abs(z));
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Decomposition into free systems
// ---------------------------------------------------------------------------

struct Decomposition {
  std::vector<StiefelTuple> parts;               // 1 or 2 independent tuples summing to the input
  std::size_t rank = 0;                          // dim span{x_1, ..., x_n}
  std::vector<std::size_t> independent_slots;    // maximal independent subset, ascending
  std::vector<std::size_t> completion_atoms;     // atoms whose indicators complete the subset
};

/// Writes a nonzero n-tuple as a sum of e independent n-tuples, e = 1 when the
/// tuple is already free and e = 2 otherwise:
///   x = (x_J / 2, b) + (x_J / 2, x_rest - b)
/// with x_J a maximal independent subset and b completion vectors. The
/// completion vectors are scaled standard basis vectors (power-of-two scale),
/// so the two parts add back to x exactly whenever x_rest - b is exact.
inline Decomposition decompose_into_free_systems(const StiefelTuple& x, double tol = kRankTolerance) {
  const std::size_t n = x.n();
  const std::size_t m = x.ambient();
  const SpacePtr& space = x.space();
  if (m < n) throw Error(ErrorCode::AmbientTooSmall, "dim H >= n", "dim H = " + std::to_string(m));
  const double largest = detail::max_abs_entry(x.components());
  if (largest == 0.0) throw Error(ErrorCode::ZeroTuple, "tuple must be nonzero");

  const Matrix weighted = detail::weighted_rows(*space, x.components());
  PivotedBasis basis = pivoted_orthonormalize(weighted, tol);

  Decomposition out;
  out.rank = basis.rank;
  out.independent_slots = basis.pivots;
  std::sort(out.independent_slots.begin(), out.independent_slots.end());
  if (basis.rank == n) {
    out.parts.push_back(x);
    return out;
  }

  // Extend the orthonormal basis of span{x_J} with sqrt(mu)-scaled indicator
  // directions, largest residual first.
  Matrix q(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < basis.rank; ++j) q(i, j) = basis.q(i, j);
  std::size_t count = basis.rank;
  std::vector<bool> taken(m, false);
  for (std::size_t step = basis.rank; step < n; ++step) {
    std::size_t best = m;
    double best_norm = -1.0;
    std::vector<Scalar> best_vec;
    for (std::size_t e = 0; e < m; ++e) {
      if (taken[e]) continue;
      std::vector<Scalar> r(m);
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
    for (std::size_t i = 0; i < m; ++i) q(i, count) = best_vec[i] / best_norm;
    ++count;
    out.completion_atoms.push_back(best);
  }

  const double scale = std::exp2(std::round(std::log2(largest)));
  Matrix first(m, n);
  Matrix second(m, n);
  std::vector<bool> independent(n, false);
  for (auto s : out.independent_slots) independent[s] = true;
  std::size_t next_completion = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (independent[k]) {
      for (std::size_t i = 0; i < m; ++i) {
        first(i, k) = 0.5 * x.components()(i, k);
        second(i, k) = 0.5 * x.components()(i, k);
      }
    } else {
      const std::size_t atom = out.completion_atoms[next_completion++];
      for (std::size_t i = 0; i < m; ++i) {
        const Scalar b = i == atom ? Scalar(scale) : Scalar{};
        first(i, k) = b;
        second(i, k) = x.components()(i, k) - b;
      }
    }
  }
  out.parts.emplace_back(space, std::move(first));
  out.parts.emplace_back(space, std::move(second));
  for (const auto& p : out.parts)
    if (!in_stiefel(p, tol))
      throw Error(ErrorCode::VerificationFailed, "decomposition summand failed the rank test");
  return out;
}

// ---------------------------------------------------------------------------
// Span membership
// ---------------------------------------------------------------------------

/// Membership of sum_u coeffs[u] * generators[u] in St(n, H). When every
/// generator is free and the joint component family is free, the answer is
/// always true; the preconditions are checked and reported.
inline bool span_membership_check(const std::vector<StiefelTuple>& generators, const std::vector<Scalar>& coeffs,
                                  double tol = kRankTolerance) {
  if (generators.empty()) throw Error(ErrorCode::InvalidArgument, "no generators");
  if (generators.size() != coeffs.size())
    throw Error(ErrorCode::DimensionMismatch, "one coefficient per generator");
  if (std::all_of(coeffs.begin(), coeffs.end(), [](const Scalar& c) { return c == Scalar{}; }))
    throw Error(ErrorCode::InvalidArgument, "coefficients must not all vanish");
  const auto& first = generators.front();
  const std::size_t n = first.n();
  const std::size_t m = first.ambient();
  for (const auto& g : generators) {
    detail::require_same_shape(first, g, "span_membership_check");
    if (!in_stiefel(g, tol)) throw Error(ErrorCode::NotIndependent, "each generator must lie in St(n,H)");
  }
  Matrix joint(m, n * generators.size());
  for (std::size_t j = 0; j < generators.size(); ++j)
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t k = 0; k < n; ++k) joint(x, j * n + k) = generators[j].components()(x, k);
  if (weighted_rank(*first.space(), joint, tol) != joint.cols())
    throw Error(ErrorCode::ComponentsNotFree, "joint component family (a(j)_k) must be free");

  StiefelTuple sum = StiefelTuple::zero(first.space(), n);
  for (std::size_t j = 0; j < generators.size(); ++j) sum += coeffs[j] * generators[j];
  return in_stiefel(sum, tol);
}

// ---------------------------------------------------------------------------
// Polygonal paths
// ---------------------------------------------------------------------------

/// Concatenation of straight segments between consecutive breakpoints,
/// parametrized uniformly over [0, 1].
class PolygonalPath {
 public:
  explicit PolygonalPath(std::vector<StiefelTuple> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a path needs at least one segment");
    for (const auto& b : breakpoints_) detail::require_same_shape(breakpoints_.front(), b, "PolygonalPath");
  }

  std::size_t segments() const noexcept { return breakpoints_.size() - 1; }
  const std::vector<StiefelTuple>& breakpoints() const noexcept { return breakpoints_; }

  /// Point at local parameter t in [0, 1] of segment k.
  StiefelTuple segment_point(std::size_t k, double t) const {
    if (k >= segments()) throw Error(ErrorCode::InvalidArgument, "segment index out of range");
    if (t == 0.0) return breakpoints_[k];
    if (t == 1.0) return breakpoints_[k + 1];
    return (1.0 - t) * breakpoints_[k] + t * breakpoints_[k + 1];
  }

  StiefelTuple at(double s) const {
    const double q = static_cast<double>(segments());
    const double scaled = std::clamp(s, 0.0, 1.0) * q;
    const auto k = std::min(static_cast<std::size_t>(scaled), segments() - 1);
    return segment_point(k, scaled - static_cast<double>(k));
  }

 private:
  std::vector<StiefelTuple> breakpoints_;
};

struct Connection {
  PolygonalPath path;
  std::size_t complement_dimension = 0;    // codim of span{x_k, y_k, u(j)_k}
  std::size_t translation_codimension = 0; // codim of span{u(j)_k}
  std::size_t required = 0;                // n
  bool sufficient_bound_holds = false;     // translation_codimension >= 3n
};

/// Two-segment path X -> Z -> Y inside the intersection of U(j) + St(n, H).
///
/// Z is made of the first n vectors of an orthonormal basis of the complement
/// of span{x_k, y_k, u(j)_k}; every point t(Z - U) + (1 - t)(X - U) then has a
/// free joint family of components, so it stays independent.
inline Connection polygonal_connect(const StiefelTuple& x, const StiefelTuple& y,
                                    const std::vector<StiefelTuple>& translations, double tol = kRankTolerance) {
  detail::require_same_shape(x, y, "polygonal_connect");
  for (const auto& u : translations) detail::require_same_shape(x, u, "polygonal_connect");
  const std::size_t n = x.n();
  const std::size_t m = x.ambient();
  const SpacePtr& space = x.space();

  if (translations.empty()) {
    if (!in_stiefel(x, tol) || !in_stiefel(y, tol))
      throw Error(ErrorCode::NotInIntersection, "X and Y must lie in St(n,H)");
  }
  for (std::size_t j = 0; j < translations.size(); ++j) {
    if (!in_stiefel(x - translations[j], tol))
      throw Error(ErrorCode::NotInIntersection, "X - U(j) must lie in St(n,H)", "j = " + std::to_string(j));
    if (!in_stiefel(y - translations[j], tol))
      throw Error(ErrorCode::NotInIntersection, "Y - U(j) must lie in St(n,H)", "j = " + std::to_string(j));
  }

  Matrix all(m, n * (2 + translations.size()));
  Matrix us(m, n * translations.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      all(i, k) = x.components()(i, k);
      all(i, n + k) = y.components()(i, k);
      for (std::size_t j = 0; j < translations.size(); ++j) {
        all(i, 2 * n + j * n + k) = translations[j].components()(i, k);
        us(i, j * n + k) = translations[j].components()(i, k);
      }
    }
  }
  const Matrix weighted = detail::weighted_rows(*space, all);
  const std::size_t span_rank = numeric_rank(weighted, tol);
  const std::size_t u_rank = us.cols() == 0 ? 0 : weighted_rank(*space, us, tol);

  const std::size_t available = m - span_rank;
  const std::size_t u_codim = m - u_rank;
  if (available < n)
    throw Error(ErrorCode::InsufficientCodimension, "complement of span{x_k, y_k, u(j)_k} must have dimension >= n",
                "needed " + std::to_string(n) + ", available " + std::to_string(available) +
                    "; codim span{u(j)_k} = " + std::to_string(u_codim) + ", sufficient bound 3n = " +
                    std::to_string(3 * n));

  // The complement is computed in the Euclidean picture (sqrt(mu)-weighted),
  // then mapped back so the z_k are orthonormal in L^2(X, mu).
  Matrix basis(m, span_rank);
  {
    PivotedBasis pb = pivoted_orthonormalize(weighted, tol);
    basis = pb.q;
  }
  const Matrix complement = orthonormal_complement_basis(basis, m, tol);
  Matrix z(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k) z(i, k) = complement(i, k) / space->sqrt_weight(i);

  Connection out{PolygonalPath({x, StiefelTuple(space, std::move(z)), y}), available, u_codim, n, u_codim >= 3 * n};
  return out;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt retraction
// ---------------------------------------------------------------------------

struct GramSchmidtFactor {
  StiefelTuple q;
  Matrix r;  // upper triangular, positive diagonal, h = Q R
};

inline GramSchmidtFactor gram_schmidt_factor(const StiefelTuple& h, double tol = kRankTolerance) {
  if (!in_stiefel(h, tol)) throw Error(ErrorCode::NotIndependent, "tuple must lie in St(n,H)");
  const std::size_t n = h.n();
  const std::size_t m = h.ambient();
  const MeasureSpace& space = *h.space();
  Matrix q(m, n);
  Matrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Scalar> v = h.component(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const std::vector<Scalar> qj = q.column(j);
        const Scalar c = space.inner(v, qj);
        r(j, k) += c;
        for (std::size_t i = 0; i < m; ++i) v[i] -= c * qj[i];
      }
    }
    const double len = space.norm(v);
    r(k, k) = len;
    for (std::size_t i = 0; i < m; ++i) q(i, k) = v[i] / len;
  }
  return {StiefelTuple(h.space(), std::move(q)), std::move(r)};
}

/// Orthonormalization map St(n, H) -> St_o(n, H); it fixes St_o(n, H) and the
/// segment t Q + (1 - t) h = Q (t I + (1 - t) R) stays free.
inline StiefelTuple gram_schmidt_retract(const StiefelTuple& h, double tol = kRankTolerance) {
  return gram_schmidt_factor(h, tol).q;
}

// ---------------------------------------------------------------------------
// Polynomial paths
// ---------------------------------------------------------------------------

/// gamma(phi^{-1}(t)) = sum_k t^k V^k for t in [a, b]; phi is affine from
/// [0, 1] onto [a, b].
class PolynomialPath {
 public:
  PolynomialPath(std::vector<StiefelTuple> coefficients, double a = 0.0, double b = 1.0)
      : coefficients_(std::move(coefficients)), a_(a), b_(b) {
    if (coefficients_.empty()) throw Error(ErrorCode::InvalidArgument, "path needs at least one coefficient");
    if (!(a_ < b_) || !std::isfinite(a_) || !std::isfinite(b_))
      throw Error(ErrorCode::InvalidArgument, "path interval must satisfy a < b");
    for (const auto& c : coefficients_) detail::require_same_shape(coefficients_.front(), c, "PolynomialPath");
  }

  /// Straight path from -> to over [0, 1].
  static PolynomialPath straight(const StiefelTuple& from, const StiefelTuple& to) {
    return PolynomialPath({from, to - from}, 0.0, 1.0);
  }

  std::size_t degree() const noexcept { return coefficients_.size() - 1; }
  std::size_t n() const noexcept { return coefficients_.front().n(); }
  const SpacePtr& space() const noexcept { return coefficients_.front().space(); }
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  const std::vector<StiefelTuple>& coefficients() const noexcept { return coefficients_; }

  StiefelTuple at(double t) const {
    StiefelTuple acc = coefficients_.back();
    for (std::size_t k = coefficients_.size() - 1; k-- > 0;) {
      acc *= t;
      acc += coefficients_[k];
    }
    return acc;
  }

  StiefelTuple at_unit(double s) const { return at(a_ + s * (b_ - a_)); }

  /// sup over [a, b] of ||gamma'(t)||, bounded by sum_k k |t|^{k-1} ||V^k||.
  double lipschitz_bound() const {
    const double r = std::max(std::abs(a_), std::abs(b_));
    double l = 0.0;
    for (std::size_t k = 1; k < coefficients_.size(); ++k)
      l += static_cast<double>(k) * std::pow(r, static_cast<double>(k - 1)) * coefficients_[k].norm();
    return l;
  }

 private:
  std::vector<StiefelTuple> coefficients_;
  double a_;
  double b_;
};

struct GammaPolynomial {
  std::vector<double> coefficients;  // ascending powers of t
  std::size_t degree_bound = 0;      // 2 q n
  double a = 0.0;
  double b = 1.0;

  double operator()(double t) const { return evaluate_polynomial<double>(coefficients, t); }
};

/// Gamma(t) = det Gram(gamma(t)), recovered by interpolation at 2qn + 1
/// Chebyshev nodes on [a, b].
inline GammaPolynomial gamma_polynomial(const PolynomialPath& path) {
  GammaPolynomial g;
  g.degree_bound = 2 * path.degree() * path.n();
  g.a = path.lower();
  g.b = path.upper();
  const auto nodes = chebyshev_nodes(g.degree_bound + 1, g.a, g.b);
  std::vector<std::pair<double, Scalar>> samples;
  samples.reserve(nodes.size());
  for (double t : nodes) samples.emplace_back(t, Scalar(gram_determinant(path.at(t))));
  const auto coeffs = interpolate_polynomial(samples);
  g.coefficients.reserve(coeffs.size());
  for (const auto& c : coeffs) g.coefficients.push_back(c.real());
  return g;
}

struct ProbeResult {
  double t = 0.0;
  StiefelTuple point;
  std::size_t attempts = 0;
};

/// Finds t* near target_t with gamma(t*) in St(n, H) and
/// ||gamma(t*) - gamma(target_t)|| <= eps, approaching from the witness side.
///
/// Candidates are target_t + s * delta0 * 2^-k with delta0 = eps / (2 L), L the
/// path's Lipschitz bound; Gamma has at most 2qn zeros, so the scan ends.
inline ProbeResult density_probe(const PolynomialPath& path, double witness_t, double target_t, double eps,
                                 double tol = kRankTolerance) {
  auto inside = [&](double t) { return t >= path.lower() && t <= path.upper(); };
  if (!inside(witness_t) || !inside(target_t))
    throw Error(ErrorCode::InvalidArgument, "probe parameters must lie in the path interval");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!in_stiefel(path.at(witness_t), tol))
    throw Error(ErrorCode::WitnessNotFrame, "gamma(witness_t) must lie in St(n,H)");

  const StiefelTuple target = path.at(target_t);
  if (in_stiefel(target, tol)) return {target_t, target, 0};

  const double gap = std::abs(witness_t - target_t);
  const double lip = path.lipschitz_bound();
  const double delta0 = lip > 0.0 ? std::min(gap, 0.5 * eps / lip) : gap;
  const double sign = witness_t > target_t ? 1.0 : -1.0;

  std::size_t attempts = 0;
  for (int k = 0; k < 1100; ++k) {
    const double t = target_t + sign * std::ldexp(delta0, -k);
    if (t == target_t) break;
    ++attempts;
    StiefelTuple candidate = path.at(t);
    if (in_stiefel(candidate, tol) && distance(candidate, target) <= eps)
      return {t, std::move(candidate), attempts};
  }
  // Unreachable when the witness is free: Gamma vanishes at finitely many t.
  throw std::logic_error("density_probe: no free point found near target");
}

}  // namespace cframe
