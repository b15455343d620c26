#pragma once
//
// Discretized measure spaces, frame families and their operators.
//
// A measure space is a finite list of labelled atoms with positive weights;
// integrals over it are weighted sums, so L^2(X, mu; F) has dimension equal to
// the atom count. A frame family assigns one F^n vector to every atom.
//
// Inner products are linear in the first slot: <u, v> = sum_i u_i conj(v_i),
// and on L^2: <U, V> = sum_x mu(x) U(x) conj(V(x)).
//

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cframe/error.hpp"
#include "cframe/numeric.hpp"

namespace cframe {

struct Atom {
  std::string label;
  double weight = 1.0;
};

class MeasureSpace {
 public:
  MeasureSpace(Field field, std::vector<Atom> atoms) : field_(field), atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw Error(ErrorCode::InvalidArgument, "measure space has no atoms");
    weights_.reserve(atoms_.size());
    sqrt_weights_.reserve(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const auto& a = atoms_[i];
      if (!(a.weight > 0.0) || !std::isfinite(a.weight))
        throw Error(ErrorCode::InvalidArgument, "atom weights must be finite and positive",
                    "atom '" + a.label + "'");
      if (!index_.emplace(a.label, i).second)
        throw Error(ErrorCode::InvalidArgument, "atom labels must be unique", "'" + a.label + "'");
      weights_.push_back(a.weight);
      sqrt_weights_.push_back(std::sqrt(a.weight));
    }
  }

  /// Unit-weight (counting measure) space with labels "0", "1", ...
  static std::shared_ptr<const MeasureSpace> counting(Field field, std::size_t size) {
    std::vector<Atom> atoms(size);
    for (std::size_t i = 0; i < size; ++i) atoms[i] = {std::to_string(i), 1.0};
    return std::make_shared<const MeasureSpace>(field, std::move(atoms));
  }

  Field field() const noexcept { return field_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  /// dim L^2(X, mu; F): every atom carries positive weight.
  std::size_t l2_dimension() const noexcept { return atoms_.size(); }

  const Atom& atom(std::size_t i) const { return atoms_.at(i); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double sqrt_weight(std::size_t i) const { return sqrt_weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index_of(const std::string& label) const {
    auto idx = find(label);
    if (!idx) throw Error(ErrorCode::InvalidArgument, "unknown atom label", "'" + label + "'");
    return *idx;
  }

  /// Inner product of two per-atom sequences in L^2(X, mu; F).
  Scalar inner(std::span<const Scalar> u, std::span<const Scalar> v) const {
    check_length(u.size());
    check_length(v.size());
    Scalar s{};
    for (std::size_t x = 0; x < size(); ++x) s += weights_[x] * u[x] * std::conj(v[x]);
    return s;
  }
  double norm(std::span<const Scalar> u) const { return std::sqrt(inner(u, u).real()); }

  void check_length(std::size_t len) const {
    if (len != size())
      throw Error(ErrorCode::DimensionMismatch, "sequence length differs from atom count");
  }

 private:
  Field field_;
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
  std::vector<double> sqrt_weights_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

namespace detail {

inline void check_entries(const MeasureSpace& space, const Matrix& m, const char* what) {
  if (m.rows() != space.size())
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must have one row per atom");
  if (m.cols() == 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs n >= 1");
  if (!m.all_finite()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
  if (space.field() == Field::Real && !m.is_real())
    throw Error(ErrorCode::FieldMismatch, std::string(what) + " has complex entries over R");
}

// sqrt(mu)-weighted copy, turning the L^2 geometry into the Euclidean one.
inline Matrix weighted_rows(const MeasureSpace& space, const Matrix& m) {
  Matrix w = m;
  for (std::size_t x = 0; x < m.rows(); ++x)
    for (std::size_t k = 0; k < m.cols(); ++k) w(x, k) *= space.sqrt_weight(x);
  return w;
}

}  // namespace detail

class StiefelTuple;

/// Phi = (phi_x)_{x in X}: row x holds the F^n vector attached to atom x.
class FrameFamily {
 public:
  FrameFamily(SpacePtr space, Matrix vectors) : space_(std::move(space)), vectors_(std::move(vectors)) {
    if (!space_) throw Error(ErrorCode::InvalidArgument, "frame family without a measure space");
    detail::check_entries(*space_, vectors_, "frame family");
  }

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t n() const noexcept { return vectors_.cols(); }
  std::size_t atoms() const noexcept { return vectors_.rows(); }
  const Matrix& vectors() const noexcept { return vectors_; }
  std::span<const Scalar> vector(std::size_t x) const { return vectors_.row(x); }

  /// ||Phi||^2 in L^2(X, mu; F^n).
  double norm_squared() const {
    double s = 0.0;
    for (std::size_t x = 0; x < atoms(); ++x)
      for (std::size_t k = 0; k < n(); ++k) s += space_->weight(x) * std::norm(vectors_(x, k));
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

 private:
  SpacePtr space_;
  Matrix vectors_;
};

/// h = (h_1, ..., h_n) in H^n with H = L^2(X, mu; F): column k is h_k.
class StiefelTuple {
 public:
  StiefelTuple(SpacePtr space, Matrix components)
      : space_(std::move(space)), components_(std::move(components)) {
    if (!space_) throw Error(ErrorCode::InvalidArgument, "tuple without a measure space");
    detail::check_entries(*space_, components_, "tuple");
  }

  static StiefelTuple zero(SpacePtr space, std::size_t n) {
    const std::size_t m = space->size();
    return StiefelTuple(std::move(space), Matrix(m, n));
  }

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t n() const noexcept { return components_.cols(); }
  std::size_t ambient() const noexcept { return components_.rows(); }
  const Matrix& components() const noexcept { return components_; }
  std::vector<Scalar> component(std::size_t k) const { return components_.column(k); }

  /// Gram(h_1, ..., h_n)_{k,l} = <h_k, h_l>.
  Matrix gram() const {
    const std::size_t nn = n();
    Matrix g(nn, nn);
    for (std::size_t k = 0; k < nn; ++k)
      for (std::size_t l = k; l < nn; ++l) {
        Scalar s{};
        for (std::size_t x = 0; x < ambient(); ++x)
          s += space_->weight(x) * components_(x, k) * std::conj(components_(x, l));
        if (k == l) s = s.real();
        g(k, l) = s;
        g(l, k) = std::conj(s);
      }
    return g;
  }

  double norm_squared() const {
    double s = 0.0;
    for (std::size_t x = 0; x < ambient(); ++x)
      for (std::size_t k = 0; k < n(); ++k) s += space_->weight(x) * std::norm(components_(x, k));
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  StiefelTuple& operator+=(const StiefelTuple& o) {
    components_ += o.components_;
    return *this;
  }
  StiefelTuple& operator-=(const StiefelTuple& o) {
    components_ -= o.components_;
    return *this;
  }
  StiefelTuple& operator*=(Scalar s) {
    components_ *= s;
    return *this;
  }
  friend StiefelTuple operator+(StiefelTuple a, const StiefelTuple& b) { return a += b; }
  friend StiefelTuple operator-(StiefelTuple a, const StiefelTuple& b) { return a -= b; }
  friend StiefelTuple operator*(Scalar s, StiefelTuple a) { return a *= s; }

  friend bool operator==(const StiefelTuple& a, const StiefelTuple& b) {
    return a.components_ == b.components_;
  }

 private:
  SpacePtr space_;
  Matrix components_;
};

inline double distance(const StiefelTuple& a, const StiefelTuple& b) { return (a - b).norm(); }

/// Transpose: L^2(X, mu; F^n) -> L^2(X, mu; F)^n, F -> (F^1, ..., F^n).
inline StiefelTuple transpose_isometry(const FrameFamily& f) {
  return StiefelTuple(f.space(), f.vectors());
}
inline FrameFamily transpose_inverse(const StiefelTuple& h) { return FrameFamily(h.space(), h.components()); }

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// [S_Phi]_{ij} = sum_x mu(x) phi_x^i conj(phi_x^j), i.e. Gram(Phi^1, ..., Phi^n).
inline Matrix frame_operator_matrix(const FrameFamily& f) {
  return transpose_isometry(f).gram();
}

/// T_Phi(v) = (<v, phi_x>)_x.
inline std::vector<Scalar> apply_analysis(const FrameFamily& f, std::span<const Scalar> v) {
  if (v.size() != f.n()) throw Error(ErrorCode::DimensionMismatch, "analysis input must have length n");
  std::vector<Scalar> c(f.atoms());
  for (std::size_t x = 0; x < f.atoms(); ++x) c[x] = dot(v, f.vector(x));
  return c;
}

/// T_Phi^*(c) = sum_x mu(x) c(x) phi_x.
inline std::vector<Scalar> apply_synthesis(const FrameFamily& f, std::span<const Scalar> c) {
  if (c.size() != f.atoms())
    throw Error(ErrorCode::DimensionMismatch, "synthesis input must have one entry per atom");
  std::vector<Scalar> v(f.n());
  for (std::size_t x = 0; x < f.atoms(); ++x) {
    const Scalar wc = f.space()->weight(x) * c[x];
    for (std::size_t k = 0; k < f.n(); ++k) v[k] += wc * f.vectors()(x, k);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct Tolerances {
  double frame = 1e-10;  // A > frame * B
  double tight = 1e-9;
};

struct FrameReport {
  Matrix gram;
  double lower = 0.0;  // A = lambda_min(S)
  double upper = 0.0;  // B = lambda_max(S)
  double det_gram = 0.0;
  double tight_constant = 0.0;  // trace(S) / n
  bool is_bessel = false;
  bool is_frame = false;
  bool is_tight = false;
  bool is_parseval = false;
};

/// Frame bounds and classification flags.
///
/// With finitely many atoms every finite-valued family lies in L^2, so
/// `is_bessel` only certifies that all entries are finite.
inline FrameReport analyze(const FrameFamily& f, const Tolerances& tol = {}) {
  FrameReport r;
  r.gram = frame_operator_matrix(f);
  r.is_bessel = f.vectors().all_finite();
  const auto spectrum = hermitian_eigenvalues(r.gram);
  r.lower = spectrum.eigenvalues.front();
  r.upper = spectrum.eigenvalues.back();
  r.det_gram = determinant(r.gram).real();
  const double n = static_cast<double>(f.n());
  r.is_frame = r.is_bessel && r.upper > 0.0 && r.lower > tol.frame * r.upper;
  r.tight_constant = trace_real(r.gram) / n;
  if (r.is_frame) {
    Matrix diff = r.gram - r.tight_constant * Matrix::identity(f.n());
    r.is_tight = frobenius_norm(diff) <= tol.tight * r.tight_constant * std::sqrt(n);
    r.is_parseval = r.is_tight && std::abs(r.tight_constant - 1.0) <= tol.tight;
  }
  return r;
}

/// sqrt(A): perturbations of smaller L^2 norm cannot leave the frame set,
/// since lambda_min(S_{F+E}) >= (sqrt(A) - ||E||)^2.
inline double frame_stability_radius(const FrameFamily& f, const Tolerances& tol = {}) {
  const auto report = analyze(f, tol);
  if (!report.is_frame) throw Error(ErrorCode::NotAFrame, "family is not a frame");
  return std::sqrt(report.lower);
}

/// Rank of the sqrt(mu)-weighted m x n matrix of vectors (the coordinate
/// functions' span dimension).
inline std::size_t weighted_rank(const MeasureSpace& space, const Matrix& per_atom, double tol = kRankTolerance) {
  return numeric_rank(detail::weighted_rows(space, per_atom), tol);
}

}  // namespace cframe
