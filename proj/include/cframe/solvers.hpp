#pragma once
//
// Constructive solvers: frames inside solution sets of linear and quadratic
// equations on L^2(X, mu; F^n), and density of frames in those solution sets.
//

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cframe/error.hpp"
#include "cframe/measure.hpp"
#include "cframe/numeric.hpp"
#include "cframe/stiefel.hpp"

namespace cframe {

/// T(F) = sum_x mu(x) <f_x, w_x>; `weights` is m x n.
struct GenericLinearSpec {
  Matrix weights;
};

/// S(v) = sum_x mu(x) s_x v_x on V = L^2(X, mu; F); the equation is
/// T(a_1, ..., a_n) = (S(a_1), ..., S(a_n)) acting on coordinate functions.
struct CoordinatewiseSpec {
  std::vector<Scalar> coefficients;
};

/// T(F) = sum_x mu(x) h(x) f_x, solved with a frame built on Y.
struct IntegralSpec {
  std::vector<Scalar> h;
  std::vector<std::string> y;
};

struct PartitionBlock {
  std::vector<std::string> atoms;  // X_j
  std::vector<std::string> y;      // Y_j, a subset of X_j
};

/// W(F) = (sum_{x in X_j} mu(x) h(x) f_x)_j over a partition (X_j).
struct PartitionedSpec {
  std::vector<Scalar> h;
  std::vector<PartitionBlock> blocks;
};

/// q(F) = sum_x mu(x) h(x) <b, f_x> f_x over C. The region sets are explicit
/// atom label sets inside X \ Y and are validated against the sector
/// conditions.
struct QuadraticSpec {
  std::vector<Scalar> b;
  std::vector<Scalar> h;
  double epsilon = 1.0;
  std::vector<std::string> y;
  std::vector<std::string> b1;
  std::vector<std::string> b2;
  std::vector<std::string> b3;
};

using EquationSpec = std::variant<GenericLinearSpec, CoordinatewiseSpec, IntegralSpec, PartitionedSpec, QuadraticSpec>;

/// Equation values and targets, one F^n block per partition block (a single
/// entry for the generic linear form).
using EquationValue = std::vector<std::vector<Scalar>>;

inline const char* kind_name(const EquationSpec& spec) {
  static const char* names[] = {"generic", "coordinatewise", "integral", "partitioned", "quadratic"};
  return names[spec.index()];
}

struct Certificate {
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::pair<std::string, double>> values;

  void check(std::string name, bool ok) { checks.emplace_back(std::move(name), ok); }
  void value(std::string name, double v) { values.emplace_back(std::move(name), v); }
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
  }
  /// Recorded value by name; NaN when absent.
  double find(const std::string& name) const {
    for (const auto& [k, v] : values)
      if (k == name) return v;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct SolveResult {
  FrameFamily frame;
  double residual = 0.0;
  FrameReport report;
  Certificate certificate;
};

inline constexpr double kResidualTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline void require_length(const MeasureSpace& space, const std::vector<Scalar>& v, const char* what) {
  if (v.size() != space.size())
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " needs one value per atom");
  for (const auto& z : v)
    if (!is_finite(z)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite values");
  if (space.field() == Field::Real)
    for (const auto& z : v)
      if (z.imag() != 0.0) throw Error(ErrorCode::FieldMismatch, std::string(what) + " has complex values over R");
}

inline std::vector<std::size_t> resolve_labels(const MeasureSpace& space, const std::vector<std::string>& labels,
                                               const char* what) {
  std::vector<std::size_t> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) {
    auto i = space.find(l);
    if (!i) throw Error(ErrorCode::InvalidArgument, std::string(what) + " references an unknown atom", "'" + l + "'");
    idx.push_back(*i);
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " lists an atom twice");
  return idx;
}

inline std::vector<Scalar> integral_of(const FrameFamily& f, const std::vector<Scalar>& h,
                                       const std::vector<std::size_t>& atoms) {
  std::vector<Scalar> out(f.n());
  for (auto x : atoms) {
    const Scalar c = f.space()->weight(x) * h[x];
    for (std::size_t k = 0; k < f.n(); ++k) out[k] += c * f.vectors()(x, k);
  }
  return out;
}

inline std::vector<std::size_t> all_atoms(const MeasureSpace& space) {
  std::vector<std::size_t> v(space.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

}  // namespace detail

/// Value of the equation's left-hand side at F.
inline EquationValue evaluate_equation(const EquationSpec& spec, const FrameFamily& f) {
  const MeasureSpace& space = *f.space();
  return std::visit(
      [&](const auto& s) -> EquationValue {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GenericLinearSpec>) {
          if (s.weights.rows() != space.size() || s.weights.cols() != f.n())
            throw Error(ErrorCode::DimensionMismatch, "generic form weights must be m x n");
          Scalar t{};
          for (std::size_t x = 0; x < space.size(); ++x)
            t += space.weight(x) * dot(f.vector(x), s.weights.row(x));
          return {{t}};
        } else if constexpr (std::is_same_v<S, CoordinatewiseSpec>) {
          detail::require_length(space, s.coefficients, "coordinatewise form");
          std::vector<Scalar> out(f.n());
          for (std::size_t x = 0; x < space.size(); ++x)
            for (std::size_t k = 0; k < f.n(); ++k)
              out[k] += space.weight(x) * s.coefficients[x] * f.vectors()(x, k);
          return {out};
        } else if constexpr (std::is_same_v<S, IntegralSpec>) {
          detail::require_length(space, s.h, "integral kernel h");
          return {detail::integral_of(f, s.h, detail::all_atoms(space))};
        } else if constexpr (std::is_same_v<S, PartitionedSpec>) {
          detail::require_length(space, s.h, "integral kernel h");
          EquationValue out;
          for (const auto& block : s.blocks)
            out.push_back(detail::integral_of(f, s.h, detail::resolve_labels(space, block.atoms, "partition block")));
          return out;
        } else {
          if (s.b.size() != f.n()) throw Error(ErrorCode::DimensionMismatch, "b must have length n");
          detail::require_length(space, s.h, "quadratic kernel h");
          std::vector<Scalar> out(f.n());
          for (std::size_t x = 0; x < space.size(); ++x) {
            const Scalar c = space.weight(x) * s.h[x] * dot(s.b, f.vector(x));
            for (std::size_t k = 0; k < f.n(); ++k) out[k] += c * f.vectors()(x, k);
          }
          return {out};
        }
      },
      spec);
}

inline double value_norm(const EquationValue& v) {
  double s = 0.0;
  for (const auto& block : v)
    for (const auto& z : block) s += std::norm(z);
  return std::sqrt(s);
}

inline double value_distance(const EquationValue& a, const EquationValue& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "equation value block count differs");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].size() != b[j].size()) throw Error(ErrorCode::DimensionMismatch, "equation value block length differs");
    for (std::size_t k = 0; k < a[j].size(); ++k) s += std::norm(a[j][k] - b[j][k]);
  }
  return std::sqrt(s);
}

namespace detail {

inline SolveResult finalize(const EquationSpec& spec, const EquationValue& target, FrameFamily frame,
                            Certificate cert) {
  const double residual = value_distance(evaluate_equation(spec, frame), target);
  FrameReport report = analyze(frame);
  const double bound = kResidualTolerance * (1.0 + value_norm(target));
  cert.check("residual within tolerance", residual <= bound);
  cert.check("result is a frame", report.is_frame);
  cert.value("residual", residual);
  if (residual > bound)
    throw Error(ErrorCode::VerificationFailed, "equation residual exceeds tolerance", std::to_string(residual));
  if (!report.is_frame) throw Error(ErrorCode::VerificationFailed, "constructed family is not a frame");
  return {std::move(frame), residual, std::move(report), std::move(cert)};
}

inline void require_real_target(const MeasureSpace& space, std::span<const Scalar> d) {
  for (const auto& z : d) {
    if (!is_finite(z)) throw Error(ErrorCode::InvalidArgument, "target has non-finite entries");
    if (space.field() == Field::Real && z.imag() != 0.0)
      throw Error(ErrorCode::FieldMismatch, "complex target over R");
  }
}

inline bool is_zero(std::span<const Scalar> v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar& z) { return z == Scalar{}; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear equations
// ---------------------------------------------------------------------------

/// Free tuple with T = d for a nonzero linear form T and d != 0.
///
/// Scans indicator tuples for one with T != 0, splits it into free systems
/// and rescales a summand on which T does not vanish (one exists by
/// linearity).
inline SolveResult solve_generic_linear(const SpacePtr& space, const GenericLinearSpec& spec, Scalar d) {
  const std::size_t m = space->size();
  const std::size_t n = spec.weights.cols();
  if (spec.weights.rows() != m || n == 0)
    throw Error(ErrorCode::DimensionMismatch, "generic form weights must be m x n");
  if (!spec.weights.all_finite()) throw Error(ErrorCode::InvalidArgument, "generic form weights must be finite");
  if (space->field() == Field::Real && !spec.weights.is_real())
    throw Error(ErrorCode::FieldMismatch, "complex form weights over R");
  detail::require_real_target(*space, std::span<const Scalar>(&d, 1));
  if (detail::is_zero(spec.weights.data())) throw Error(ErrorCode::ZeroForm, "T must be a non-zero linear form");
  if (d == Scalar{}) throw Error(ErrorCode::ZeroTarget, "d != 0");
  if (m < n) throw Error(ErrorCode::AmbientTooSmall, "dim L^2(X,mu;F) >= n", "dim = " + std::to_string(m));

  const EquationSpec eq = spec;
  auto form = [&](const StiefelTuple& t) { return evaluate_equation(eq, transpose_inverse(t))[0][0]; };

  std::size_t best_x = 0, best_k = 0;
  double best = -1.0;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t k = 0; k < n; ++k) {
      const double v = space->weight(x) * std::abs(spec.weights(x, k));
      if (v > best) {
        best = v;
        best_x = x;
        best_k = k;
      }
    }
  Matrix seed(m, n);
  seed(best_x, best_k) = 1.0;
  const Decomposition parts = decompose_into_free_systems(StiefelTuple(space, seed));

  const StiefelTuple* chosen = nullptr;
  Scalar chosen_value{};
  for (const auto& p : parts.parts) {
    const Scalar v = form(p);
    if (std::abs(v) > std::abs(chosen_value)) {
      chosen_value = v;
      chosen = &p;
    }
  }
  if (chosen == nullptr) throw Error(ErrorCode::VerificationFailed, "no summand with T != 0");
  StiefelTuple solution = (d / chosen_value) * *chosen;

  Certificate cert;
  cert.check("T non-zero", true);
  cert.check("dim L^2 >= n", true);
  cert.check("solution tuple is free", in_stiefel(solution));
  cert.value("decomposition_parts", static_cast<double>(parts.parts.size()));
  cert.value("seed_form_value", std::abs(form(StiefelTuple(space, seed))));
  return detail::finalize(eq, {{d}}, transpose_inverse(solution), std::move(cert));
}

/// Independent (a_1, ..., a_n) with (S(a_1), ..., S(a_n)) = d, built as
/// A = D H from h with S(h) = 1, kernel vectors of S, and a completion of d
/// to a basis of F^n.
inline SolveResult solve_coordinatewise(const SpacePtr& space, const CoordinatewiseSpec& spec,
                                        const std::vector<Scalar>& d) {
  const std::size_t m = space->size();
  const std::size_t n = d.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "target must have length n >= 1");
  detail::require_length(*space, spec.coefficients, "coordinatewise form");
  detail::require_real_target(*space, d);
  if (detail::is_zero(spec.coefficients)) throw Error(ErrorCode::ZeroForm, "S must be a non-zero linear form");
  const bool zero_target = detail::is_zero(d);
  if (!zero_target && m < n)
    throw Error(ErrorCode::AmbientTooSmall, "dim L^2(X,mu;F) >= n when d != 0", "dim = " + std::to_string(m));
  if (zero_target && m < n + 1)
    throw Error(ErrorCode::AmbientTooSmall, "dim L^2(X,mu;F) >= n+1 when d = 0", "dim = " + std::to_string(m));

  // S(e_j) = mu_j s_j on indicator vectors.
  std::vector<Scalar> s_of_e(m);
  std::size_t pivot = 0;
  for (std::size_t j = 0; j < m; ++j) {
    s_of_e[j] = space->weight(j) * spec.coefficients[j];
    if (std::abs(s_of_e[j]) > std::abs(s_of_e[pivot])) pivot = j;
  }
  std::vector<Scalar> h(m);
  h[pivot] = 1.0 / s_of_e[pivot];
  // e_i - (S(e_i) / S(e_pivot)) e_pivot, i != pivot, spans Ker S.
  std::vector<std::vector<Scalar>> kernel;
  for (std::size_t i = 0; i < m && kernel.size() < n; ++i) {
    if (i == pivot) continue;
    std::vector<Scalar> k(m);
    k[i] = 1.0;
    k[pivot] = -s_of_e[i] / s_of_e[pivot];
    kernel.push_back(std::move(k));
  }

  Matrix a(m, n);
  if (zero_target) {
    for (std::size_t i = 0; i < n; ++i) a.set_column(i, kernel[i]);
  } else {
    std::size_t dp = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(d[i]) > std::abs(d[dp])) dp = i;
    // D = [d | e_i (i != dp)], invertible since d_dp != 0.
    Matrix dm(n, n);
    for (std::size_t i = 0; i < n; ++i) dm(i, 0) = d[i];
    std::size_t col = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == dp) continue;
      dm(i, col++) = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Scalar> ai(m);
      for (std::size_t x = 0; x < m; ++x) {
        Scalar v = dm(i, 0) * h[x];
        for (std::size_t c = 1; c < n; ++c) v += dm(i, c) * kernel[c - 1][x];
        ai[x] = v;
      }
      a.set_column(i, ai);
    }
  }
  StiefelTuple solution(space, std::move(a));
  Certificate cert;
  cert.check("S non-zero", true);
  cert.check(zero_target ? "dim L^2 >= n+1" : "dim L^2 >= n", true);
  cert.check("solution tuple is free", in_stiefel(solution));
  return detail::finalize(spec, {d}, transpose_inverse(solution), std::move(cert));
}

namespace detail {

struct BlockLayout {
  std::vector<std::size_t> atoms;       // X_j
  std::vector<std::size_t> y;           // Y_j
  std::vector<std::size_t> off_y;       // X_j \ Y_j
};

// Orthonormal indicator frame on Y-atoms for basis vectors [first, first+count),
// then extension phi_x = conj(h(x)) / ||h||^2_{X_j \ Y_j} (d_j - sum_{Y_j} mu h phi)
// on X_j \ Y_j. Returns ||d_j - c_j||^2 / ||h||^2 for the upper-bound certificate.
inline double fill_block(const MeasureSpace& space, const std::vector<Scalar>& h, const BlockLayout& block,
                         std::size_t first, std::size_t count, std::span<const Scalar> d, Matrix& phi) {
  const std::size_t n = phi.cols();
  for (std::size_t p = 0; p < count; ++p) phi(block.y[p], first + p) = 1.0 / space.sqrt_weight(block.y[p]);
  std::vector<Scalar> c(n);
  for (auto y : block.y)
    for (std::size_t k = 0; k < n; ++k) c[k] += space.weight(y) * h[y] * phi(y, k);
  double hnorm2 = 0.0;
  for (auto x : block.off_y) hnorm2 += space.weight(x) * std::norm(h[x]);
  std::vector<Scalar> rhs(n);
  double rhs2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    rhs[k] = d[k] - c[k];
    rhs2 += std::norm(rhs[k]);
  }
  for (auto x : block.off_y) {
    const Scalar f = std::conj(h[x]) / hnorm2;
    for (std::size_t k = 0; k < n; ++k) phi(x, k) = f * rhs[k];
  }
  return rhs2 / hnorm2;
}

inline double off_y_mass(const MeasureSpace& space, const std::vector<Scalar>& h, const BlockLayout& block) {
  double s = 0.0;
  for (auto x : block.off_y)
    if (h[x] != Scalar{}) s += space.weight(x);
  return s;
}

inline BlockLayout make_block(const MeasureSpace& space, const std::vector<std::size_t>& atoms,
                              const std::vector<std::string>& y_labels, const char* what) {
  BlockLayout b;
  b.atoms = atoms;
  b.y = resolve_labels(space, y_labels, what);
  for (auto y : b.y)
    if (!std::binary_search(atoms.begin(), atoms.end(), y))
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be contained in its block",
                  "'" + space.atom(y).label + "'");
  for (auto x : atoms)
    if (!std::binary_search(b.y.begin(), b.y.end(), x)) b.off_y.push_back(x);
  return b;
}

}  // namespace detail

/// Frame Phi with sum_x mu h(x) phi_x = d: an orthonormal indicator frame on n
/// atoms of Y, extended by the single vector needed to hit d on X \ Y.
inline SolveResult solve_integral_linear(const SpacePtr& space, const IntegralSpec& spec,
                                         const std::vector<Scalar>& d) {
  const std::size_t n = d.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "target must have length n >= 1");
  detail::require_length(*space, spec.h, "integral kernel h");
  detail::require_real_target(*space, d);
  const auto block = detail::make_block(*space, detail::all_atoms(*space), spec.y, "Y");
  if (block.y.size() < n)
    throw Error(ErrorCode::HypothesisViolated, "dim L^2(Y,mu;F) >= n",
                "|Y| = " + std::to_string(block.y.size()) + ", n = " + std::to_string(n));
  if (!(detail::off_y_mass(*space, spec.h, block) > 0.0))
    throw Error(ErrorCode::HypothesisViolated, "mu((X\\Y) ∩ h^-1(F*)) > 0");

  Matrix phi(space->size(), n);
  const double extension = detail::fill_block(*space, spec.h, block, 0, n, d, phi);
  Certificate cert;
  cert.check("dim L^2(Y) >= n", true);
  cert.check("mu((X\\Y) ∩ h^-1(F*)) > 0", true);
  cert.value("frame_upper_bound_certificate", 1.0 + extension);
  return detail::finalize(spec, {d}, FrameFamily(space, std::move(phi)), std::move(cert));
}

/// Frame Phi with W(Phi) = D over a partition. Basis vectors are handed out
/// greedily, block by block, to distinct atoms of the Y_j.
inline SolveResult solve_partitioned(const SpacePtr& space, const PartitionedSpec& spec,
                                     const std::vector<std::vector<Scalar>>& targets) {
  const std::size_t l = spec.blocks.size();
  if (l == 0) throw Error(ErrorCode::InvalidArgument, "partition needs at least one block");
  if (targets.size() != l) throw Error(ErrorCode::DimensionMismatch, "one target per partition block");
  const std::size_t n = targets.front().size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "targets must have length n >= 1");
  for (const auto& d : targets) {
    if (d.size() != n) throw Error(ErrorCode::DimensionMismatch, "all block targets must have length n");
    detail::require_real_target(*space, d);
  }
  detail::require_length(*space, spec.h, "integral kernel h");

  std::vector<detail::BlockLayout> blocks;
  std::vector<int> owner(space->size(), -1);
  for (std::size_t j = 0; j < l; ++j) {
    const auto atoms = detail::resolve_labels(*space, spec.blocks[j].atoms, "partition block");
    for (auto x : atoms) {
      if (owner[x] >= 0)
        throw Error(ErrorCode::InvalidArgument, "partition blocks must be disjoint", "'" + space->atom(x).label + "'");
      owner[x] = static_cast<int>(j);
    }
    blocks.push_back(detail::make_block(*space, atoms, spec.blocks[j].y, "Y_j"));
  }
  for (std::size_t x = 0; x < space->size(); ++x)
    if (owner[x] < 0)
      throw Error(ErrorCode::InvalidArgument, "partition blocks must cover every atom", "'" + space->atom(x).label + "'");

  std::size_t y_total = 0;
  for (std::size_t j = 0; j < l; ++j) {
    if (!(detail::off_y_mass(*space, spec.h, blocks[j]) > 0.0))
      throw Error(ErrorCode::HypothesisViolated, "mu((X_j\\Y_j) ∩ h^-1(F*)) > 0", "block " + std::to_string(j));
    y_total += blocks[j].y.size();
  }
  if (y_total < n)
    throw Error(ErrorCode::HypothesisViolated, "sum_j dim L^2(Y_j,mu;F) >= n",
                "sum = " + std::to_string(y_total) + ", n = " + std::to_string(n));

  Matrix phi(space->size(), n);
  std::size_t next = 0;
  double upper = 1.0;
  std::vector<std::size_t> frame_atoms;
  std::size_t frame_blocks = 0;
  for (std::size_t j = 0; j < l; ++j) {
    const std::size_t count = std::min(blocks[j].y.size(), n - next);
    upper += detail::fill_block(*space, spec.h, blocks[j], next, count, targets[j], phi);
    for (std::size_t p = 0; p < count; ++p) frame_atoms.push_back(blocks[j].y[p]);
    if (count > 0) ++frame_blocks;
    next += count;
  }

  // Lower-bound certificate: the indicator atoms alone form a Parseval frame.
  Matrix lower_part(space->size(), n);
  for (auto y : frame_atoms)
    for (std::size_t k = 0; k < n; ++k) lower_part(y, k) = phi(y, k);
  const Matrix s_low = frame_operator_matrix(FrameFamily(space, lower_part));
  const double lower_defect = frobenius_norm(s_low - Matrix::identity(n));

  Certificate cert;
  cert.check("blocks partition X", true);
  cert.check("sum_j dim L^2(Y_j) >= n", true);
  cert.check("frame blocks reproduce ||v||^2", lower_defect <= 1e-12 * std::sqrt(static_cast<double>(n)));
  cert.value("frame_blocks", static_cast<double>(frame_blocks));
  cert.value("frame_upper_bound_certificate", upper);
  FrameFamily frame(space, std::move(phi));
  SolveResult result = detail::finalize(spec, targets, std::move(frame), std::move(cert));
  result.certificate.check("upper bound certificate holds", result.report.upper <= upper * (1.0 + 1e-9));
  return result;
}

// ---------------------------------------------------------------------------
// Quadratic equation
// ---------------------------------------------------------------------------

enum class QuadraticBranch { NonzeroTarget, SectorPair, RealAxis };

inline const char* to_string(QuadraticBranch b) {
  switch (b) {
    case QuadraticBranch::NonzeroTarget: return "d!=0";
    case QuadraticBranch::SectorPair: return "d=0:B1,B2";
    case QuadraticBranch::RealAxis: return "d=0:B3";
  }
  return "?";
}

/// Frame Phi in q^{-1}({d}), q(F) = sum_x mu h(x) <b, f_x> f_x over C.
///
/// An a-tight indicator frame is placed on Y with a = eps / (2 ||h||_inf^2 ||b||^2);
/// the region atoms then carry multiples g(x) v of one vector v, where g is
/// normalized so that sum_{X\Y} mu h g^2 times the bracketed factor equals -1.
inline SolveResult solve_quadratic(const SpacePtr& space, const QuadraticSpec& spec, const std::vector<Scalar>& d) {
  if (space->field() != Field::Complex)
    throw Error(ErrorCode::FieldMismatch, "the quadratic equation is posed over C");
  const std::size_t n = d.size();
  const std::size_t m = space->size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "target must have length n >= 1");
  if (spec.b.size() != n) throw Error(ErrorCode::DimensionMismatch, "b must have length n");
  detail::require_length(*space, spec.h, "quadratic kernel h");
  detail::require_real_target(*space, d);
  for (const auto& z : spec.b)
    if (!is_finite(z)) throw Error(ErrorCode::InvalidArgument, "b has non-finite entries");
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (detail::is_zero(spec.b)) throw Error(ErrorCode::HypothesisViolated, "b != 0");

  const auto y = detail::resolve_labels(*space, spec.y, "Y");
  const auto b1 = detail::resolve_labels(*space, spec.b1, "B1");
  const auto b2 = detail::resolve_labels(*space, spec.b2, "B2");
  const auto b3 = detail::resolve_labels(*space, spec.b3, "B3");
  if (y.size() < n)
    throw Error(ErrorCode::HypothesisViolated, "dim L^2(Y,mu;C) >= n",
                "|Y| = " + std::to_string(y.size()) + ", n = " + std::to_string(n));
  auto check_outside_y = [&](const std::vector<std::size_t>& set, const char* name) {
    for (auto x : set)
      if (std::binary_search(y.begin(), y.end(), x))
        throw Error(ErrorCode::HypothesisViolated, std::string(name) + " must lie in X\\Y",
                    "'" + space->atom(x).label + "'");
  };
  check_outside_y(b1, "B1");
  check_outside_y(b2, "B2");
  check_outside_y(b3, "B3");

  const Scalar bd = dot(spec.b, d);  // <b, d>
  const bool zero_target = detail::is_zero(d);
  const double eps = spec.epsilon;
  auto label = [&](std::size_t x) { return "'" + space->atom(x).label + "'"; };

  QuadraticBranch branch;
  if (!zero_target) {
    branch = QuadraticBranch::NonzeroTarget;
    if (b1.empty()) throw Error(ErrorCode::HypothesisViolated, "mu((X\\Y) ∩ h^-1(B1)) > 0");
    if (b2.empty()) throw Error(ErrorCode::HypothesisViolated, "mu((X\\Y) ∩ h^-1(B2)) > 0");
    for (auto x : b1) {
      const Scalar z = bd * spec.h[x];
      if (!(z.real() > eps && z.imag() < -eps))
        throw Error(ErrorCode::HypothesisViolated, "B1: Re(<b,d>h) > eps and Im(<b,d>h) < -eps", label(x));
    }
    for (auto x : b2) {
      const Scalar z = bd * spec.h[x];
      if (!(z.real() > eps && z.imag() > eps))
        throw Error(ErrorCode::HypothesisViolated, "B2: Re(<b,d>h) > eps and Im(<b,d>h) > eps", label(x));
    }
  } else {
    for (auto x : y)
      if (!(spec.h[x].imag() == 0.0 && spec.h[x].real() < 0.0))
        throw Error(ErrorCode::HypothesisViolated, "h < 0 on Y", label(x));
    if (!b1.empty() && !b2.empty()) {
      branch = QuadraticBranch::SectorPair;
      for (auto x : b1)
        if (!(spec.h[x].real() > 0.0 && spec.h[x].imag() < 0.0))
          throw Error(ErrorCode::HypothesisViolated, "B1: Re(h) > 0 and Im(h) < 0", label(x));
      for (auto x : b2)
        if (!(spec.h[x].real() > 0.0 && spec.h[x].imag() > 0.0))
          throw Error(ErrorCode::HypothesisViolated, "B2: Re(h) > 0 and Im(h) > 0", label(x));
    } else if (!b3.empty()) {
      branch = QuadraticBranch::RealAxis;
      for (auto x : b3)
        if (!(spec.h[x].real() > 0.0 && spec.h[x].imag() == 0.0))
          throw Error(ErrorCode::HypothesisViolated, "B3: Re(h) > 0 and Im(h) = 0", label(x));
    } else {
      throw Error(ErrorCode::HypothesisViolated,
                  "mu((X\\Y) ∩ h^-1(B1)), mu((X\\Y) ∩ h^-1(B2)) > 0 or mu((X\\Y) ∩ h^-1(B3)) > 0");
    }
  }

  double hinf = 0.0;
  for (const auto& z : spec.h) hinf = std::max(hinf, std::abs(z));
  const double b2norm = norm2(spec.b) * norm2(spec.b);
  const double tight_bound = eps / (hinf * hinf * b2norm);
  const double a = 0.5 * tight_bound;

  // a-tight frame on the first n atoms of Y.
  Matrix phi(m, n);
  for (std::size_t i = 0; i < n; ++i) phi(y[i], i) = std::sqrt(a) / space->sqrt_weight(y[i]);

  // w = sum_Y mu h <b, phi_y> phi_y and <b, w> = sum_Y mu conj(h) |<b, phi_y>|^2.
  std::vector<Scalar> w(n);
  for (auto yy : y) {
    const Scalar c = space->weight(yy) * spec.h[yy] * dot(spec.b, phi.row(yy));
    for (std::size_t k = 0; k < n; ++k) w[k] += c * phi(yy, k);
  }
  const Scalar bw = dot(spec.b, w);
  const Scalar kappa = zero_target ? -bw : bd - bw;

  std::vector<Scalar> htil(m);
  for (std::size_t x = 0; x < m; ++x) htil[x] = kappa * spec.h[x];

  std::vector<double> g(m, 0.0);
  double normalizer = 0.0;
  if (branch == QuadraticBranch::RealAxis) {
    double n3 = 0.0;
    for (auto x : b3) {
      if (!(htil[x].real() > 0.0))
        throw Error(ErrorCode::VerificationFailed, "h~ must be positive on B3", label(x));
      n3 += space->weight(x) * htil[x].real() * htil[x].real();
    }
    const double len = std::sqrt(n3);
    for (auto x : b3) g[x] = std::sqrt(htil[x].real()) / len;
    normalizer = 1.0;
  } else {
    double n1 = 0.0, p1 = 0.0, n2 = 0.0, p2 = 0.0;
    for (auto x : b1) {
      if (!(htil[x].real() > 0.0 && htil[x].imag() < 0.0))
        throw Error(ErrorCode::VerificationFailed, "h~ left the B1 sector", label(x));
      n1 += space->weight(x) * htil[x].imag() * htil[x].imag();
      p1 += space->weight(x) * (-htil[x].imag()) * htil[x].real();
    }
    for (auto x : b2) {
      if (!(htil[x].real() > 0.0 && htil[x].imag() > 0.0))
        throw Error(ErrorCode::VerificationFailed, "h~ left the B2 sector", label(x));
      n2 += space->weight(x) * htil[x].imag() * htil[x].imag();
      p2 += space->weight(x) * htil[x].imag() * htil[x].real();
    }
    normalizer = 1.0 / (p1 / n1 + p2 / n2);
    const double l1 = std::sqrt(n1);
    const double l2 = std::sqrt(n2);
    for (auto x : b1) g[x] = std::sqrt(normalizer) * std::sqrt(-htil[x].imag()) / l1;
    for (auto x : b2) g[x] = std::sqrt(normalizer) * std::sqrt(htil[x].imag()) / l2;
  }

  std::vector<Scalar> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = zero_target ? w[k] : -d[k] + w[k];
  Scalar hg2{};
  for (std::size_t x = 0; x < m; ++x) {
    if (g[x] == 0.0) continue;
    hg2 += space->weight(x) * spec.h[x] * g[x] * g[x];
    for (std::size_t k = 0; k < n; ++k) phi(x, k) = g[x] * v[k];
  }
  // The bracketed factor of the construction; must equal -1.
  const Scalar identity = hg2 * (zero_target ? bw : -bd + bw);

  Matrix y_part(m, n);
  for (auto yy : y)
    for (std::size_t k = 0; k < n; ++k) y_part(yy, k) = phi(yy, k);
  const Matrix s_y = frame_operator_matrix(FrameFamily(space, y_part));
  const double tight_defect = frobenius_norm(s_y - a * Matrix::identity(n));

  Certificate cert;
  cert.check("b != 0", true);
  cert.check("dim L^2(Y) >= n", true);
  cert.check("region sets satisfy the sector conditions", true);
  cert.check("a < eps / (||h||_inf^2 ||b||^2)", a < tight_bound);
  cert.check("Y-part is a-tight", tight_defect <= 1e-12 * a * std::sqrt(static_cast<double>(n)));
  cert.check("bracketed factor equals -1", std::abs(identity + 1.0) <= 1e-10);
  cert.value("tight_constant", a);
  cert.value("tight_bound", tight_bound);
  cert.value("normalizer", normalizer);
  cert.value("identity_re", identity.real());
  cert.value("identity_im", identity.imag());
  cert.value("branch", static_cast<double>(static_cast<int>(branch)));
  if (std::abs(identity + 1.0) > 1e-10)
    throw Error(ErrorCode::VerificationFailed, "bracketed factor differs from -1");
  return detail::finalize(spec, {d}, FrameFamily(space, std::move(phi)), std::move(cert));
}

/// q(lambda Phi + mu U) = 0 and q((lambda + 1) Phi + mu U) = 0 for random real
/// (lambda, mu), given q(Phi) = q(U) = q(Phi + U) = 0.
inline bool quadratic_star_check(const QuadraticSpec& spec, const FrameFamily& phi, const FrameFamily& u,
                                 std::size_t trials, std::uint64_t seed = 0) {
  const MeasureSpace& space = *phi.space();
  detail::require_length(space, spec.h, "quadratic kernel h");
  if (spec.b.size() != phi.n() || u.n() != phi.n() || u.atoms() != phi.atoms())
    throw Error(ErrorCode::DimensionMismatch, "star check families must share shape with b");
  double bnorm = 0.0;
  for (const auto& z : spec.b) bnorm += std::norm(z);
  bnorm = std::sqrt(bnorm);
  const EquationSpec eq = spec;
  auto q_residual = [&](const Matrix& f) {
    FrameFamily fam(phi.space(), f);
    double scale = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x)
      scale += space.weight(x) * std::abs(spec.h[x]) * bnorm * norm2(fam.vector(x)) * norm2(fam.vector(x));
    return std::pair{value_norm(evaluate_equation(eq, fam)), std::max(1.0, scale)};
  };
  for (const Matrix& f : {phi.vectors(), u.vectors(), phi.vectors() + u.vectors()}) {
    auto [r, scale] = q_residual(f);
    if (r > kResidualTolerance * scale)
      throw Error(ErrorCode::PreconditionResidual, "q(Phi) = q(U) = q(Phi + U) = 0 required", std::to_string(r));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const double lambda = coef(rng);
    const double mu = coef(rng);
    for (double shift : {0.0, 1.0}) {
      auto [r, scale] = q_residual((lambda + shift) * phi.vectors() + mu * u.vectors());
      if (r > kResidualTolerance * scale) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dispatch and density in solution sets
// ---------------------------------------------------------------------------

inline SolveResult solve(const SpacePtr& space, const EquationSpec& spec, const EquationValue& target) {
  auto single = [&]() -> const std::vector<Scalar>& {
    if (target.size() != 1) throw Error(ErrorCode::DimensionMismatch, "expected a single target vector");
    return target.front();
  };
  return std::visit(
      [&](const auto& s) -> SolveResult {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GenericLinearSpec>) {
          const auto& d = single();
          if (d.size() != 1) throw Error(ErrorCode::DimensionMismatch, "generic form target is a scalar");
          return solve_generic_linear(space, s, d[0]);
        } else if constexpr (std::is_same_v<S, CoordinatewiseSpec>) {
          return solve_coordinatewise(space, s, single());
        } else if constexpr (std::is_same_v<S, IntegralSpec>) {
          return solve_integral_linear(space, s, single());
        } else if constexpr (std::is_same_v<S, PartitionedSpec>) {
          return solve_partitioned(space, s, target);
        } else {
          return solve_quadratic(space, s, single());
        }
      },
      spec);
}

struct DensifyResult {
  FrameFamily frame;
  FrameFamily anchor;  // Theta, the constructed frame in the solution set
  double t = 1.0;      // probe parameter on Theta -> F
  double distance = 0.0;
  double residual = 0.0;
  bool already_free = false;
};

/// A frame G in the solution set with ||G - F|| <= eps.
///
/// The straight path from the constructed frame Theta to F stays in the
/// solution set: it is affine for the linear forms, and for q with d = 0 it
/// stays in the star domain q^{-1}(0) ∩ (q^{-1}(0) - Theta).
inline DensifyResult densify_solution_set(const SpacePtr& space, const EquationSpec& spec, const EquationValue& target,
                                          const FrameFamily& point, double eps) {
  const double tolerance = kResidualTolerance * (1.0 + value_norm(target));
  const double point_residual = value_distance(evaluate_equation(spec, point), target);
  if (point_residual > tolerance)
    throw Error(ErrorCode::ResidualTooLarge, "F must satisfy the equation", std::to_string(point_residual));
  const StiefelTuple f = transpose_isometry(point);
  if (in_stiefel(f)) return {point, point, 1.0, 0.0, point_residual, true};

  const bool quadratic = std::holds_alternative<QuadraticSpec>(spec);
  if (quadratic && value_norm(target) != 0.0)
    throw Error(ErrorCode::HypothesisViolated, "density along segments in q^-1({d}) requires d = 0");

  SolveResult theta = solve(space, spec, target);
  if (quadratic) {
    const Matrix sum = theta.frame.vectors() + point.vectors();
    const double r = value_norm(evaluate_equation(spec, FrameFamily(space, sum)));
    if (r > kResidualTolerance * (1.0 + FrameFamily(space, sum).norm_squared()))
      throw Error(ErrorCode::HypothesisViolated, "F must lie in q^-1(0) ∩ (q^-1(0) - Theta)", std::to_string(r));
  }
  const auto path = PolynomialPath::straight(transpose_isometry(theta.frame), f);
  const ProbeResult probe = density_probe(path, 0.0, 1.0, eps);
  FrameFamily g = transpose_inverse(probe.point);
  const double residual = value_distance(evaluate_equation(spec, g), target);
  const double dist = distance(probe.point, f);
  return {std::move(g), std::move(theta.frame), probe.t, dist, residual, false};
}

}  // namespace cframe
