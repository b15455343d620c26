#pragma once
//
// Random admissible equation instances for the solver tests and the
// acceptance run. Each generator draws a space, a spec satisfying the solver's
// hypotheses and a target.
//

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "support.hpp"

namespace testing_support {

struct Instance {
  cframe::SpacePtr space;
  cframe::EquationSpec spec;
  cframe::EquationValue target;
  std::size_t n = 0;
};

inline std::vector<std::string> labels_of(const cframe::MeasureSpace& s, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(s.atom(i).label);
  return out;
}

inline std::vector<std::size_t> shuffled_atoms(Rng& rng, std::size_t m) {
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng.engine());
  return p;
}

inline std::vector<Scalar> random_vector(Rng& rng, std::size_t n, Field f, bool nonzero = true) {
  std::vector<Scalar> v(n);
  do {
    for (auto& z : v) z = rng.scalar(f);
  } while (nonzero && norm(v) < 1e-3);
  return v;
}

inline Instance generic_instance(Rng& rng) {
  const Field f = rng.coin() ? Field::Real : Field::Complex;
  const std::size_t n = rng.index(1, 3);
  const std::size_t m = n + rng.index(0, 5);
  auto space = rng.space(m, f, rng.coin());
  Matrix w = rng.matrix(m, n, f);
  // Sparse forms exercise the scan over indicator tuples.
  if (rng.coin()) {
    Matrix sparse(m, n);
    sparse(rng.index(0, m - 1), rng.index(0, n - 1)) = rng.scalar(f) + Scalar(2.0);
    w = sparse;
  }
  return {space, cframe::GenericLinearSpec{w}, {{random_vector(rng, 1, f)[0]}}, n};
}

inline Instance coordinatewise_instance(Rng& rng) {
  const Field f = rng.coin() ? Field::Real : Field::Complex;
  const std::size_t n = rng.index(1, 3);
  const bool zero_target = rng.integer(0, 3) == 0;
  const std::size_t m = n + (zero_target ? 1 : 0) + rng.index(0, 4);
  auto space = rng.space(m, f, rng.coin());
  std::vector<Scalar> s = random_vector(rng, m, f);
  for (auto& z : s)
    if (rng.integer(0, 3) == 0) z = 0.0;
  if (norm(s) == 0.0) s[rng.index(0, m - 1)] = 1.0;
  std::vector<Scalar> d = zero_target ? std::vector<Scalar>(n) : random_vector(rng, n, f);
  return {space, cframe::CoordinatewiseSpec{s}, {d}, n};
}

inline Instance integral_instance(Rng& rng) {
  const Field f = rng.coin() ? Field::Real : Field::Complex;
  const std::size_t n = rng.index(1, 3);
  const std::size_t y_size = n + rng.index(0, 2);
  const std::size_t m = y_size + 1 + rng.index(0, 3);
  auto space = rng.space(m, f, rng.coin());
  const auto order = shuffled_atoms(rng, m);
  std::vector<std::size_t> y(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(y_size));
  std::vector<Scalar> h = random_vector(rng, m, f);
  for (auto& z : h)
    if (rng.integer(0, 4) == 0) z = 0.0;
  h[order[y_size]] = rng.scalar(f) + Scalar(1.5);  // nonzero off Y
  std::vector<Scalar> d = rng.integer(0, 4) == 0 ? std::vector<Scalar>(n) : random_vector(rng, n, f);
  return {space, cframe::IntegralSpec{h, labels_of(*space, y)}, {d}, n};
}

inline Instance partitioned_instance(Rng& rng) {
  const Field f = rng.coin() ? Field::Real : Field::Complex;
  const std::size_t n = rng.index(1, 3);
  const std::size_t l = rng.index(1, 3);
  // Each block: some Y atoms, at least one off-Y atom with h != 0.
  std::vector<std::size_t> y_sizes(l, 0);
  for (std::size_t u = 0; u < n; ++u) ++y_sizes[rng.index(0, l - 1)];
  for (auto& s : y_sizes) s += rng.index(0, 1);
  std::vector<std::size_t> block_sizes(l);
  std::size_t m = 0;
  for (std::size_t j = 0; j < l; ++j) {
    block_sizes[j] = y_sizes[j] + 1 + rng.index(0, 2);
    m += block_sizes[j];
  }
  auto space = rng.space(m, f, rng.coin());
  const auto order = shuffled_atoms(rng, m);
  std::vector<Scalar> h = random_vector(rng, m, f);
  cframe::PartitionedSpec spec{std::vector<Scalar>(m), {}};
  std::size_t next = 0;
  for (std::size_t j = 0; j < l; ++j) {
    std::vector<std::size_t> atoms(order.begin() + static_cast<std::ptrdiff_t>(next),
                                   order.begin() + static_cast<std::ptrdiff_t>(next + block_sizes[j]));
    next += block_sizes[j];
    std::vector<std::size_t> y(atoms.begin(), atoms.begin() + static_cast<std::ptrdiff_t>(y_sizes[j]));
    for (auto x : atoms)
      if (rng.integer(0, 4) == 0) h[x] = 0.0;
    h[atoms[y_sizes[j]]] = rng.scalar(f) + Scalar(1.5);
    spec.blocks.push_back({labels_of(*space, atoms), labels_of(*space, y)});
  }
  spec.h = h;
  cframe::EquationValue targets;
  const bool zero = rng.integer(0, 4) == 0;
  for (std::size_t j = 0; j < l; ++j)
    targets.push_back(zero ? std::vector<Scalar>(n) : random_vector(rng, n, f));
  return {space, spec, targets, n};
}

enum class QuadraticKind { Nonzero, SectorPair, RealAxis };

inline Instance quadratic_instance(Rng& rng, QuadraticKind kind) {
  const Field f = Field::Complex;
  const std::size_t n = rng.index(1, 3);
  const std::size_t y_size = n + rng.index(0, 1);
  const std::size_t b1_size = kind == QuadraticKind::RealAxis ? 0 : 1 + rng.index(0, 1);
  const std::size_t b2_size = kind == QuadraticKind::RealAxis ? 0 : 1 + rng.index(0, 1);
  const std::size_t b3_size = kind == QuadraticKind::RealAxis ? 1 + rng.index(0, 2) : 0;
  const std::size_t extra = rng.index(0, 2);
  const std::size_t m = y_size + b1_size + b2_size + b3_size + extra;
  auto space = rng.space(m, f, rng.coin());
  const auto order = shuffled_atoms(rng, m);
  auto take = [&, next = std::size_t{0}](std::size_t count) mutable {
    std::vector<std::size_t> out(order.begin() + static_cast<std::ptrdiff_t>(next),
                                 order.begin() + static_cast<std::ptrdiff_t>(next + count));
    next += count;
    return out;
  };
  const auto y = take(y_size), b1 = take(b1_size), b2 = take(b2_size), b3 = take(b3_size), rest = take(extra);

  cframe::QuadraticSpec q;
  q.b = random_vector(rng, n, f);
  std::vector<Scalar> d = kind == QuadraticKind::Nonzero ? random_vector(rng, n, f) : std::vector<Scalar>(n);
  std::vector<Scalar> h(m);
  for (auto x : rest) h[x] = rng.scalar(f, 2.0);
  if (kind == QuadraticKind::Nonzero) {
    const Scalar bd = cframe::dot(q.b, d);
    if (std::abs(bd) < 1e-3) return quadratic_instance(rng, kind);
    q.epsilon = rng.real(0.01, 0.5);
    for (auto x : y) h[x] = rng.scalar(f, 2.0);
    // Pick bd * h(x) in the required sectors with margin above eps.
    for (auto x : b1) h[x] = Scalar(q.epsilon + rng.real(0.1, 2.0), -q.epsilon - rng.real(0.1, 2.0)) / bd;
    for (auto x : b2) h[x] = Scalar(q.epsilon + rng.real(0.1, 2.0), q.epsilon + rng.real(0.1, 2.0)) / bd;
  } else {
    q.epsilon = rng.real(0.01, 1.0);
    for (auto x : y) h[x] = -rng.real(0.1, 2.0);
    for (auto x : b1) h[x] = Scalar(rng.real(0.1, 2.0), -rng.real(0.1, 2.0));
    for (auto x : b2) h[x] = Scalar(rng.real(0.1, 2.0), rng.real(0.1, 2.0));
    for (auto x : b3) h[x] = rng.real(0.1, 2.0);
  }
  q.h = h;
  q.y = labels_of(*space, y);
  q.b1 = labels_of(*space, b1);
  q.b2 = labels_of(*space, b2);
  q.b3 = labels_of(*space, b3);
  return {space, q, {d}, n};
}

/// Independent oracle for the equation value: plain loops, no library kernels.
inline cframe::EquationValue oracle_value(const Instance& inst, const cframe::FrameFamily& f) {
  const auto& s = *inst.space;
  auto all = [&] {
    std::vector<std::size_t> v(s.size());
    std::iota(v.begin(), v.end(), 0);
    return v;
  };
  return std::visit(
      [&](const auto& spec) -> cframe::EquationValue {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, cframe::GenericLinearSpec>) {
          Scalar t{};
          for (std::size_t x = 0; x < s.size(); ++x)
            for (std::size_t k = 0; k < f.n(); ++k)
              t += s.weight(x) * f.vectors()(x, k) * std::conj(spec.weights(x, k));
          return {{t}};
        } else if constexpr (std::is_same_v<S, cframe::CoordinatewiseSpec>) {
          std::vector<Scalar> out(f.n());
          for (std::size_t k = 0; k < f.n(); ++k)
            for (std::size_t x = 0; x < s.size(); ++x) out[k] += s.weight(x) * spec.coefficients[x] * f.vectors()(x, k);
          return {out};
        } else if constexpr (std::is_same_v<S, cframe::IntegralSpec>) {
          return {integral_oracle(f, spec.h, all())};
        } else if constexpr (std::is_same_v<S, cframe::PartitionedSpec>) {
          cframe::EquationValue out;
          for (const auto& b : spec.blocks) {
            std::vector<std::size_t> idx;
            for (const auto& l : b.atoms) idx.push_back(s.index_of(l));
            out.push_back(integral_oracle(f, spec.h, idx));
          }
          return out;
        } else {
          return {quadratic_oracle(f, spec.b, spec.h)};
        }
      },
      inst.spec);
}

inline double value_gap(const cframe::EquationValue& a, const cframe::EquationValue& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t k = 0; k < a[j].size(); ++k) s += std::norm(a[j][k] - b[j][k]);
  return std::sqrt(s);
}

inline double value_size(const cframe::EquationValue& a) {
  return value_gap(a, cframe::EquationValue(a.size(), std::vector<Scalar>(a.empty() ? 0 : a[0].size())));
}

}  // namespace testing_support
