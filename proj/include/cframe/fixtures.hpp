#pragma once
//
// Reference families used by the self-test and the test suites.
//

#include <cmath>
#include <complex>
#include <numbers>

#include "cframe/measure.hpp"

namespace cframe {

/// phi_m = (e^{2 pi i a m} / m, e^{2 pi i b m} / m), m = 1..M, counting measure.
/// Square summable with both diagonal Gram entries -> pi^2 / 6 as M grows.
inline FrameFamily phase_series_family(std::size_t terms, double a, double b) {
  auto space = MeasureSpace::counting(Field::Complex, terms);
  Matrix v(terms, 2);
  for (std::size_t i = 0; i < terms; ++i) {
    const double m = static_cast<double>(i + 1);
    v(i, 0) = std::polar(1.0 / m, 2.0 * std::numbers::pi * a * m);
    v(i, 1) = std::polar(1.0 / m, 2.0 * std::numbers::pi * b * m);
  }
  return FrameFamily(space, std::move(v));
}

/// Standard basis e_1, ..., e_n in F^n on n unit-weight atoms (Parseval).
inline FrameFamily identity_family(std::size_t n, Field field = Field::Real) {
  return FrameFamily(MeasureSpace::counting(field, n), Matrix::identity(n));
}

/// {e_1, e_1, e_2} in R^2: frame with bounds (1, 2), not tight.
inline FrameFamily repeated_basis_family() {
  return FrameFamily(MeasureSpace::counting(Field::Real, 3), Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}));
}

}  // namespace cframe
