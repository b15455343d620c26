// Build a frame whose vectors integrate against h to a prescribed value, then
// walk from a rank-deficient solution to a nearby frame solution.
#include <cstdio>

#include "cframe/cframe.hpp"

using namespace cframe;

static void print(const FrameFamily& f) {
  for (std::size_t x = 0; x < f.atoms(); ++x) {
    std::printf("  %-3s", f.space()->atom(x).label.c_str());
    for (std::size_t k = 0; k < f.n(); ++k) std::printf(" %12.9f", f.vectors()(x, k).real());
    std::printf("\n");
  }
}

int main() {
  auto space = std::make_shared<const MeasureSpace>(
      Field::Real, std::vector<Atom>{{"y1", 1.0}, {"y2", 1.0}, {"x1", 2.0}, {"x2", 0.5}});
  const IntegralSpec spec{{0.5, -1.0, 1.0, 3.0}, {"y1", "y2"}};
  const EquationValue d{{1.0, -2.0}};

  const SolveResult r = solve(space, spec, d);
  std::printf("solution (residual %.1e, bounds [%.4f, %.4f]):\n", r.residual, r.report.lower, r.report.upper);
  print(r.frame);

  // Every vector on x1 and x2 is a multiple of d: a solution, but not a frame.
  Matrix deficient(4, 2);
  const double mass = 2.0 * 1.0 + 0.5 * 9.0;
  for (std::size_t x = 2; x < 4; ++x)
    for (std::size_t k = 0; k < 2; ++k) deficient(x, k) = spec.h[x] / mass * d[0][k];
  const DensifyResult close = densify_solution_set(space, spec, d, FrameFamily(space, deficient), 1e-6);
  std::printf("frame solution within %.2e of the rank-deficient one (residual %.1e):\n", close.distance,
              close.residual);
  print(close.frame);
}
