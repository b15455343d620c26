// Frame bounds of the two-phase series phi_m = (e^{2 pi i a m} / m, e^{2 pi i b m} / m).
#include <cstdio>
#include <cstdlib>

#include "cframe/cframe.hpp"
#include "cframe/fixtures.hpp"

int main(int argc, char** argv) {
  const std::size_t terms = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 100000;
  const double a = argc > 2 ? std::atof(argv[2]) : 0.25;
  const double b = argc > 3 ? std::atof(argv[3]) : 0.0;
  const auto report = cframe::analyze(cframe::phase_series_family(terms, a, b));
  std::printf("terms %zu  S11 %.10f  S22 %.10f\n", terms, report.gram(0, 0).real(), report.gram(1, 1).real());
  std::printf("bounds [%.10f, %.10f]  frame %s  tight %s\n", report.lower, report.upper,
              report.is_frame ? "yes" : "no", report.is_tight ? "yes" : "no");
}
