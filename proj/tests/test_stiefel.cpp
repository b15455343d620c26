#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace cframe;
using testing_support::bareiss_rank;
using testing_support::Rng;

namespace {

StiefelTuple tuple_from_components(const SpacePtr& space, const std::vector<std::vector<Scalar>>& comps) {
  Matrix m(space->size(), comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) m.set_column(k, comps[k]);
  return StiefelTuple(space, std::move(m));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // sentinel never expected by the tests below
}

// Weighted components as an integer matrix scaled by 2, so halves become exact.
Matrix doubled(const StiefelTuple& t) { return 2.0 * t.components(); }

}  // namespace

TEST(Decompose, IndependentInputIsReturned) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  const auto x = tuple_from_components(space, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
  const auto d = decompose_into_free_systems(x);
  ASSERT_EQ(d.parts.size(), 1u);
  EXPECT_EQ(d.parts[0], x);
}

TEST(Decompose, ProportionalPair) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  const auto x = tuple_from_components(space, {{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}});
  const auto d = decompose_into_free_systems(x);
  ASSERT_EQ(d.parts.size(), 2u);
  EXPECT_EQ(d.parts[0] + d.parts[1], x);
  for (const auto& p : d.parts) EXPECT_EQ(bareiss_rank(doubled(p)), 2u);
}

TEST(Decompose, ZeroSlot) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  const auto x = tuple_from_components(space, {{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}});
  const auto d = decompose_into_free_systems(x);
  ASSERT_EQ(d.parts.size(), 2u);
  EXPECT_EQ(d.parts[0] + d.parts[1], x);
  for (const auto& p : d.parts) EXPECT_EQ(bareiss_rank(doubled(p)), 2u);
}

TEST(Decompose, Errors) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  EXPECT_EQ(code_of([&] { decompose_into_free_systems(StiefelTuple::zero(space, 2)); }), ErrorCode::ZeroTuple);
  auto small = MeasureSpace::counting(Field::Real, 1);
  EXPECT_EQ(code_of([&] { decompose_into_free_systems(tuple_from_components(small, {{1.0}, {1.0}})); }),
            ErrorCode::AmbientTooSmall);
}

TEST(Decompose, PropertyExactSumAndFreeParts) {
  Rng rng(201);
  int split = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const std::size_t n = rng.index(1, 3);
    const std::size_t m = n + rng.index(0, 4);
    auto space = rng.space(m, Field::Real);
    Matrix c = rng.integer_matrix(m, n, -2, 2);
    if (rng.coin() && n > 1) c.set_column(n - 1, c.column(0));
    if (std::all_of(c.data().begin(), c.data().end(), [](const Scalar& z) { return z == Scalar{}; })) c(0, 0) = 1.0;
    const StiefelTuple x(space, c);
    const auto d = decompose_into_free_systems(x);
    const bool free = bareiss_rank(c) == n;
    EXPECT_EQ(d.parts.size(), free ? 1u : 2u);
    EXPECT_EQ(d.rank, bareiss_rank(c));
    StiefelTuple sum = StiefelTuple::zero(space, n);
    for (const auto& p : d.parts) {
      sum += p;
      EXPECT_EQ(bareiss_rank(doubled(p)), n);
    }
    EXPECT_EQ(sum, x);
    split += free ? 0 : 1;
  }
  EXPECT_GT(split, 100);
}

TEST(SpanMembership, SingleGenerator) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  const auto g = tuple_from_components(space, {{1.0, 0.0, 0.0}});
  EXPECT_TRUE(span_membership_check({g}, {1.0}));
  EXPECT_TRUE(span_membership_check({g}, {-3.0}));
}

TEST(SpanMembership, JointlyFreeGeneratorsInR4) {
  Rng rng(211);
  auto space = rng.space(4, Field::Real, false);
  int tested = 0;
  while (tested < 200) {
    const Matrix joint = rng.matrix(4, 4, Field::Real);
    if (std::abs(determinant(joint)) < 1e-3) continue;
    Matrix a(4, 2), b(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
      a(i, 0) = joint(i, 0);
      a(i, 1) = joint(i, 1);
      b(i, 0) = joint(i, 2);
      b(i, 1) = joint(i, 3);
    }
    const StiefelTuple ga(space, a), gb(space, b);
    Scalar l1 = rng.scalar(Field::Real), l2 = rng.scalar(Field::Real);
    const StiefelTuple combo = l1 * ga + l2 * gb;
    EXPECT_GT(gram_determinant(combo), 0.0);
    EXPECT_TRUE(span_membership_check({ga, gb}, {l1, l2}));
    ++tested;
  }
}

TEST(SpanMembership, RejectsDependentGenerators) {
  auto space = MeasureSpace::counting(Field::Real, 4);
  const auto g = tuple_from_components(space, {{1.0, 0.0, 0.0, 0.0}});
  EXPECT_EQ(code_of([&] { span_membership_check({g, g}, {1.0, -1.0}); }), ErrorCode::ComponentsNotFree);
  const auto zero = tuple_from_components(space, {{0.0, 0.0, 0.0, 0.0}});
  EXPECT_EQ(code_of([&] { span_membership_check({zero}, {1.0}); }), ErrorCode::NotIndependent);
}

TEST(SpanMembership, PropertyNoCounterexamples) {
  Rng rng(223);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng.index(1, 2);
    const std::size_t count = rng.index(1, 3);
    const std::size_t m = n * count + rng.index(0, 2);
    auto space = rng.space(m, Field::Complex, false);
    const Matrix joint = rng.matrix(m, n * count, Field::Complex);
    std::vector<StiefelTuple> gens;
    for (std::size_t j = 0; j < count; ++j) {
      Matrix g(m, n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) g(i, k) = joint(i, j * n + k);
      gens.emplace_back(space, g);
    }
    std::vector<Scalar> coeffs(count);
    for (auto& c : coeffs) c = rng.scalar(Field::Complex);
    EXPECT_TRUE(span_membership_check(gens, coeffs));
  }
}

TEST(PolygonalConnect, NoTranslations) {
  Rng rng(231);
  auto space = rng.space(6, Field::Real, false);
  const StiefelTuple x(space, rng.matrix(6, 2, Field::Real));
  const StiefelTuple y(space, rng.matrix(6, 2, Field::Real));
  const Connection c = polygonal_connect(x, y, {});
  ASSERT_EQ(c.path.segments(), 2u);
  EXPECT_EQ(c.path.segment_point(0, 0.0), x);
  EXPECT_EQ(c.path.segment_point(1, 1.0), y);
  for (std::size_t k = 0; k < 2; ++k)
    for (int i = 0; i <= 100; ++i) EXPECT_GT(gram_determinant(c.path.segment_point(k, i / 100.0)), 0.0);
}

TEST(PolygonalConnect, SingleTranslationInR4) {
  auto space = MeasureSpace::counting(Field::Real, 4);
  const auto u = tuple_from_components(space, {{0.0, 0.0, 0.0, 1.0}});
  const auto x = tuple_from_components(space, {{1.0, 0.0, 0.0, 1.0}});
  const auto y = tuple_from_components(space, {{0.0, 1.0, 0.0, 1.0}});
  const Connection c = polygonal_connect(x, y, {u});
  const StiefelTuple& z = c.path.breakpoints()[1];
  // z is a unit vector orthogonal to x, y and u.
  for (const auto& v : {x, y, u}) EXPECT_LE(std::abs(space->inner(z.component(0), v.component(0))), 1e-12);
  EXPECT_NEAR(z.norm(), 1.0, 1e-12);
  for (std::size_t k = 0; k < 2; ++k)
    for (int i = 0; i <= 100; ++i) {
      const auto p = c.path.segment_point(k, i / 100.0) - u;
      EXPECT_GT(p.norm(), 0.1);
    }
  EXPECT_EQ(c.translation_codimension, 3u);
  EXPECT_TRUE(c.sufficient_bound_holds);
}

TEST(PolygonalConnect, InsufficientCodimension) {
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto x = tuple_from_components(space, {{1.0, 0.0}, {0.0, 1.0}});
  const auto y = tuple_from_components(space, {{1.0, 1.0}, {0.0, 1.0}});
  EXPECT_EQ(code_of([&] { polygonal_connect(x, y, {}); }), ErrorCode::InsufficientCodimension);
}

TEST(PolygonalConnect, RejectsPointsOutsideIntersection) {
  auto space = MeasureSpace::counting(Field::Real, 4);
  const auto u = tuple_from_components(space, {{0.0, 0.0, 0.0, 1.0}});
  const auto x = u;
  const auto y = tuple_from_components(space, {{0.0, 1.0, 0.0, 1.0}});
  EXPECT_EQ(code_of([&] { polygonal_connect(x, y, {u}); }), ErrorCode::NotInIntersection);
}

TEST(GramSchmidt, OrthonormalInputIsFixed) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  const auto q = tuple_from_components(space, {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}});
  EXPECT_LE(distance(gram_schmidt_retract(q), q), 1e-15);
}

TEST(GramSchmidt, HandComputedExample) {
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto h = tuple_from_components(space, {{2.0, 0.0}, {1.0, 1.0}});
  const auto q = gram_schmidt_retract(h);
  const auto e = tuple_from_components(space, {{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_LE(distance(q, e), 1e-15);
}

TEST(GramSchmidt, RejectsDependentInput) {
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto h = tuple_from_components(space, {{1.0, 1.0}, {2.0, 2.0}});
  EXPECT_EQ(code_of([&] { gram_schmidt_retract(h); }), ErrorCode::NotIndependent);
}

TEST(GramSchmidt, PropertyRetraction) {
  Rng rng(241);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.index(1, 3);
    const std::size_t m = n + rng.index(0, 4);
    auto space = rng.space(m, Field::Complex, false);
    const StiefelTuple h(space, rng.matrix(m, n, Field::Complex));
    if (!in_stiefel(h)) continue;
    const StiefelTuple q = gram_schmidt_retract(h);
    EXPECT_LE(frobenius_norm(q.gram() - Matrix::identity(n)), 1e-10);
    EXPECT_LE(distance(gram_schmidt_retract(q), q), 1e-12);
    for (int i = 0; i <= 100; ++i) {
      const double t = i / 100.0;
      EXPECT_GT(gram_determinant(t * q + (1.0 - t) * h), 0.0);
    }
  }
}

TEST(GammaPolynomial, ConstantParsevalPath) {
  auto space = MeasureSpace::counting(Field::Real, 3);
  const auto q = tuple_from_components(space, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
  const PolynomialPath path({q});
  const auto g = gamma_polynomial(path);
  EXPECT_EQ(g.degree_bound, 0u);
  ASSERT_EQ(g.coefficients.size(), 1u);
  EXPECT_NEAR(g.coefficients[0], 1.0, 1e-14);
}

TEST(GammaPolynomial, ShrinkingSegment) {
  // gamma(t) = (1 - t) e_1: Gamma(t) = (1 - t)^2.
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto e1 = tuple_from_components(space, {{1.0, 0.0}});
  const auto g = gamma_polynomial(PolynomialPath::straight(e1, StiefelTuple::zero(space, 1)));
  ASSERT_EQ(g.coefficients.size(), 3u);
  EXPECT_NEAR(g.coefficients[0], 1.0, 1e-13);
  EXPECT_NEAR(g.coefficients[1], -2.0, 1e-13);
  EXPECT_NEAR(g.coefficients[2], 1.0, 1e-13);
}

TEST(GammaPolynomial, PropertyMatchesDirectDeterminant) {
  Rng rng(251);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.index(1, 3);
    const std::size_t m = n + rng.index(0, 3);
    const std::size_t q = rng.index(0, 3);
    auto space = rng.space(m, Field::Complex, false);
    std::vector<StiefelTuple> coeffs;
    for (std::size_t k = 0; k <= q; ++k) coeffs.emplace_back(space, rng.matrix(m, n, Field::Complex));
    const double a = rng.real(-1.0, 0.0);
    const PolynomialPath path(coeffs, a, a + rng.real(0.5, 2.0));
    const auto g = gamma_polynomial(path);
    EXPECT_LE(g.coefficients.size(), g.degree_bound + 1);
    EXPECT_EQ(g.degree_bound, 2 * q * n);
    double scale = 0.0;
    std::vector<std::pair<double, double>> checks;
    for (int i = 0; i < 15; ++i) {
      const double t = rng.real(path.lower(), path.upper());
      const double direct = gram_determinant(path.at(t));
      scale = std::max(scale, std::abs(direct));
      checks.emplace_back(t, direct);
    }
    for (const auto& [t, direct] : checks) EXPECT_LE(std::abs(g(t) - direct), 1e-8 * std::max(1.0, scale));
  }
}

TEST(DensityProbe, TargetAlreadyFree) {
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto e1 = tuple_from_components(space, {{1.0, 0.0}});
  const auto e2 = tuple_from_components(space, {{0.0, 1.0}});
  const auto r = density_probe(PolynomialPath::straight(e1, e2), 0.0, 1.0, 1e-6);
  EXPECT_EQ(r.t, 1.0);
  EXPECT_EQ(r.point, e2);
}

TEST(DensityProbe, ShrinkingSegmentInR2) {
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto e1 = tuple_from_components(space, {{1.0, 0.0}});
  const auto r = density_probe(PolynomialPath::straight(e1, StiefelTuple::zero(space, 1)), 0.0, 1.0, 1e-6);
  EXPECT_GT(r.t, 1.0 - 1e-6);
  EXPECT_LT(r.t, 1.0);
  EXPECT_GT(r.point.norm(), 0.0);
  EXPECT_LE(r.point.norm(), 1e-6);
}

TEST(DensityProbe, RejectsNonFreeWitness) {
  auto space = MeasureSpace::counting(Field::Real, 2);
  const auto zero = StiefelTuple::zero(space, 1);
  EXPECT_EQ(code_of([&] { density_probe(PolynomialPath::straight(zero, zero), 0.0, 1.0, 1e-6); }),
            ErrorCode::WitnessNotFrame);
}

TEST(DensityProbe, PropertyRandomPolynomialPaths) {
  Rng rng(261);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.index(1, 3);
    const std::size_t m = n + rng.index(0, 3);
    auto space = rng.space(m, Field::Real, false);
    StiefelTuple witness(space, rng.matrix(m, n, Field::Real));
    // Target of rank n - 1 (or zero when n = 1).
    Matrix t = rng.matrix(m, n, Field::Real);
    t.set_column(n - 1, n > 1 ? t.column(0) : std::vector<Scalar>(m));
    const StiefelTuple target(space, t);
    const PolynomialPath path = PolynomialPath::straight(witness, target);
    const double eps = 1e-6;
    const auto r = density_probe(path, 0.0, 1.0, eps);
    EXPECT_TRUE(in_stiefel(r.point));
    EXPECT_LE(distance(r.point, target), eps);
    EXPECT_LE(std::abs(r.t - 1.0), eps / path.lipschitz_bound());
    EXPECT_NE(gamma_polynomial(path)(0.0), 0.0);
  }
}
