#include "sparsegauss/fullgrid.hpp"

#include <gtest/gtest.h>

using namespace sparsegauss;

namespace {
const PrecisionContext ctx(256);

BigReal tol(long e) { return ldexp(BigReal(1L, ctx), e); }

ScaleVector iso(unsigned n, std::size_t d) {
  return ScaleVector::isotropic(inverse_power_of_two(n), d);
}

Evaluator series_eval(const FourierSeries &s) {
  return [&s](const Point &x) { return s.evaluate_real(x, ctx); };
}
} // namespace

TEST(ErrorCoeffFull, Examples) {
  EXPECT_TRUE(error_coeff_full(iso(3, 2), WaveVector{0, 0}, ctx).is_zero());
  const BigReal p = pi(ctx);
  BigReal arg = p * p;
  arg /= -8L;
  const BigReal want = 1L - exp_real(arg, ctx);
  const BigReal got = error_coeff_full(iso(2, 2), WaveVector{1, 0}, ctx);
  EXPECT_TRUE(relatively_close(got, want, tol(-250)));
  EXPECT_NEAR(got.to_double(), 0.7088, 1e-4);
}

TEST(ErrorCoeffFull, SameAsMultiplierComplement) {
  const ScaleVector h(std::vector<BigRational>{BigRational(1, 4), BigRational(1, 32)});
  const WaveVector k{3, -7};
  EXPECT_EQ(error_coeff_full(h, k, ctx), 1L - axis_multiplier(h, k, ctx));
}

TEST(ErrorCoeffFull, HalvingRatioTendsToFour) {
  const WaveVector k{1, 2};
  const BigReal a = error_coeff_full(iso(9, 2), k, ctx);
  const BigReal b = error_coeff_full(iso(10, 2), k, ctx);
  // E = x - x^2/2 + ..., x = 2 pi^2 ||k||^2 h^2: ratio = 4 (1 - 3 x_9 / 8) + O(x^2).
  const double x9 = 2.0 * M_PI * M_PI * 5.0 / std::pow(4.0, 9);
  EXPECT_NEAR((a / b).to_double(), 4.0 * (1.0 - 0.375 * x9), 4e-6);
}

TEST(ErrorCoeffFull, RangeMonotonicityAndSymmetry) {
  const auto h = iso(3, 2);
  BigReal prev(ctx);
  for (std::int64_t k1 = 0; k1 <= 10; ++k1) {
    const BigReal e = error_coeff_full(h, WaveVector{k1, 3}, ctx);
    EXPECT_GE(e, BigReal(ctx));
    EXPECT_LT(e, BigReal(1L, ctx));
    if (k1 > 0) {
      EXPECT_GT(e, prev);
    }
    prev = e;
  }
  for (unsigned n = 1; n < 8; ++n)
    EXPECT_GT(error_coeff_full(iso(n, 2), WaveVector{2, 1}, ctx),
              error_coeff_full(iso(n + 1, 2), WaveVector{2, 1}, ctx));
  // Isotropic h: only ||k||^2 matters (exact at the multiplier level).
  EXPECT_EQ(error_coeff_full(h, WaveVector{3, -4}, ctx), error_coeff_full(h, WaveVector{-4, 3}, ctx));
  EXPECT_EQ(error_coeff_full(h, WaveVector{3, 4}, ctx), error_coeff_full(h, WaveVector{-3, -4}, ctx));
  EXPECT_TRUE(relatively_close(error_coeff_full(h, WaveVector{5, 0}, ctx),
                               error_coeff_full(h, WaveVector{3, 4}, ctx), tol(-245)));
}

TEST(Convolve, ConstantIsUnchanged) {
  const auto f = make_test_function(FunctionFamily::constant, 2);
  const auto c = convolve(f, iso(2, 2), ctx);
  ASSERT_EQ(c.series().terms().size(), 1u);
  EXPECT_EQ(c.series().terms()[0].c.re, BigReal(1L, ctx));
}

TEST(Convolve, ProductCosineScaling) {
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  const unsigned n = 3;
  const auto c = convolve(f, iso(n, 2), ctx);
  const BigReal p = pi(ctx);
  BigReal arg = p * p * BigReal(inverse_power_of_two(2 * n), ctx);
  arg *= -4L;
  const BigReal factor = exp_real(arg, ctx);
  for (const auto &t : c.series().terms())
    EXPECT_TRUE(relatively_close(t.c.re, factor / 4L, tol(-248)));
  EXPECT_THROW(convolve(f, iso(2, 3), ctx), std::invalid_argument);
}

TEST(Convolve, CoefficientsIncreaseToTheOriginal) {
  const auto f = make_test_function(FunctionFamily::beta_decay_random, 2, {std::nullopt, 3.0, 3, 5});
  std::vector<BigReal> prev;
  for (unsigned n = 1; n <= 6; ++n) {
    const auto c = convolve(f, iso(n, 2), ctx);
    std::size_t i = 0;
    auto it = f.coefficients().begin();
    for (const auto &t : c.series().terms()) {
      const BigReal mod = t.c.modulus();
      EXPECT_LE(mod, BigReal(std::abs(it->second), ctx) * (1L + tol(-240)));
      if (!prev.empty()) {
        EXPECT_GT(mod, prev[i]);
      }
      if (prev.size() <= i)
        prev.push_back(mod);
      else
        prev[i] = mod;
      ++i;
      ++it;
    }
  }
}

TEST(SupError, IdenticalAndSingleMode) {
  const auto f = make_test_function(FunctionFamily::trig_monomial_pair, 2, {WaveVector{1, 2}});
  const auto s = f.series(ctx);
  EXPECT_TRUE(sup_error(series_eval(s), series_eval(s), 8, 2, ctx).is_zero());
  const unsigned n = 3;
  const auto c = convolve(f, iso(n, 2), ctx);
  const BigReal got = sup_error(series_eval(s), series_eval(c.series()), 8, 2, ctx);
  const BigReal want = error_coeff_full(iso(n, 2), WaveVector{1, 2}, ctx);
  EXPECT_TRUE(relatively_close(got, want, tol(-240)));
  // The grid-sampled variant agrees with the pointwise one.
  EXPECT_TRUE(relatively_close(sup_error(s, c.series(), 8, ctx), got, tol(-240)));
}

TEST(SupError, ResolutionDoublingIsStable) {
  const auto f = make_test_function(FunctionFamily::beta_decay_random, 2, {std::nullopt, 4.0, 4, 3});
  const auto s = f.series(ctx);
  const auto c = convolve(f, iso(6, 2), ctx);
  const double a = sup_error(s, c.series(), 32, ctx).to_double();
  const double b = sup_error(s, c.series(), 64, ctx).to_double();
  EXPECT_LT(std::abs(a - b), 0.01 * b);
}

TEST(DefaultResolution, EightSamplesPerShortestPeriod) {
  EXPECT_EQ(default_resolution(make_test_function(FunctionFamily::product_cosine, 2)), 16u);
  EXPECT_EQ(default_resolution(make_test_function(FunctionFamily::beta_decay_random, 2,
                                                  {std::nullopt, 2.0, 16, 1})),
            128u);
  EXPECT_EQ(default_resolution(make_test_function(FunctionFamily::trig_monomial_pair, 2,
                                                  {WaveVector{3, 1}})),
            32u);
}

TEST(OrderStudy, ProductCosineSaturatesAtTwo) {
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  const auto rows = order_study(f, 4, 10, ctx);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_FALSE(rows[0].log2_ratio.has_value());
  for (const auto &r : rows)
    if (r.n >= 6) {
      EXPECT_NEAR(*r.log2_ratio, 2.0, 0.05) << r.n;
    }
}

TEST(OrderStudy, ConstantHasZeroError) {
  const auto rows = order_study(make_test_function(FunctionFamily::constant, 2), 2, 6, ctx);
  for (const auto &r : rows) {
    EXPECT_TRUE(r.error.is_zero());
    if (r.n > 2) {
      EXPECT_FALSE(r.log2_ratio.has_value());
    }
  }
}

// Truncated beta-decay series are band-limited, so their observed order moves
// from the pre-asymptotic regime up to the saturation rate 2.
TEST(OrderStudy, BetaDecayOrderBetweenRegimes) {
  const std::size_t d = 2;
  const double beta = d / 2.0 + 1.0;
  const auto f = make_test_function(FunctionFamily::beta_decay_random, d, {std::nullopt, beta, 16, 1});
  const auto rows = order_study(f, 2, 10, ctx);
  for (const auto &r : rows) {
    if (!r.log2_ratio)
      continue;
    if (r.n >= 3) {
      EXPECT_GE(*r.log2_ratio, beta - d / 2.0 - 0.15) << r.n;
      EXPECT_LE(*r.log2_ratio, 2.05) << r.n;
    }
  }
  EXPECT_NEAR(*rows.back().log2_ratio, 2.0, 0.05);
}

TEST(QuasiInterpolant, ConstantWithinDeclaredTail) {
  const auto one = make_test_function(FunctionFamily::constant, 2);
  const int R = default_truncation_radius();
  EXPECT_EQ(R, 12);
  const BigReal bound = quasi_constant_tail(R, 2, ctx);
  for (int n : {2, 4}) {
    const QuasiInterpolant q(one, n, ctx);
    const QuasiInterpolant wide(one, n, 2 * R, ctx);
    for (int a = 0; a <= 8; ++a)
      for (int b = 0; b <= 8; b += 3) {
        const Point x{ratio(a, 8), ratio(b, 9)};
        const BigReal v = q.evaluate(x, ctx);
        // Samples are all one, so the sum is exactly the window weight.
        EXPECT_EQ(v, q.window_weight(x, ctx));
        EXPECT_LE(abs(v - BigReal(1L, ctx)), bound);
        EXPECT_LE(abs(wide.evaluate(x, ctx) - BigReal(1L, ctx)), bound);
        // Radius-2R oracle: the R window misses only the far tail.
        EXPECT_LT(abs(v - wide.evaluate(x, ctx)), tol(-80));
      }
  }
}

TEST(QuasiInterpolant, GridPointWeight) {
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  const QuasiInterpolant q(f, 3, 1, ctx);
  const Point x{BigRational(3, 8), BigRational(5, 8)};
  // Radius 1 window; the centre weight is Psi(0) = 1/(2 pi).
  const BigReal centre = unit_gaussian(BigReal(ctx), ctx) * unit_gaussian(BigReal(ctx), ctx);
  EXPECT_TRUE(relatively_close(centre, 1L / (pi(ctx) * 2L), tol(-250)));
  EXPECT_GT(q.window_weight(x, ctx), centre);
  const std::int64_t j[] = {3, 5};
  const std::int64_t wrapped[] = {11, -3};
  EXPECT_EQ(q.sample(j), q.sample(wrapped));
}

// Poisson summation: Q_h e_k - C_h e_k = sum_{m != 0} exp(-2 pi^2 |hk - m|^2)
// e_{k - m/h} for the untruncated lattice sum; the difference does not vanish
// as h -> 0 but tends to the aliasing constant of the unit-width kernel.
TEST(QuasiInterpolant, DifferenceMatchesPoissonPrediction) {
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  const BigReal p = pi(ctx);
  const BigReal two_pi = p * 2L;
  for (int n : {4, 6}) {
    const QuasiInterpolant q(f, n, ctx);
    const auto c = convolve(f, iso(static_cast<unsigned>(n), 2), ctx);
    const BigRational h = inverse_power_of_two(static_cast<unsigned long>(n));
    for (const Point &x : {Point{BigRational(1, 3), BigRational(1, 5)}, Point{BigRational(7, 11), 0}}) {
      BigReal predicted(ctx);
      for (const auto &[k, coeff] : f.coefficients())
        for (long m1 = -2; m1 <= 2; ++m1)
          for (long m2 = -2; m2 <= 2; ++m2) {
            if (m1 == 0 && m2 == 0)
              continue;
            const BigRational z1 = h * static_cast<long>(k[0]) - m1;
            const BigRational z2 = h * static_cast<long>(k[1]) - m2;
            BigReal arg = p * p * BigReal(BigRational(z1 * z1 + z2 * z2), ctx);
            arg *= -2L;
            const BigRational phase = (z1 * x[0] + z2 * x[1]) / h;
            const auto [s, co] = sin_cos(BigReal(phase, ctx) * two_pi);
            predicted += exp_real(arg, ctx) * co * BigReal(coeff.real(), ctx);
          }
      const BigReal diff = q.evaluate(x, ctx) - c.series().evaluate_real(x, ctx);
      EXPECT_LT(abs(diff - predicted), tol(-70)) << n;
      EXPECT_GT(abs(diff), tol(-40));
    }
  }
}

TEST(QuasiInterpolant, Validation) {
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  EXPECT_THROW(QuasiInterpolant(f, 3, 0, ctx), std::invalid_argument);
  EXPECT_THROW(QuasiInterpolant(f, 25, ctx), std::invalid_argument);
  PeriodicFunction::Coefficients m;
  m[WaveVector{1, 0}] = 1.0;
  EXPECT_THROW(QuasiInterpolant(PeriodicFunction(2, m, false), 3, ctx), std::invalid_argument);
}
