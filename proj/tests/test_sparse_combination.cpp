#include "sparsegauss/sparse_combination.hpp"

#include <gtest/gtest.h>

using namespace sparsegauss;

namespace {
BigReal tol(long e, const PrecisionContext &ctx) { return ldexp(BigReal(1L, ctx), e); }
} // namespace

TEST(CombCoeff, ZeroWaveVectorIsOne) {
  for (long n = 1; n <= 20; ++n)
    for (std::size_t d = 2; d <= 4; ++d) {
      const PrecisionContext ctx(default_bits(static_cast<unsigned long>(n), d));
      const BigReal c = comb_coeff(n, d, WaveVector(std::vector<std::int64_t>(d, 0)), ctx);
      EXPECT_TRUE(abs(c - BigReal(1L, ctx)) <= tol(8 - static_cast<long>(ctx.bits()), ctx))
          << n << "," << d;
    }
}

TEST(CombCoeff, CachedMatchesUncached) {
  const PrecisionContext ctx(300);
  for (const auto &k : {WaveVector{1, 1}, WaveVector{2, -3}, WaveVector{0, 5}})
    for (long n = 2; n <= 8; ++n)
      EXPECT_TRUE(abs(comb_coeff(n, 2, k, ctx) - comb_coeff_uncached(n, 2, k, ctx)) < tol(-280, ctx))
          << n;
  const WaveVector k3{1, 2, 3};
  EXPECT_TRUE(abs(comb_coeff(6, 3, k3, ctx) - comb_coeff_uncached(6, 3, k3, ctx)) < tol(-280, ctx));
}

TEST(CombCoeff, TwoDimensionalLayerIdentity) {
  // d = 2: C = sum_{i+j=n+1} - sum_{i+j=n} over i, j >= 1.
  const PrecisionContext ctx(256);
  const WaveVector k{1, 2};
  const BigReal p2 = pi(ctx) * pi(ctx);
  auto g = [&](std::int64_t kk, int l) {
    return exp_real(-(p2 * BigReal(BigRational(2L * kk * kk) * inverse_power_of_two(2UL * l), ctx)), ctx);
  };
  for (int n = 2; n <= 10; ++n) {
    BigReal want(ctx);
    for (int i = 1; i < n + 1; ++i)
      want += g(k[0], i) * g(k[1], n + 1 - i);
    for (int i = 1; i < n; ++i)
      want -= g(k[0], i) * g(k[1], n - i);
    EXPECT_TRUE(abs(comb_coeff(n, 2, k, ctx) - want) < tol(-245, ctx)) << n;
  }
}

TEST(CombCoeff, PermutationAndSignInvariant) {
  const PrecisionContext ctx(256);
  const BigReal a = comb_coeff(7, 3, WaveVector{1, 2, 3}, ctx);
  for (const auto &k : {WaveVector{3, 1, 2}, WaveVector{-1, 2, -3}, WaveVector{2, -3, 1}})
    EXPECT_TRUE(abs(a - comb_coeff(7, 3, k, ctx)) < tol(-240, ctx));
}

TEST(CombCoeff, Validation) {
  const PrecisionContext ctx(128);
  EXPECT_THROW(comb_coeff(4, 2, WaveVector{1, 1, 1}, ctx), std::invalid_argument);
  EXPECT_THROW(comb_coeff(0, 2, WaveVector{1, 1}, ctx), std::invalid_argument);
  EXPECT_THROW(comb_coeff(4, 1, WaveVector{1}, ctx), std::invalid_argument);
}

TEST(ErrorCoefficient, ReferenceCellAtLevelForty) {
  const auto r = sparse_error_coeff(40, 2, WaveVector{1, 1});
  EXPECT_EQ(r.bits, default_bits(40, 2));
  EXPECT_TRUE(r.reliable);
  EXPECT_NE(match_printed(r.value, "8.69 (-21)"), PrintedMatch::mismatch);
  EXPECT_EQ(format_paper_sci(r.asymptotic), "9.67 (-21)");
  ASSERT_TRUE(r.ratio.has_value());
  EXPECT_NEAR(r.ratio->to_double(), 0.899, 0.002);
}

TEST(ErrorCoefficient, AsymptoticExamples) {
  const PrecisionContext ctx(256);
  EXPECT_EQ(format_paper_sci(asymptotic_coeff(40, 3, WaveVector{500, 700, 900}, ctx)), "2.84 (-1)");
  EXPECT_TRUE(asymptotic_coeff(40, 2, WaveVector{0, 3}, ctx).is_zero());
  const auto r = sparse_error_coeff(12, 2, WaveVector{0, 3});
  EXPECT_FALSE(r.ratio.has_value());
}

TEST(ErrorCoefficient, ZeroModeVanishes) {
  for (long n : {1L, 5L, 33L, 64L})
    for (std::size_t d = 2; d <= 5; ++d) {
      const auto r = sparse_error_coeff(n, d, WaveVector(std::vector<std::int64_t>(d, 0)));
      const PrecisionContext ctx(r.bits);
      EXPECT_TRUE(abs(r.value) <= tol(8 - static_cast<long>(r.bits), ctx))
          << n << "," << d;
    }
}

TEST(ErrorCoefficient, PrecisionPolicy) {
  const PrecisionContext low(128);
  EXPECT_THROW(sparse_error_coeff(40, 2, WaveVector{1, 1}, low), PrecisionPolicyError);
  const auto forced = sparse_error_coeff(40, 2, WaveVector{1, 1}, low, true);
  EXPECT_FALSE(forced.reliable);
  EXPECT_EQ(forced.bits, 128u);
}

TEST(ErrorCoefficient, StableUnderDoubledPrecision) {
  const WaveVector k{3, 5};
  const long n = 60;
  const unsigned long b = default_bits(n, 2);
  const auto a = sparse_error_coeff(n, 2, k, PrecisionContext(b));
  const auto c = sparse_error_coeff(n, 2, k, PrecisionContext(2 * b));
  const PrecisionContext wide(2 * b);
  EXPECT_TRUE(relatively_close(a.value.at(wide), c.value, tol(-100, wide)));
}

TEST(ErrorCoefficient, RatioApproachesOneMonotonically) {
  double prev = 0.0;
  for (long n : {10L, 20L, 40L, 80L, 160L}) {
    const auto r = sparse_error_coeff(n, 2, WaveVector{1, 1});
    const double q = r.ratio->to_double();
    EXPECT_GT(q, prev) << n;
    EXPECT_LT(q, 1.0) << n;
    prev = q;
  }
  EXPECT_GT(prev, 0.97);
}

TEST(SparseConvolve, ConstantIsReproduced) {
  const PrecisionContext ctx(200);
  const auto s = sparse_convolve(make_test_function(FunctionFamily::constant, 3), 5, ctx);
  const auto v = s.evaluate(Point{BigRational(1, 3), 0, BigRational(1, 2)}, ctx).re;
  EXPECT_TRUE(abs(v - BigReal(1L, ctx)) < tol(-180, ctx));
  EXPECT_EQ(s.level(), 5);
}

TEST(SparseConvolve, ProductCosineErrorIsTheCoefficient) {
  const PrecisionContext ctx(256);
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  const auto rows = sparse_order_study(f, 6, 6, ctx);
  ASSERT_EQ(rows.size(), 1u);
  const auto e = sparse_error_coeff(6, 2, WaveVector{1, 1}, ctx);
  // sup |prod cos| = 1 is attained at the origin, which is a sample point.
  EXPECT_TRUE(relatively_close(rows[0].error, abs(e.value), tol(-200, ctx)));
}

TEST(SparseConvolve, LevelRatioFollowsLaw) {
  const PrecisionContext ctx(256);
  const auto f = make_test_function(FunctionFamily::product_cosine, 2);
  const auto rows = sparse_order_study(f, 20, 24, ctx);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double n = static_cast<double>(rows[i - 1].n);
    const double got = (rows[i].error / rows[i - 1].error).to_double();
    const double want = (n + 1) / n / 4.0;
    EXPECT_NEAR(got / want, 1.0, 0.02) << n;
  }
}

TEST(Tables, PresetsAreWellFormed) {
  for (const char *name : {"table1", "table2"}) {
    const auto *p = find_preset(name);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->printed.size(), p->n_list.size());
    for (const auto &row : p->printed) {
      ASSERT_EQ(row.size(), p->k_list.size());
      for (const auto &cell : row)
        for (const auto &text : cell)
          EXPECT_NO_THROW(parse_paper_sci(text)) << text;
    }
  }
  EXPECT_EQ(find_preset("table3"), nullptr);
}

TEST(Tables, ReproduceSmallTable) {
  const auto t = reproduce_table(2, {WaveVector{1, 1}, WaveVector{2, 1}}, {10, 20});
  ASSERT_EQ(t.cells.size(), 4u);
  EXPECT_EQ(t.cells[1].n, 10);
  EXPECT_EQ(t.cells[1].k, (WaveVector{2, 1}));
  EXPECT_EQ(t.cells[2].n, 20);
  for (const auto &c : t.cells) {
    EXPECT_EQ(c.value_text, format_paper_sci(c.result.value));
    EXPECT_EQ(c.result.bits, default_bits(static_cast<unsigned long>(c.n), 2));
  }
}
