#include "sparsegauss/sigma_oracle.hpp"

#include <gtest/gtest.h>

using namespace sparsegauss;

namespace {
WaveVector ramp(long d, std::int64_t first, std::int64_t step) {
  std::vector<std::int64_t> c;
  for (long i = 0; i < d; ++i)
    c.push_back(first + step * i);
  return WaveVector(c);
}
} // namespace

TEST(Sigma, HandComputedExamples) {
  EXPECT_EQ(sigma_bruteforce(2, 1, 3, WaveVector{1, 1}).value, ratio(5, 8));
  EXPECT_EQ(sigma_bruteforce(2, 2, 4, WaveVector{1, 2}).value, ratio(5025, 4096));
  EXPECT_EQ(sigma_closed_d2(2, 4, WaveVector{1, 2}).value, ratio(5025, 4096));
  for (long d = 1; d <= 4; ++d)
    for (long m = d; m <= 10; ++m)
      EXPECT_EQ(sigma_bruteforce(d, 0, m, ramp(d, 1, 1)).value,
                BigRational(binomial(m - 1, d - 1)));
}

TEST(Sigma, AllRoutesAgree) {
  for (long d = 1; d <= 4; ++d)
    for (long p = 0; p <= 4; ++p)
      for (long m = d; m <= 12; ++m)
        for (const auto &k : {ramp(d, 1, 0), ramp(d, 1, 1), ramp(d, 2, 1)}) {
          const auto brute = sigma_bruteforce(d, p, m, k).value;
          ASSERT_EQ(sigma_recurrence(d, p, m, k).value, brute) << d << p << m;
          if (d == 2 && p >= 1) {
            ASSERT_EQ(sigma_closed_d2(p, m, k).value, brute) << p << m;
          }
          if (p == 1) {
            ASSERT_EQ(sigma_p1_reduced(d, m, k).value, brute) << d << m;
          }
        }
}

TEST(Sigma, PrintedRecurrenceBoundDropsTheLastComposition) {
  const WaveVector k{1, 2, 3};
  EXPECT_NE(sigma_recurrence(3, 2, 6, k, RecurrenceBound::printed).value,
            sigma_bruteforce(3, 2, 6, k).value);
}

TEST(Sigma, TwoDimensionalP1Formula) {
  for (long m = 2; m <= 20; ++m) {
    const WaveVector k{2, 5};
    const BigRational want = BigRational(29) * (ratio(1, 3) - ratio(4, 3) * inverse_power_of_two(2UL * m));
    EXPECT_EQ(sigma_closed_d2(1, m, k).value, want);
  }
}

TEST(Sigma, SymmetricInK) {
  for (long m = 3; m <= 8; ++m) {
    EXPECT_EQ(sigma_bruteforce(3, 3, m, WaveVector{1, 2, 3}).value,
              sigma_bruteforce(3, 3, m, WaveVector{3, -1, 2}).value);
    EXPECT_EQ(sigma_closed_d2(3, m, WaveVector{4, 1}).value,
              sigma_closed_d2(3, m, WaveVector{1, 4}).value);
  }
}

TEST(Sigma, Validation) {
  EXPECT_THROW(sigma_bruteforce(2, 1, 1, WaveVector{1, 1}), std::invalid_argument);
  EXPECT_THROW(sigma_bruteforce(2, -1, 3, WaveVector{1, 1}), std::invalid_argument);
  EXPECT_THROW(sigma_bruteforce(3, 1, 5, WaveVector{1, 1}), std::invalid_argument);
  EXPECT_THROW(sigma_closed_d2(0, 5, WaveVector{1, 1}), std::invalid_argument);
}

TEST(ForwardDifference, Examples) {
  const std::vector<BigRational> lin{3, 5, 7, 9};
  EXPECT_EQ(forward_difference(lin, 1), 2);
  EXPECT_EQ(forward_difference(lin, 2), 0);
  EXPECT_EQ(forward_difference(lin, 0), 3);
  // Delta^k x^q = (x-1)^k x^0.
  const BigRational x = ratio(1, 4);
  std::vector<BigRational> geo;
  for (int q = 0; q <= 5; ++q)
    geo.push_back(pow(x, static_cast<unsigned long>(q)));
  for (unsigned long k = 1; k <= 5; ++k)
    EXPECT_EQ(forward_difference(geo, k), pow(x - 1, k));
  EXPECT_THROW(forward_difference(lin, 4), std::invalid_argument);
}

TEST(Sigma1Residual, PolynomialStructure) {
  for (long m = 2; m <= 12; ++m)
    EXPECT_EQ(sigma1_residual(2, m, WaveVector{1, 3}), ratio(1, 3));
  for (long d = 2; d <= 4; ++d) {
    const auto r = sigma1_residual_check(d, d, 2 * d + 3, ramp(d, 1, 1));
    EXPECT_TRUE(r.passed) << r.name;
    EXPECT_EQ(r.windows, 5u); // d+4 values, windows of width d
  }
  // d = 3: residual is linear in m with slope 1/3.
  const WaveVector k{1, 1, 1};
  EXPECT_EQ(sigma1_residual(3, 6, k) - sigma1_residual(3, 5, k), ratio(1, 3));
  EXPECT_THROW(sigma1_residual_check(2, 2, 3, WaveVector{1, 1}), std::invalid_argument);
}

TEST(Lemma41, ExampleAndSweep) {
  EXPECT_EQ(lemma41_lhs(2, 4, 1), ratio(21, 64));
  EXPECT_EQ(lemma41_remainder(2, 4, 1), ratio(1, 3));
  for (long d = 2; d <= 3; ++d)
    for (long r = 1; r <= 3; ++r)
      for (long m = d + 1; m <= 12; ++m) {
        const auto rep = lemma41_check(d, m, r);
        EXPECT_TRUE(rep.passed) << d << "," << r << "," << m;
        EXPECT_EQ(rep.difference, 0);
      }
  EXPECT_THROW(lemma41_check(2, 2, 1), std::invalid_argument);
}

TEST(WeightedGeom, Examples) {
  for (long n = 1; n <= 10; ++n) {
    EXPECT_EQ(weighted_geom(1, n, 1), BigRational(n * (n + 1) / 2));
    const BigRational x = ratio(-2, 5);
    EXPECT_EQ(weighted_geom(0, n, x), x * (1 - pow(x, static_cast<unsigned long>(n))) / (1 - x));
  }
  EXPECT_EQ(weighted_geom(2, 3, 2), 90);
}

TEST(GeomPolys, LowOrder) {
  const auto g = geom_polys(1);
  EXPECT_EQ(g.q.degree_x(), 0);
  EXPECT_EQ(g.q.coefficient(0, 0), 1);
  // p_1 = 1 + n - n x.
  EXPECT_EQ(g.p.coefficient(0, 0), 1);
  EXPECT_EQ(g.p.coefficient(0, 1), 1);
  EXPECT_EQ(g.p.coefficient(1, 1), -1);
  EXPECT_EQ(g.p.coefficient(1, 0), 0);
  for (unsigned i = 1; i <= 8; ++i)
    EXPECT_TRUE(geom_degrees_ok(i, geom_polys(i))) << i;
}

TEST(GeomPolys, ClosedFormMatchesDirectSum) {
  for (unsigned i = 0; i <= 8; ++i) {
    const auto r = geom_rep_check(i, 20, 3);
    EXPECT_TRUE(r.passed) << r.name;
    EXPECT_EQ(r.windows, 20u);
  }
}

TEST(Faulhaber, LeadingTermRemoved) {
  for (unsigned i = 0; i <= 8; ++i)
    EXPECT_TRUE(faulhaber_check(i).passed) << i;
}

TEST(BivariatePolynomial, Arithmetic) {
  BivariatePolynomial a; // 1 + x n
  a.set(0, 0, 1);
  a.set(1, 1, 1);
  BivariatePolynomial b; // x^2 - 2
  b.set(2, 0, 1);
  b.set(0, 0, -2);
  const auto s = a + b;
  const auto m = a * b;
  const BigRational x = ratio(2, 3), n = 5;
  EXPECT_EQ(s.evaluate(x, n), a.evaluate(x, n) + b.evaluate(x, n));
  EXPECT_EQ(m.evaluate(x, n), a.evaluate(x, n) * b.evaluate(x, n));
  EXPECT_EQ(m.degree_x(), 3);
  EXPECT_EQ(m.degree_n(), 1);
  EXPECT_EQ(b.derivative_x().evaluate(x, n), 2 * x);
}

TEST(AuxiliarySums, Identities) {
  for (long d = 2; d <= 4; ++d) {
    for (long t = 1; t <= 3; ++t) {
      EXPECT_TRUE(geometric_tail_check(d, t, d + 1, d + 10).passed);
      for (unsigned i = 0; i <= 3; ++i) {
        const auto r = weighted_tail_check(d, t, i, d + 1, d + 12);
        EXPECT_TRUE(r.passed) << r.name << " d=" << d;
      }
    }
    for (unsigned i = 0; i <= 4; ++i) {
      EXPECT_TRUE(power_sum_check(d, i, d + 1, d + 12).passed);
      BigRational c;
      EXPECT_TRUE(growing_sum_check(d, i, d + 1, d + 12, &c).passed);
      EXPECT_NE(c, 0);
    }
  }
}

TEST(LeadingTerm, TwoDimensionalLimits) {
  const std::vector<long> ns{20, 30, 40};
  const auto r2 = leading_term_check(2, 2, WaveVector{1, 1}, ns);
  ASSERT_TRUE(r2.expected.has_value());
  EXPECT_EQ(*r2.expected, ratio(-3, 2));
  EXPECT_TRUE(r2.passed) << r2.limit_estimate;
  // p = 1 is exact: Delta sigma_{2,1}(n) 4^n = ||k||^2.
  const auto r1 = leading_term_check(2, 1, WaveVector{1, 2}, ns);
  for (const auto &[n, v] : r1.sequence)
    EXPECT_EQ(v, 5) << n;
  EXPECT_TRUE(r1.passed);
  EXPECT_EQ(*leading_constant(2, 1, WaveVector{1, 2}), 5);
  EXPECT_FALSE(leading_constant(3, 2, WaveVector{1, 1, 1}).has_value());
}

TEST(LeadingTerm, Validation) {
  const std::vector<long> ns{20, 30, 40};
  const std::vector<long> short_range{20, 30};
  const std::vector<long> unsorted{30, 20, 40};
  EXPECT_THROW(leading_term_check(2, 2, WaveVector{0, 1}, ns), std::invalid_argument);
  EXPECT_THROW(leading_term_check(2, 2, WaveVector{1, 1}, short_range), std::invalid_argument);
  EXPECT_THROW(leading_term_check(2, 2, WaveVector{1, 1}, unsorted), std::invalid_argument);
}
