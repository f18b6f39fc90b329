#pragma once

// Exact rational oracles for the composition power sums
//   sigma_{d,p}(m,k) = sum_{|l|_1=m} (sum_i k_i^2 / 4^(l_i))^p
// and the polynomial identities built on them. Every "is a polynomial of
// degree t in m" claim is certified by (t+1)-th forward-difference
// annihilation over windows of consecutive m; nothing here is fitted.

#include "sparsegauss/fourier_model.hpp"
#include "sparsegauss/grids.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sparsegauss {

struct SigmaValue {
  long d;
  long p;
  long m;
  WaveVector k;
  BigRational value;
};

namespace detail {

inline void require_sigma_args(long d, long p, long m, const WaveVector &k) {
  if (d < 1)
    throw std::invalid_argument("sigma: d must be >= 1");
  if (p < 0)
    throw std::invalid_argument("sigma: p must be >= 0");
  if (static_cast<long>(k.dimension()) != d)
    throw std::invalid_argument("sigma: k must have d components");
  if (m < d)
    throw std::invalid_argument("sigma: m must be >= d");
}

inline BigRational square(std::int64_t k) {
  return BigRational(static_cast<long>(k)) * BigRational(static_cast<long>(k));
}

inline BigRational quarter_pow(long e) {
  return inverse_power_of_two(2UL * static_cast<unsigned long>(e));
}

} // namespace detail

inline SigmaValue sigma_bruteforce(long d, long p, long m, const WaveVector &k) {
  detail::require_sigma_args(d, p, m, k);
  if (p == 0)
    return {d, p, m, k,
            BigRational(binomial(static_cast<unsigned long>(m - 1),
                                 static_cast<unsigned long>(d - 1)))};
  BigRational total = 0;
  for_each_composition(m, static_cast<std::size_t>(d), [&](std::span<const int> l) {
    BigRational inner = 0;
    for (long i = 0; i < d; ++i)
      inner += detail::square(k[static_cast<std::size_t>(i)]) *
               detail::quarter_pow(l[static_cast<std::size_t>(i)]);
    total += pow(inner, static_cast<unsigned long>(p));
  });
  return {d, p, m, k, total};
}

/// Upper limit of the last-axis level in the recurrence. composition uses
/// l_d <= m-(d-1), the largest value a composition allows; printed uses
/// l_d <= m-d, which drops the compositions with l_1 = ... = l_{d-1} = 1.
enum class RecurrenceBound { composition, printed };

namespace detail {

inline BigRational sigma_rec(long d, long p, long m,
                             std::span<const std::int64_t> k,
                             RecurrenceBound bound,
                             std::map<std::tuple<long, long, long>, BigRational> &memo) {
  if (d == 1)
    return pow(square(k[0]) * quarter_pow(m), static_cast<unsigned long>(p));
  const auto key = std::make_tuple(d, p, m);
  if (auto it = memo.find(key); it != memo.end())
    return it->second;
  const long top = bound == RecurrenceBound::composition ? m - (d - 1) : m - d;
  const BigRational kd2 = square(k[static_cast<std::size_t>(d - 1)]);
  BigRational total = 0;
  for (long r = 0; r <= p; ++r) {
    BigRational inner = 0;
    for (long l = 1; l <= top; ++l)
      inner += sigma_rec(d - 1, p - r, m - l, k.first(static_cast<std::size_t>(d - 1)),
                         bound, memo) *
               quarter_pow(l * r);
    total += BigRational(binomial(static_cast<unsigned long>(p),
                                  static_cast<unsigned long>(r))) *
             pow(kd2, static_cast<unsigned long>(r)) * inner;
  }
  memo.emplace(key, total);
  return total;
}

} // namespace detail

/// sigma_{d,p}(m,k) = sum_{r=0}^p C(p,r) k_d^(2r)
///                    sum_{l_d} sigma_{d-1,p-r}(m-l_d, k_hat) / 4^(l_d r),
/// with sigma_{1,p}(m,k) = (k_1^2/4^m)^p.
inline SigmaValue
sigma_recurrence(long d, long p, long m, const WaveVector &k,
                 RecurrenceBound bound = RecurrenceBound::composition) {
  detail::require_sigma_args(d, p, m, k);
  std::map<std::tuple<long, long, long>, BigRational> memo;
  return {d, p, m, k, detail::sigma_rec(d, p, m, k.components(), bound, memo)};
}

/// Two-dimensional closed form:
///   sum_{r=0..p, 2r!=p} C(p,r) (k1^(2r) k2^(2(p-r)) + k1^(2(p-r)) k2^(2r))
///                       / (4^(mr) (4^(p-2r) - 1))
///   + [p even] C(p,p/2) k1^p k2^p (m-1) / 2^(mp).
inline SigmaValue sigma_closed_d2(long p, long m, const WaveVector &k) {
  if (k.dimension() != 2)
    throw std::invalid_argument("sigma_closed_d2: k must have 2 components");
  if (p < 1)
    throw std::invalid_argument("sigma_closed_d2: p must be >= 1");
  if (m < 2)
    throw std::invalid_argument("sigma_closed_d2: m must be >= 2");
  const BigRational a = detail::square(k[0]);
  const BigRational b = detail::square(k[1]);
  BigRational total = 0;
  for (long r = 0; r <= p; ++r) {
    if (2 * r == p)
      continue;
    const BigRational num =
        pow(a, static_cast<unsigned long>(r)) * pow(b, static_cast<unsigned long>(p - r)) +
        pow(a, static_cast<unsigned long>(p - r)) * pow(b, static_cast<unsigned long>(r));
    const BigRational den =
        power_of_two(2 * m * r) * (power_of_two(2 * (p - 2 * r)) - 1);
    total += BigRational(binomial(static_cast<unsigned long>(p),
                                  static_cast<unsigned long>(r))) *
             num / den;
  }
  if (p % 2 == 0) {
    // k1^p k2^p = (k1 k2)^p with p even.
    const BigRational kk = BigRational(static_cast<long>(k[0] * k[1]));
    total += BigRational(binomial(static_cast<unsigned long>(p),
                                  static_cast<unsigned long>(p / 2))) *
             pow(kk, static_cast<unsigned long>(p)) * BigRational(m - 1) *
             inverse_power_of_two(static_cast<unsigned long>(m * p));
  }
  return {2, p, m, k, total};
}

/// sigma_{d,1}(m,k) through the single weighted sum
/// ||k||^2 sum_{j=1}^{m-(d-1)} C(m-j-1, d-2) / 4^j.
inline SigmaValue sigma_p1_reduced(long d, long m, const WaveVector &k) {
  detail::require_sigma_args(d, 1, m, k);
  BigRational s = 0;
  for (long j = 1; j <= m - (d - 1); ++j)
    s += BigRational(binomial(static_cast<unsigned long>(m - j - 1),
                              static_cast<unsigned long>(d - 2 < 0 ? 0 : d - 2))) *
         detail::quarter_pow(j);
  if (d == 1)
    s = detail::quarter_pow(m);
  return {d, 1, m, k, BigRational(k.norm2()) * s};
}

// ---------------------------------------------------------------------------
// Forward differences

/// Delta^k f = sum_{q=0}^k (-1)^(k-q) C(k,q) f(q) over the first k+1 values.
inline BigRational forward_difference(std::span<const BigRational> values,
                                      unsigned long order) {
  if (values.size() < order + 1)
    throw std::invalid_argument("forward_difference: sequence too short");
  BigRational out = 0;
  for (unsigned long q = 0; q <= order; ++q) {
    const BigRational term = BigRational(binomial(order, q)) * values[q];
    if ((order - q) % 2 == 0)
      out += term;
    else
      out -= term;
  }
  return out;
}

/// Result of an exact identity check over one or more windows.
struct IdentityReport {
  explicit IdentityReport(std::string n = {}) : name(std::move(n)) {}

  std::string name;
  bool passed = true;
  std::size_t windows = 0;
  std::vector<std::string> failures;

  void fail(std::string what) {
    passed = false;
    failures.push_back(std::move(what));
  }
};

/// Checks that g is a polynomial of degree <= degree on [lo, hi]: Delta^(degree+1)
/// vanishes on every window of degree+2 consecutive arguments.
inline void annihilate(IdentityReport &report, long lo, long hi,
                       unsigned long degree,
                       const std::function<BigRational(long)> &g) {
  std::vector<BigRational> values;
  for (long m = lo; m <= hi; ++m)
    values.push_back(g(m));
  const std::size_t width = degree + 2;
  for (std::size_t s = 0; s + width <= values.size(); ++s) {
    ++report.windows;
    const auto diff =
        forward_difference(std::span(values).subspan(s, width), degree + 1);
    if (diff != 0)
      report.fail("Delta^" + std::to_string(degree + 1) + " at m=" +
                  std::to_string(lo + static_cast<long>(s)) + " is " +
                  to_string(diff));
  }
}

// ---------------------------------------------------------------------------
// p = 1 structure

/// r(m) = sigma_{d,1}(m,k)/||k||^2 - (-1)^(d-1) (4/3)^(d-1) 4^-m is a
/// polynomial of degree d-2: Delta^(d-1) r = 0 on every window in [m_lo, m_hi].
inline IdentityReport sigma1_residual_check(long d, long m_lo, long m_hi,
                                            const WaveVector &k) {
  if (d < 2)
    throw std::invalid_argument("sigma1_residual_check: d must be >= 2");
  if (m_lo < d)
    throw std::invalid_argument("sigma1_residual_check: m must be >= d");
  if (m_hi - m_lo + 1 < d + 1)
    throw std::invalid_argument(
        "sigma1_residual_check: range must hold at least d+1 values");
  const BigInt n2 = k.norm2();
  if (n2 == 0)
    throw std::invalid_argument("sigma1_residual_check: k must be nonzero");
  IdentityReport report{"sigma1_residual d=" + std::to_string(d)};
  const BigRational tail = pow(BigRational(-4, 3), static_cast<unsigned long>(d - 1));
  annihilate(report, m_lo, m_hi, static_cast<unsigned long>(d - 2), [&](long m) -> BigRational {
    return sigma_bruteforce(d, 1, m, k).value / BigRational(n2) -
           tail * detail::quarter_pow(m);
  });
  return report;
}

/// The residual r(m) itself (for reporting the d=2 constant 1/3).
inline BigRational sigma1_residual(long d, long m, const WaveVector &k) {
  return sigma_bruteforce(d, 1, m, k).value / BigRational(k.norm2()) -
         pow(BigRational(-4, 3), static_cast<unsigned long>(d - 1)) *
             detail::quarter_pow(m);
}

struct Lemma41Report {
  long d;
  long m;
  long r;
  BigRational lhs;       // sum_{j=1}^{m-(d-1)} C(m-j-1,d-2) / 4^(jr)
  BigRational remainder; // lhs - (4^r/(1-4^r))^(d-1) / 4^(rm)
  BigRational difference; // Delta^(d-1) of the remainder over m..m+d-1
  bool passed;
};

inline BigRational lemma41_lhs(long d, long m, long r) {
  BigRational s = 0;
  for (long j = 1; j <= m - (d - 1); ++j)
    s += BigRational(binomial(static_cast<unsigned long>(m - j - 1),
                              static_cast<unsigned long>(d - 2))) *
         detail::quarter_pow(j * r);
  return s;
}

inline BigRational lemma41_remainder(long d, long m, long r) {
  const BigRational x = power_of_two(2 * r);
  return lemma41_lhs(d, m, r) -
         pow(x / (1 - x), static_cast<unsigned long>(d - 1)) *
             detail::quarter_pow(r * m);
}

/// The remainder of the finite sum after its exponential tail is a
/// polynomial of degree d-2 in m, checked on the window m..m+d-1.
inline Lemma41Report lemma41_check(long d, long m, long r) {
  if (d < 2)
    throw std::invalid_argument("lemma41_check: d must be >= 2");
  if (m <= d)
    throw std::invalid_argument("lemma41_check: m must exceed d");
  if (r < 1)
    throw std::invalid_argument("lemma41_check: r must be >= 1");
  std::vector<BigRational> window;
  for (long t = 0; t < d; ++t)
    window.push_back(lemma41_remainder(d, m + t, r));
  BigRational diff = forward_difference(window, static_cast<unsigned long>(d - 1));
  const bool ok = diff == 0;
  return {d, m, r, lemma41_lhs(d, m, r), window.front(), std::move(diff), ok};
}

// ---------------------------------------------------------------------------
// Weighted geometric sums G_i^(n)(x) = sum_{j=1}^n j^i x^j

/// Polynomial in (x, n) with rational coefficients; coefficient(a, b) is
/// the coefficient of x^a n^b.
class BivariatePolynomial {
public:
  BivariatePolynomial() = default;
  static BivariatePolynomial constant(const BigRational &c) {
    BivariatePolynomial p;
    p.set(0, 0, c);
    return p;
  }

  [[nodiscard]] BigRational coefficient(std::size_t a, std::size_t b) const {
    if (a >= c_.size() || b >= c_[a].size())
      return 0;
    return c_[a][b];
  }
  void set(std::size_t a, std::size_t b, const BigRational &v) {
    if (c_.size() <= a)
      c_.resize(a + 1);
    if (c_[a].size() <= b)
      c_[a].resize(b + 1, BigRational(0));
    c_[a][b] = v;
  }
  void add(std::size_t a, std::size_t b, const BigRational &v) {
    set(a, b, coefficient(a, b) + v);
  }

  /// Degree in x (-1 for the zero polynomial).
  [[nodiscard]] long degree_x() const {
    for (std::size_t a = c_.size(); a-- > 0;)
      for (const auto &v : c_[a])
        if (v != 0)
          return static_cast<long>(a);
    return -1;
  }
  /// Degree in n (-1 for the zero polynomial).
  [[nodiscard]] long degree_n() const {
    long best = -1;
    for (const auto &row : c_)
      for (std::size_t b = row.size(); b-- > 0;)
        if (row[b] != 0) {
          best = std::max(best, static_cast<long>(b));
          break;
        }
    return best;
  }

  [[nodiscard]] BigRational evaluate(const BigRational &x,
                                     const BigRational &n) const {
    BigRational out = 0;
    BigRational xa = 1;
    for (const auto &row : c_) {
      BigRational nb = 1;
      for (const auto &v : row) {
        out += v * xa * nb;
        nb *= n;
      }
      xa *= x;
    }
    return out;
  }

  /// d/dx.
  [[nodiscard]] BivariatePolynomial derivative_x() const {
    BivariatePolynomial out;
    for (std::size_t a = 1; a < c_.size(); ++a)
      for (std::size_t b = 0; b < c_[a].size(); ++b)
        if (c_[a][b] != 0)
          out.add(a - 1, b, c_[a][b] * BigRational(static_cast<long>(a)));
    return out;
  }

  friend BivariatePolynomial operator+(const BivariatePolynomial &p,
                                       const BivariatePolynomial &q) {
    BivariatePolynomial out = p;
    for (std::size_t a = 0; a < q.c_.size(); ++a)
      for (std::size_t b = 0; b < q.c_[a].size(); ++b)
        if (q.c_[a][b] != 0)
          out.add(a, b, q.c_[a][b]);
    return out;
  }
  friend BivariatePolynomial operator*(const BivariatePolynomial &p,
                                       const BivariatePolynomial &q) {
    BivariatePolynomial out;
    for (std::size_t a = 0; a < p.c_.size(); ++a)
      for (std::size_t b = 0; b < p.c_[a].size(); ++b) {
        if (p.c_[a][b] == 0)
          continue;
        for (std::size_t e = 0; e < q.c_.size(); ++e)
          for (std::size_t f = 0; f < q.c_[e].size(); ++f)
            if (q.c_[e][f] != 0)
              out.add(a + e, b + f, p.c_[a][b] * q.c_[e][f]);
      }
    return out;
  }

private:
  std::vector<std::vector<BigRational>> c_;
};

struct GeomPolys {
  BivariatePolynomial q; // q_{i-1}(x)
  BivariatePolynomial p; // p_i(x, n)
};

/// q_{i-1} and p_i from q_{-1} = p_0 = 1 (so q_0 = 1, p_1 = 1+n-nx) via
///   q_i     = (1+ix) q_{i-1} + x(1-x) q'_{i-1}
///   p_{i+1} = (1+ix+n-nx) p_i + x(1-x) dp_i/dx.
inline GeomPolys geom_polys(unsigned i) {
  BivariatePolynomial q = BivariatePolynomial::constant(1);
  BivariatePolynomial p = BivariatePolynomial::constant(1);
  BivariatePolynomial x_one_minus_x;
  x_one_minus_x.set(1, 0, 1);
  x_one_minus_x.set(2, 0, -1);
  for (unsigned s = 0; s < i; ++s) {
    BivariatePolynomial qa;
    qa.set(0, 0, 1);
    qa.set(1, 0, BigRational(static_cast<long>(s)));
    BivariatePolynomial pa = qa;
    pa.set(0, 1, 1);
    pa.set(1, 1, -1);
    q = qa * q + x_one_minus_x * q.derivative_x();
    p = pa * p + x_one_minus_x * p.derivative_x();
  }
  return {std::move(q), std::move(p)};
}

inline BigRational weighted_geom_direct(unsigned i, long n, const BigRational &x) {
  BigRational out = 0;
  BigRational xj = 1;
  for (long j = 1; j <= n; ++j) {
    xj *= x;
    out += pow(BigRational(j), i) * xj;
  }
  return out;
}

/// x (q_{i-1}(x) - x^n p_i(x,n)) / (1-x)^(i+1), for x != 1.
inline BigRational weighted_geom_closed(unsigned i, long n, const BigRational &x,
                                        const GeomPolys &polys) {
  if (x == 1)
    throw std::invalid_argument("weighted_geom_closed: x must differ from 1");
  const BigRational xn = pow(x, static_cast<unsigned long>(n));
  return x *
         (polys.q.evaluate(x, 0) - xn * polys.p.evaluate(x, BigRational(n))) /
         pow(1 - x, static_cast<unsigned long>(i) + 1);
}

/// G_i^(n)(x) by direct summation; for x != 1 the closed form is evaluated
/// too and must agree exactly (OracleDisagreement otherwise).
inline BigRational weighted_geom(unsigned i, long n, const BigRational &x) {
  BigRational direct = weighted_geom_direct(i, n, x);
  if (x != 1) {
    const BigRational closed = weighted_geom_closed(i, n, x, geom_polys(i));
    if (closed != direct)
      throw OracleDisagreement("weighted_geom: closed form " + to_string(closed) +
                               " differs from direct sum " + to_string(direct));
  }
  return direct;
}

/// Closed form vs direct summation at `samples` pseudo-random rational
/// points (n in 1..40, x = a/b with x != 1), seeded deterministically.
inline IdentityReport geom_rep_check(unsigned i, unsigned samples,
                                     std::uint64_t seed = 1) {
  IdentityReport report{"weighted_geom_rep i=" + std::to_string(i)};
  const GeomPolys polys = geom_polys(i);
  std::mt19937_64 rng(seed * 1000003ULL + i);
  std::uniform_int_distribution<long> pick_n(1, 40);
  std::uniform_int_distribution<long> pick_num(-9, 9);
  std::uniform_int_distribution<long> pick_den(1, 7);
  for (unsigned s = 0; s < samples; ++s) {
    const long n = pick_n(rng);
    BigRational x;
    do {
      x = BigRational(pick_num(rng), pick_den(rng));
      x.canonicalize();
    } while (x == 1);
    ++report.windows;
    const auto direct = weighted_geom_direct(i, n, x);
    const auto closed = weighted_geom_closed(i, n, x, polys);
    if (direct != closed)
      report.fail("n=" + std::to_string(n) + " x=" + to_string(x));
  }
  return report;
}

/// Degree bookkeeping: deg_x q_{i-1} = i-1, deg_x p_i = deg_n p_i = i.
inline bool geom_degrees_ok(unsigned i, const GeomPolys &polys) {
  return polys.q.degree_x() == static_cast<long>(i) - 1 &&
         polys.p.degree_x() == static_cast<long>(i) &&
         polys.p.degree_n() == static_cast<long>(i);
}

/// G_i^(n)(1) - n^(i+1)/(i+1) is a polynomial of degree i in n.
inline IdentityReport faulhaber_check(unsigned i, long n_lo = 1, long n_hi = 0) {
  if (n_hi == 0)
    n_hi = n_lo + static_cast<long>(i) + 6;
  IdentityReport report{"faulhaber i=" + std::to_string(i)};
  annihilate(report, n_lo, n_hi, i, [&](long n) -> BigRational {
    return weighted_geom_direct(i, n, 1) -
           pow(BigRational(n), i + 1UL) / BigRational(static_cast<long>(i) + 1);
  });
  return report;
}

// ---------------------------------------------------------------------------
// Auxiliary sums used in the d-dimensional expansion

/// sum_{j=1}^{m-d} 4^(-jt) - 1/(4^t - 1) equals a constant times 4^(-mt):
/// its product with 4^(mt) is constant in m.
inline IdentityReport geometric_tail_check(long d, long t, long m_lo, long m_hi) {
  IdentityReport report{"geometric_tail t=" + std::to_string(t)};
  const BigRational limit = 1 / (power_of_two(2 * t) - 1);
  annihilate(report, m_lo, m_hi, 0, [&](long m) -> BigRational {
    BigRational s = 0;
    for (long j = 1; j <= m - d; ++j)
      s += detail::quarter_pow(j * t);
    return (s - limit) * power_of_two(2 * m * t);
  });
  return report;
}

/// For t >= 1: sum_{j=1}^{m-d} (m-j)^i / 4^(tj) equals
/// (4^(t(d-m)) p_i(4^t, d-1) - p_i(4^t, m-1)) / (1-4^t)^(i+1) exactly, and
/// after removing the 4^(-tm) part it is a polynomial of degree i in m.
inline IdentityReport weighted_tail_check(long d, long t, unsigned i, long m_lo,
                                          long m_hi) {
  IdentityReport report{"weighted_tail t=" + std::to_string(t) +
                        " i=" + std::to_string(i)};
  const GeomPolys polys = geom_polys(i);
  const BigRational x = power_of_two(2 * t);
  const BigRational scale = pow(1 - x, i + 1UL);
  auto lhs = [&](long m) -> BigRational {
    BigRational s = 0;
    for (long j = 1; j <= m - d; ++j)
      s += pow(BigRational(m - j), i) * detail::quarter_pow(t * j);
    return s;
  };
  const BigRational fixed = polys.p.evaluate(x, BigRational(d - 1));
  for (long m = m_lo; m <= m_hi; ++m) {
    const BigRational closed =
        (detail::quarter_pow(t * (m - d)) * fixed -
         polys.p.evaluate(x, BigRational(m - 1))) /
        scale;
    ++report.windows;
    if (closed != lhs(m))
      report.fail("closed form differs at m=" + std::to_string(m));
  }
  annihilate(report, m_lo, m_hi, i, [&](long m) -> BigRational {
    return lhs(m) - detail::quarter_pow(t * (m - d)) * fixed / scale;
  });
  return report;
}

/// t = 0: sum_{j=1}^{m-d} (m-j)^i - m^(i+1)/(i+1) is a polynomial of degree i.
inline IdentityReport power_sum_check(long d, unsigned i, long m_lo, long m_hi) {
  IdentityReport report{"power_sum i=" + std::to_string(i)};
  annihilate(report, m_lo, m_hi, i, [&](long m) -> BigRational {
    BigRational s = 0;
    for (long j = 1; j <= m - d; ++j)
      s += pow(BigRational(m - j), i);
    return s - pow(BigRational(m), i + 1UL) / BigRational(static_cast<long>(i) + 1);
  });
  return report;
}

/// t = -1: sum_{j=1}^{m-d} 4^j (m-j)^i = C 4^m + (degree-i polynomial). C is
/// eliminated from Delta^(i+1) at m_lo; the remaining windows must then
/// annihilate. Returns the report; the constant is written to *constant.
inline IdentityReport growing_sum_check(long d, unsigned i, long m_lo, long m_hi,
                                        BigRational *constant = nullptr) {
  IdentityReport report{"growing_sum i=" + std::to_string(i)};
  auto lhs = [&](long m) -> BigRational {
    BigRational s = 0;
    for (long j = 1; j <= m - d; ++j)
      s += power_of_two(2 * j) * pow(BigRational(m - j), i);
    return s;
  };
  std::vector<BigRational> first;
  for (long m = m_lo; m <= m_lo + static_cast<long>(i) + 1; ++m)
    first.push_back(lhs(m));
  // Delta^(i+1) 4^m = 3^(i+1) 4^m.
  const BigRational c = forward_difference(first, i + 1UL) /
                        (pow(BigRational(3), i + 1UL) * power_of_two(2 * m_lo));
  if (constant)
    *constant = c;
  annihilate(report, m_lo, m_hi, i,
             [&](long m) -> BigRational { return lhs(m) - c * power_of_two(2 * m); });
  return report;
}

// ---------------------------------------------------------------------------
// Leading terms of Delta^(d-1) sigma_{d,p}

struct LeadingTermReport {
  long d;
  long p;
  WaveVector k;
  long power; // normalising power of n: d-1 when p = d, else d-2
  std::vector<std::pair<long, BigRational>> sequence; // (n, s(n) 4^n / n^power)
  double limit_estimate = 0;                          // last sequence value
  std::optional<BigRational> expected;                // known limit (d = 2)
  double spread = 0; // max pairwise relative gap over the last three values
  bool cauchy = false; // spread <= 5%
  bool passed = false; // cauchy, and within 5% of expected when known
};

/// s(n) = Delta^(d-1)[sigma_{d,p}(n+q, k)]_{q=0..d-1}.
inline BigRational leading_difference(long d, long p, long n, const WaveVector &k) {
  std::vector<BigRational> window;
  for (long q = 0; q < d; ++q)
    window.push_back(sigma_bruteforce(d, p, n + q, k).value);
  return forward_difference(window, static_cast<unsigned long>(d - 1));
}

/// Known limit of s(n) 4^n / n^power. p = d: d prod k_i^2 (-3/4)^(d-1).
/// d = 2, p != 2: -(3/4) p (k1^(2(p-1)) k2^2 + k1^2 k2^(2(p-1))) / (4^(p-2)-1).
inline std::optional<BigRational> leading_constant(long d, long p,
                                                   const WaveVector &k) {
  if (p == d) {
    BigRational prod = BigRational(d);
    for (auto ki : k.components())
      prod *= detail::square(ki);
    return prod * pow(BigRational(-3, 4), static_cast<unsigned long>(d - 1));
  }
  if (d == 2) {
    const BigRational a = detail::square(k[0]);
    const BigRational b = detail::square(k[1]);
    const BigRational c =
        BigRational(p) *
        (pow(a, static_cast<unsigned long>(p - 1)) * b +
         a * pow(b, static_cast<unsigned long>(p - 1))) /
        (power_of_two(2 * (p - 2)) - 1);
    return BigRational(-3, 4) * c;
  }
  return std::nullopt;
}

inline LeadingTermReport leading_term_check(long d, long p, const WaveVector &k,
                                            std::span<const long> n_range) {
  if (d < 2 || static_cast<long>(k.dimension()) != d)
    throw std::invalid_argument("leading_term_check: k must have d >= 2 components");
  for (auto ki : k.components())
    if (ki == 0)
      throw std::invalid_argument("leading_term_check: k has a zero component");
  if (p < 1)
    throw std::invalid_argument("leading_term_check: p must be >= 1");
  if (n_range.size() < 3)
    throw std::invalid_argument("leading_term_check: need at least three n");
  for (std::size_t i = 0; i < n_range.size(); ++i) {
    if (n_range[i] < d)
      throw std::invalid_argument("leading_term_check: n must be >= d");
    if (i > 0 && n_range[i] <= n_range[i - 1])
      throw std::invalid_argument("leading_term_check: n_range must ascend");
  }
  LeadingTermReport rep;
  rep.d = d;
  rep.p = p;
  rep.k = k;
  rep.power = p == d ? d - 1 : d - 2;
  for (long n : n_range) {
    const BigRational s = leading_difference(d, p, n, k);
    const BigRational v = s * power_of_two(2 * n) /
                          pow(BigRational(n), static_cast<unsigned long>(rep.power));
    rep.sequence.emplace_back(n, v);
  }
  const std::size_t last = rep.sequence.size();
  double lo = 0, hi = 0;
  for (std::size_t i = last - 3; i < last; ++i) {
    const double v = rep.sequence[i].second.get_d();
    lo = i == last - 3 ? v : std::min(lo, v);
    hi = i == last - 3 ? v : std::max(hi, v);
  }
  rep.limit_estimate = rep.sequence.back().second.get_d();
  rep.spread = rep.limit_estimate == 0 ? (hi - lo == 0 ? 0 : INFINITY)
                                       : (hi - lo) / std::abs(rep.limit_estimate);
  rep.cauchy = rep.spread <= 0.05;
  rep.expected = leading_constant(d, p, k);
  rep.passed = rep.cauchy;
  if (rep.expected && d == 2) {
    const double e = rep.expected->get_d();
    rep.passed = rep.passed && std::abs(rep.limit_estimate - e) <= 0.05 * std::abs(e);
  }
  return rep;
}

} // namespace sparsegauss
