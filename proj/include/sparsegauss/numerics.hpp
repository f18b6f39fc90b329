#pragma once

// Arbitrary-precision reals (MPFR), exact rationals and integers (GMP), and
// the "m.mm (e)" scientific rendering used for tabulated coefficients.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sparsegauss {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Raised when a caller asks for less precision than the default rule
/// guarantees and did not explicitly opt in.
class PrecisionPolicyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when two exact routes to the same quantity disagree.
class OracleDisagreement : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void widen_exponent_range() {
  // MPFR keeps the exponent range per thread; the coefficients for
  // k=(500,700,900) reach 2^-6e6, well inside the widest range.
  if (mpfr_get_emin() != mpfr_get_emin_min())
    mpfr_set_emin(mpfr_get_emin_min());
  if (mpfr_get_emax() != mpfr_get_emax_max())
    mpfr_set_emax(mpfr_get_emax_max());
}
} // namespace detail

/// Binary mantissa precision shared by a computation. Rounding is always
/// round-to-nearest-even.
class PrecisionContext {
public:
  static constexpr unsigned long min_bits = 64;

  explicit PrecisionContext(unsigned long bits) : bits_(bits) {
    if (bits < min_bits)
      throw std::invalid_argument("precision must be at least 64 bits, got " +
                                  std::to_string(bits));
    detail::widen_exponent_range();
  }

  [[nodiscard]] unsigned long bits() const noexcept { return bits_; }
  [[nodiscard]] mpfr_prec_t prec() const noexcept {
    return static_cast<mpfr_prec_t>(bits_);
  }

  friend bool operator==(const PrecisionContext &,
                         const PrecisionContext &) = default;

private:
  unsigned long bits_;
};

inline PrecisionContext make_context(long bits) {
  if (bits < static_cast<long>(PrecisionContext::min_bits))
    throw std::invalid_argument("precision must be at least 64 bits, got " +
                                std::to_string(bits));
  return PrecisionContext(static_cast<unsigned long>(bits));
}

/// Exact binomial coefficient; zero when r > n.
inline BigInt binomial(unsigned long n, unsigned long r) {
  BigInt out;
  if (r > n)
    return out;
  mpz_bin_uiui(out.get_mpz_t(), n, r);
  return out;
}

/// ceil(log2(x)) for x >= 1, exact.
inline unsigned long ceil_log2(const BigInt &x) {
  if (x <= 1)
    return 0;
  const auto bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  const bool power_of_two = mpz_scan1(x.get_mpz_t(), 0) == bits - 1;
  return power_of_two ? bits - 1 : bits;
}

/// Default working precision for the level-n, dimension-d error coefficient:
/// 2n + 128 + ceil(d log2(n+d)). The 2n bits are eaten by cancellation of the
/// O(n^(d-1)) order-one terms down to ~n^(d-1) 2^(-2n).
inline unsigned long default_bits(unsigned long n, unsigned long d) {
  BigInt base = n + d;
  BigInt power;
  mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), d);
  return 2 * n + 128 + ceil_log2(power);
}

/// Canonical num/den; mpq_class(num, den) alone does not reduce.
inline BigRational ratio(const BigInt &num, const BigInt &den) {
  if (den == 0)
    throw std::invalid_argument("ratio: zero denominator");
  BigRational out(num, den);
  out.canonicalize();
  return out;
}

inline BigRational pow(const BigRational &base, unsigned long e) {
  BigRational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  out.canonicalize();
  return out;
}

/// 2^(-e) as an exact rational.
inline BigRational inverse_power_of_two(unsigned long e) {
  BigRational out(1);
  mpz_mul_2exp(out.get_den_mpz_t(), out.get_den_mpz_t(), e);
  return out;
}

inline BigRational power_of_two(long e) {
  if (e < 0)
    return inverse_power_of_two(static_cast<unsigned long>(-e));
  BigRational out(1);
  mpz_mul_2exp(out.get_num_mpz_t(), out.get_num_mpz_t(),
               static_cast<unsigned long>(e));
  return out;
}

inline std::string to_string(const BigRational &q) {
  if (q.get_den() == 1)
    return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Arbitrary-precision binary floating-point value. Each value carries its own
/// precision; binary operations produce a result at the larger operand
/// precision. The exponent range is effectively unbounded (|log2| < 2^62).
class BigReal {
public:
  explicit BigReal(const PrecisionContext &ctx) : BigReal(ctx.prec()) {}

  BigReal(long value, const PrecisionContext &ctx) : BigReal(ctx.prec()) {
    mpfr_set_si(v_, value, MPFR_RNDN);
  }
  BigReal(int value, const PrecisionContext &ctx)
      : BigReal(static_cast<long>(value), ctx) {}
  BigReal(double value, const PrecisionContext &ctx) : BigReal(ctx.prec()) {
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  BigReal(const BigInt &value, const PrecisionContext &ctx)
      : BigReal(ctx.prec()) {
    mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
  }
  BigReal(const BigRational &value, const PrecisionContext &ctx)
      : BigReal(ctx.prec()) {
    mpfr_set_q(v_, value.get_mpq_t(), MPFR_RNDN);
  }

  BigReal(const BigReal &other) : BigReal(mpfr_get_prec(other.v_)) {
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigReal(BigReal &&other) noexcept : BigReal(MPFR_PREC_MIN) {
    mpfr_swap(v_, other.v_);
  }
  BigReal &operator=(const BigReal &other) {
    if (this != &other) {
      if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_))
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal &operator=(BigReal &&other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  /// Value rounded to a (possibly different) precision.
  [[nodiscard]] BigReal at(const PrecisionContext &ctx) const {
    BigReal out(ctx.prec());
    mpfr_set(out.v_, v_, MPFR_RNDN);
    return out;
  }

  [[nodiscard]] mpfr_prec_t precision() const noexcept {
    return mpfr_get_prec(v_);
  }
  [[nodiscard]] mpfr_srcptr get() const noexcept { return v_; }
  [[nodiscard]] mpfr_ptr get() noexcept { return v_; }

  [[nodiscard]] bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  [[nodiscard]] bool is_finite() const noexcept {
    return mpfr_number_p(v_) != 0;
  }
  [[nodiscard]] int sign() const noexcept { return mpfr_sgn(v_); }
  [[nodiscard]] double to_double() const noexcept {
    return mpfr_get_d(v_, MPFR_RNDN);
  }
  /// log2|x| as a double; usable far outside the double exponent range.
  [[nodiscard]] double log2_abs() const {
    if (is_zero())
      return -std::numeric_limits<double>::infinity();
    long exp = 0;
    const double mantissa = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
    return std::log2(std::abs(mantissa)) + static_cast<double>(exp);
  }

  BigReal &operator+=(const BigReal &o) {
    widen_to(o);
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigReal &operator-=(const BigReal &o) {
    widen_to(o);
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigReal &operator*=(const BigReal &o) {
    widen_to(o);
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigReal &operator/=(const BigReal &o) {
    widen_to(o);
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigReal &operator*=(long s) {
    mpfr_mul_si(v_, v_, s, MPFR_RNDN);
    return *this;
  }
  BigReal &operator/=(long s) {
    mpfr_div_si(v_, v_, s, MPFR_RNDN);
    return *this;
  }
  BigReal &operator+=(long s) {
    mpfr_add_si(v_, v_, s, MPFR_RNDN);
    return *this;
  }
  BigReal &operator-=(long s) {
    mpfr_sub_si(v_, v_, s, MPFR_RNDN);
    return *this;
  }
  BigReal &operator*=(const BigInt &s) {
    mpfr_mul_z(v_, v_, s.get_mpz_t(), MPFR_RNDN);
    return *this;
  }
  BigReal &operator*=(const BigRational &s) {
    mpfr_mul_q(v_, v_, s.get_mpq_t(), MPFR_RNDN);
    return *this;
  }

  friend BigReal operator+(BigReal a, const BigReal &b) { return a += b; }
  friend BigReal operator-(BigReal a, const BigReal &b) { return a -= b; }
  friend BigReal operator*(BigReal a, const BigReal &b) { return a *= b; }
  friend BigReal operator/(BigReal a, const BigReal &b) { return a /= b; }
  friend BigReal operator*(BigReal a, long s) { return a *= s; }
  friend BigReal operator*(long s, BigReal a) { return a *= s; }
  friend BigReal operator/(BigReal a, long s) { return a /= s; }
  friend BigReal operator+(BigReal a, long s) { return a += s; }
  friend BigReal operator-(BigReal a, long s) { return a -= s; }
  friend BigReal operator-(long s, const BigReal &a) {
    BigReal out(a.precision());
    mpfr_si_sub(out.v_, s, a.v_, MPFR_RNDN);
    return out;
  }
  friend BigReal operator+(long s, BigReal a) { return a += s; }
  friend BigReal operator/(long s, const BigReal &a) {
    BigReal out(a.precision());
    mpfr_si_div(out.v_, s, a.v_, MPFR_RNDN);
    return out;
  }
  friend BigReal operator*(BigReal a, const BigInt &s) { return a *= s; }
  friend BigReal operator*(BigReal a, const BigRational &s) { return a *= s; }
  friend BigReal operator-(BigReal a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

  friend bool operator==(const BigReal &a, const BigReal &b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigReal &a,
                                           const BigReal &b) {
    if (mpfr_unordered_p(a.v_, b.v_))
      return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater
                          : std::partial_ordering::equivalent);
  }

  friend std::ostream &operator<<(std::ostream &os, const BigReal &x) {
    char *s = nullptr;
    mpfr_asprintf(&s, "%.20Rg", x.v_);
    os << s;
    mpfr_free_str(s);
    return os;
  }

private:
  explicit BigReal(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }

  void widen_to(const BigReal &o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_))
      mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  }

  friend BigReal exp_real(const BigReal &, const PrecisionContext &);
  friend BigReal pi(const PrecisionContext &);
  friend BigReal abs(const BigReal &);
  friend BigReal sqrt(const BigReal &);
  friend BigReal pow(const BigReal &, const BigReal &);
  friend BigReal log2(const BigReal &);
  friend BigReal ldexp(const BigReal &, long);
  friend std::pair<BigReal, BigReal> sin_cos(const BigReal &);

  mpfr_t v_;
};

/// e^x at the context precision (correctly rounded, so the relative error is
/// within 2^-bits). Monotone in x.
inline BigReal exp_real(const BigReal &x, const PrecisionContext &ctx) {
  BigReal out(ctx.prec());
  mpfr_exp(out.v_, x.v_, MPFR_RNDN);
  return out;
}

inline BigReal pi(const PrecisionContext &ctx) {
  BigReal out(ctx.prec());
  mpfr_const_pi(out.v_, MPFR_RNDN);
  return out;
}

inline BigReal abs(const BigReal &x) {
  BigReal out(x.precision());
  mpfr_abs(out.v_, x.v_, MPFR_RNDN);
  return out;
}

inline BigReal sqrt(const BigReal &x) {
  BigReal out(x.precision());
  mpfr_sqrt(out.v_, x.v_, MPFR_RNDN);
  return out;
}

inline BigReal pow(const BigReal &base, const BigReal &e) {
  BigReal out(std::max(base.precision(), e.precision()));
  mpfr_pow(out.v_, base.v_, e.v_, MPFR_RNDN);
  return out;
}

inline BigReal log2(const BigReal &x) {
  BigReal out(x.precision());
  mpfr_log2(out.v_, x.v_, MPFR_RNDN);
  return out;
}

/// x * 2^e, exact.
inline BigReal ldexp(const BigReal &x, long e) {
  BigReal out(x.precision());
  mpfr_mul_2si(out.v_, x.v_, e, MPFR_RNDN);
  return out;
}

/// (sin x, cos x).
inline std::pair<BigReal, BigReal> sin_cos(const BigReal &x) {
  BigReal s(x.precision());
  BigReal c(x.precision());
  mpfr_sin_cos(s.v_, c.v_, x.v_, MPFR_RNDN);
  return {std::move(s), std::move(c)};
}

inline BigReal max(const BigReal &a, const BigReal &b) { return a < b ? b : a; }

/// Unit in the last place relative bound 2^(e - bits), as a BigReal.
inline BigReal relative_bound(long e, const PrecisionContext &ctx) {
  return ldexp(BigReal(1L, ctx), e - static_cast<long>(ctx.bits()));
}

/// |a - b| <= tol * max(|a|, |b|); exact equality when both are zero.
inline bool relatively_close(const BigReal &a, const BigReal &b,
                             const BigReal &tol) {
  const BigReal scale = max(abs(a), abs(b));
  return abs(a - b) <= tol * scale;
}

struct BigComplex {
  BigReal re;
  BigReal im;

  explicit BigComplex(const PrecisionContext &ctx) : re(ctx), im(ctx) {}
  BigComplex(BigReal r, BigReal i) : re(std::move(r)), im(std::move(i)) {}

  BigComplex &operator+=(const BigComplex &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  BigComplex &operator*=(const BigReal &s) {
    re *= s;
    im *= s;
    return *this;
  }
  friend BigComplex operator*(const BigComplex &a, const BigComplex &b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend BigComplex operator-(const BigComplex &a, const BigComplex &b) {
    return {a.re - b.re, a.im - b.im};
  }
  [[nodiscard]] BigReal modulus() const { return sqrt(re * re + im * im); }
};

// ---------------------------------------------------------------------------
// "m.mm (e)" scientific rendering

enum class DecimalRounding { nearest_even, toward_zero, away_from_zero };

namespace detail {
inline mpfr_rnd_t to_mpfr(DecimalRounding r) {
  switch (r) {
  case DecimalRounding::toward_zero:
    return MPFR_RNDZ;
  case DecimalRounding::away_from_zero:
    return MPFR_RNDA;
  case DecimalRounding::nearest_even:
  default:
    return MPFR_RNDN;
  }
}
} // namespace detail

/// Renders x as "m.mm (e)" with three significant digits, 1 <= m.mm < 10;
/// exact zero renders as "0".
inline std::string
format_paper_sci(const BigReal &x,
                 DecimalRounding rounding = DecimalRounding::nearest_even) {
  if (!x.is_finite())
    throw std::invalid_argument("format_paper_sci: non-finite value");
  if (x.is_zero())
    return "0";
  mpfr_exp_t exp10 = 0;
  std::unique_ptr<char, void (*)(char *)> raw(
      mpfr_get_str(nullptr, &exp10, 10, 3, x.get(), detail::to_mpfr(rounding)),
      mpfr_free_str);
  std::string digits(raw.get());
  std::string sign;
  if (!digits.empty() && digits.front() == '-') {
    sign = "-";
    digits.erase(0, 1);
  }
  return sign + digits.substr(0, 1) + "." + digits.substr(1) + " (" +
         std::to_string(static_cast<long>(exp10) - 1) + ")";
}

/// Exact rational value of an "m.mm (e)" string (or "0").
inline BigRational parse_paper_sci(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ')
      s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
      s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text == "0")
    return BigRational(0);
  const auto open = text.find('(');
  const auto close = text.find(')');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open)
    throw std::invalid_argument("parse_paper_sci: expected 'm.mm (e)', got '" +
                                std::string(text) + "'");
  std::string mantissa(trim(text.substr(0, open)));
  const long exponent =
      std::stol(std::string(trim(text.substr(open + 1, close - open - 1))));
  bool negative = false;
  if (!mantissa.empty() && mantissa.front() == '-') {
    negative = true;
    mantissa.erase(0, 1);
  }
  const auto dot = mantissa.find('.');
  long frac_digits = 0;
  if (dot != std::string::npos) {
    frac_digits = static_cast<long>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  if (mantissa.empty() ||
      mantissa.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("parse_paper_sci: bad mantissa in '" +
                                std::string(text) + "'");
  BigRational value(BigInt(mantissa, 10));
  const long shift = exponent - frac_digits;
  BigInt ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10,
                static_cast<unsigned long>(std::labs(shift)));
  if (shift >= 0)
    value *= BigRational(ten_pow);
  else
    value /= BigRational(ten_pow);
  value.canonicalize();
  return negative ? BigRational(-value) : value;
}

enum class PrintedMatch { exact, rounding_boundary, mismatch };

/// Compares a computed value with a printed three-figure rendering. A printed
/// value equal to the round-half-even rendering is an exact match; one equal
/// to the directed rounding on the other side of the computed value is a
/// rounding-boundary match.
inline PrintedMatch match_printed(const BigReal &value,
                                  std::string_view printed) {
  std::string want(printed);
  if (format_paper_sci(value) == want)
    return PrintedMatch::exact;
  if (format_paper_sci(value, DecimalRounding::toward_zero) == want ||
      format_paper_sci(value, DecimalRounding::away_from_zero) == want)
    return PrintedMatch::rounding_boundary;
  return PrintedMatch::mismatch;
}

inline std::string_view to_string(PrintedMatch m) {
  switch (m) {
  case PrintedMatch::exact:
    return "exact";
  case PrintedMatch::rounding_boundary:
    return "rounding-boundary";
  case PrintedMatch::mismatch:
  default:
    return "mismatch";
  }
}

} // namespace sparsegauss
