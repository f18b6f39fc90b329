#pragma once

// Finite Fourier series on [0,1]^d, the Gaussian Fourier multiplier and the
// test-function families used by the convergence studies.

#include "sparsegauss/numerics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sparsegauss {

/// Integer frequency vector k in Z^d.
class WaveVector {
public:
  WaveVector() = default;
  WaveVector(std::initializer_list<std::int64_t> c) : components_(c) {}
  explicit WaveVector(std::vector<std::int64_t> c) : components_(std::move(c)) {}

  static WaveVector zero(std::size_t d) {
    return WaveVector(std::vector<std::int64_t>(d, 0));
  }

  [[nodiscard]] std::size_t dimension() const noexcept {
    return components_.size();
  }
  [[nodiscard]] std::int64_t operator[](std::size_t i) const {
    return components_[i];
  }
  [[nodiscard]] std::span<const std::int64_t> components() const noexcept {
    return components_;
  }
  [[nodiscard]] bool is_zero() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](auto c) { return c == 0; });
  }
  [[nodiscard]] WaveVector operator-() const {
    WaveVector out = *this;
    for (auto &c : out.components_)
      c = -c;
    return out;
  }
  /// ||k||^2, exact.
  [[nodiscard]] BigInt norm2() const {
    BigInt s = 0;
    for (auto c : components_) {
      BigInt v = static_cast<long>(c);
      s += v * v;
    }
    return s;
  }
  [[nodiscard]] std::int64_t max_abs() const noexcept {
    std::int64_t m = 0;
    for (auto c : components_)
      m = std::max<std::int64_t>(m, c < 0 ? -c : c);
    return m;
  }

  friend auto operator<=>(const WaveVector &, const WaveVector &) = default;

private:
  std::vector<std::int64_t> components_;
};

/// A point of [0,1]^d with exact rational coordinates.
using Point = std::vector<BigRational>;

inline Point to_point(std::span<const double> x) {
  Point p;
  p.reserve(x.size());
  for (double v : x)
    p.emplace_back(v);
  return p;
}

/// Positive per-axis kernel scales h_i.
class ScaleVector {
public:
  explicit ScaleVector(std::vector<BigRational> h) : h_(std::move(h)) {
    if (h_.empty())
      throw std::invalid_argument("ScaleVector: empty");
    for (const auto &v : h_)
      if (v <= 0)
        throw std::invalid_argument("ScaleVector: scales must be positive");
  }

  static ScaleVector isotropic(const BigRational &h, std::size_t d) {
    return ScaleVector(std::vector<BigRational>(d, h));
  }
  /// h_i = 2^-levels_i.
  static ScaleVector from_levels(std::span<const int> levels) {
    std::vector<BigRational> h;
    for (int l : levels)
      h.push_back(inverse_power_of_two(static_cast<unsigned long>(l)));
    return ScaleVector(std::move(h));
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return h_.size(); }
  [[nodiscard]] const BigRational &operator[](std::size_t i) const {
    return h_[i];
  }

private:
  std::vector<BigRational> h_;
};

/// psi_hat(z) = exp(-2 pi^2 z^2), the Fourier transform of the unit Gaussian.
inline BigReal gaussian_hat(const BigReal &z, const PrecisionContext &ctx) {
  const BigReal p = pi(ctx);
  BigReal arg = p * p * z * z;
  arg *= -2L;
  return exp_real(arg, ctx);
}

inline BigReal gaussian_hat(const BigRational &z, const PrecisionContext &ctx) {
  return gaussian_hat(BigReal(z, ctx), ctx);
}

/// prod_i psi_hat(h_i k_i).
inline BigReal axis_multiplier(const ScaleVector &h, const WaveVector &k,
                               const PrecisionContext &ctx) {
  if (h.dimension() != k.dimension())
    throw std::invalid_argument("axis_multiplier: dimension mismatch");
  BigReal out(1L, ctx);
  for (std::size_t i = 0; i < k.dimension(); ++i) {
    if (k[i] == 0)
      continue;
    out *= gaussian_hat(BigRational(h[i] * static_cast<long>(k[i])), ctx);
  }
  return out;
}

struct SeriesTerm {
  WaveVector k;
  BigComplex c;
};

/// Finite Fourier series sum_k c_k e_k with arbitrary-precision coefficients.
class FourierSeries {
public:
  FourierSeries(std::size_t dimension, std::vector<SeriesTerm> terms,
                bool real_valued)
      : dimension_(dimension), terms_(std::move(terms)),
        real_valued_(real_valued) {
    for (const auto &t : terms_)
      if (t.k.dimension() != dimension_)
        throw std::invalid_argument("FourierSeries: wave vector dimension");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] const std::vector<SeriesTerm> &terms() const noexcept {
    return terms_;
  }
  [[nodiscard]] bool real_valued() const noexcept { return real_valued_; }

  /// Sum of |c_k|.
  [[nodiscard]] BigReal abs_sum(const PrecisionContext &ctx) const {
    BigReal s(ctx);
    for (const auto &t : terms_)
      s += t.c.modulus();
    return s;
  }

  /// f(x) = sum_k c_k exp(2 pi i k.x). The phase k.x is reduced mod 1 exactly
  /// before the trigonometric evaluation. For real-valued series the
  /// imaginary residual is checked against 2^(8-bits) sum|c_k| and zeroed.
  [[nodiscard]] BigComplex evaluate(const Point &x,
                                    const PrecisionContext &ctx) const {
    if (x.size() != dimension_)
      throw std::invalid_argument("evaluate: point dimension mismatch");
    const BigReal two_pi = pi(ctx) * 2L;
    BigComplex out(ctx);
    for (const auto &t : terms_) {
      BigRational phase = 0;
      for (std::size_t i = 0; i < dimension_; ++i)
        phase += x[i] * static_cast<long>(t.k[i]);
      BigInt whole;
      mpz_fdiv_q(whole.get_mpz_t(), phase.get_num_mpz_t(),
                 phase.get_den_mpz_t());
      phase -= whole;
      const auto [s, c] = sin_cos(BigReal(phase, ctx) * two_pi);
      out.re += t.c.re * c - t.c.im * s;
      out.im += t.c.re * s + t.c.im * c;
    }
    if (real_valued_) {
      const BigReal limit = ldexp(abs_sum(ctx), 8 - static_cast<long>(ctx.bits()));
      if (abs(out.im) > limit)
        throw std::logic_error("evaluate: imaginary residual of a real-valued "
                               "series exceeds 2^(8-bits)");
      out.im = BigReal(ctx);
    }
    return out;
  }

  [[nodiscard]] BigReal evaluate_real(const Point &x,
                                      const PrecisionContext &ctx) const {
    if (!real_valued_)
      throw std::logic_error("evaluate_real: series is not real-valued");
    return evaluate(x, ctx).re;
  }

  /// Real values on the uniform grid {j/resolution : 0 <= j_i <= resolution}^d
  /// in row-major order (last axis fastest). Phases are looked up in a table
  /// of resolution-th roots of unity. When the coefficients fill most of
  /// their bounding box the sum is factorised one axis at a time.
  [[nodiscard]] std::vector<BigReal>
  sample_grid(unsigned resolution, const PrecisionContext &ctx) const {
    if (!real_valued_)
      throw std::logic_error("sample_grid: series is not real-valued");
    if (resolution == 0)
      throw std::invalid_argument("sample_grid: resolution must be positive");
    const auto res = static_cast<std::int64_t>(resolution);
    std::vector<BigReal> cos_t, sin_t;
    cos_t.reserve(resolution);
    sin_t.reserve(resolution);
    const BigReal step = pi(ctx) * 2L / static_cast<long>(resolution);
    for (std::int64_t t = 0; t < res; ++t) {
      auto [s, c] = sin_cos(step * static_cast<long>(t));
      sin_t.push_back(std::move(s));
      cos_t.push_back(std::move(c));
    }
    auto phase_of = [res](std::int64_t k, std::int64_t j) {
      std::int64_t p = ((k % res) * j) % res;
      return static_cast<std::size_t>(p < 0 ? p + res : p);
    };

    std::vector<std::int64_t> K(dimension_, 0);
    for (const auto &t : terms_)
      for (std::size_t i = 0; i < dimension_; ++i)
        K[i] = std::max(K[i], t.k[i] < 0 ? -t.k[i] : t.k[i]);
    double box = 1;
    for (auto v : K)
      box *= static_cast<double>(2 * v + 1);

    if (dimension_ > 0 && box <= 4.0 * static_cast<double>(terms_.size()) + 64) {
      // Dense box [-K_i, K_i]; transform axis a from 2K_a+1 slots to res+1.
      std::vector<std::size_t> shape(dimension_);
      for (std::size_t i = 0; i < dimension_; ++i)
        shape[i] = static_cast<std::size_t>(2 * K[i] + 1);
      auto volume = [&] {
        std::size_t v = 1;
        for (auto s : shape)
          v *= s;
        return v;
      };
      std::vector<BigComplex> data(volume(), BigComplex(ctx));
      for (const auto &t : terms_) {
        std::size_t flat = 0;
        for (std::size_t i = 0; i < dimension_; ++i)
          flat = flat * shape[i] + static_cast<std::size_t>(t.k[i] + K[i]);
        data[flat] += t.c;
      }
      for (std::size_t a = 0; a < dimension_; ++a) {
        std::size_t outer = 1, inner = 1;
        for (std::size_t i = 0; i < a; ++i)
          outer *= shape[i];
        for (std::size_t i = a + 1; i < dimension_; ++i)
          inner *= shape[i];
        const std::size_t from = shape[a];
        const std::size_t to = resolution + 1;
        std::vector<BigComplex> next(outer * to * inner, BigComplex(ctx));
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t j = 0; j < to; ++j)
            for (std::size_t t = 0; t < from; ++t) {
              const std::size_t ph = phase_of(
                  static_cast<std::int64_t>(t) - K[a], static_cast<std::int64_t>(j));
              for (std::size_t in = 0; in < inner; ++in) {
                const BigComplex &c = data[(o * from + t) * inner + in];
                if (c.re.is_zero() && c.im.is_zero())
                  continue;
                BigComplex &dst = next[(o * to + j) * inner + in];
                dst.re += c.re * cos_t[ph] - c.im * sin_t[ph];
                dst.im += c.re * sin_t[ph] + c.im * cos_t[ph];
              }
            }
        data = std::move(next);
        shape[a] = to;
      }
      std::vector<BigReal> out;
      out.reserve(data.size());
      for (auto &c : data)
        out.push_back(std::move(c.re));
      return out;
    }

    std::size_t count = 1;
    for (std::size_t i = 0; i < dimension_; ++i)
      count *= resolution + 1;
    std::vector<BigReal> out;
    out.reserve(count);
    std::vector<std::int64_t> j(dimension_, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      BigReal v(ctx);
      for (const auto &t : terms_) {
        std::int64_t phase = 0;
        for (std::size_t i = 0; i < dimension_; ++i)
          phase = (phase + (t.k[i] % res) * j[i]) % res;
        if (phase < 0)
          phase += res;
        v += t.c.re * cos_t[phase];
        v -= t.c.im * sin_t[phase];
      }
      out.push_back(std::move(v));
      for (std::size_t i = dimension_; i-- > 0;) {
        if (++j[i] <= res)
          break;
        j[i] = 0;
      }
    }
    return out;
  }

private:
  std::size_t dimension_;
  std::vector<SeriesTerm> terms_;
  bool real_valued_;
};

/// Finitely supported periodic function f = sum_k fhat(k) e_k with
/// double-precision coefficients (the coefficients define the function
/// exactly; all downstream arithmetic runs at a chosen BigReal precision).
class PeriodicFunction {
public:
  using Coefficients = std::map<WaveVector, std::complex<double>>;

  /// With real_valued set, fhat(-k) must equal conj(fhat(k)) exactly for
  /// every stored k.
  PeriodicFunction(std::size_t dimension, Coefficients coefficients,
                   bool real_valued)
      : dimension_(dimension), coefficients_(std::move(coefficients)),
        real_valued_(real_valued) {
    if (dimension_ == 0)
      throw std::invalid_argument("PeriodicFunction: dimension must be >= 1");
    for (const auto &[k, c] : coefficients_) {
      if (k.dimension() != dimension_)
        throw std::invalid_argument(
            "PeriodicFunction: wave vector dimension mismatch");
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("PeriodicFunction: non-finite coefficient");
    }
    if (real_valued_) {
      for (const auto &[k, c] : coefficients_) {
        const auto it = coefficients_.find(-k);
        if (it == coefficients_.end() || it->second != std::conj(c))
          throw std::invalid_argument(
              "PeriodicFunction: real-valued function requires "
              "fhat(-k) = conj(fhat(k))");
      }
    }
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] const Coefficients &coefficients() const noexcept {
    return coefficients_;
  }
  [[nodiscard]] bool real_valued() const noexcept { return real_valued_; }
  [[nodiscard]] std::int64_t max_frequency() const noexcept {
    std::int64_t m = 0;
    for (const auto &[k, c] : coefficients_)
      m = std::max(m, k.max_abs());
    return m;
  }

  [[nodiscard]] FourierSeries series(const PrecisionContext &ctx) const {
    std::vector<SeriesTerm> terms;
    terms.reserve(coefficients_.size());
    for (const auto &[k, c] : coefficients_)
      terms.push_back({k, BigComplex(BigReal(c.real(), ctx),
                                     BigReal(c.imag(), ctx))});
    return FourierSeries(dimension_, std::move(terms), real_valued_);
  }

private:
  std::size_t dimension_;
  Coefficients coefficients_;
  bool real_valued_;
};

inline BigComplex evaluate(const PeriodicFunction &f, const Point &x,
                           const PrecisionContext &ctx) {
  if (x.size() != f.dimension())
    throw std::invalid_argument("evaluate: point dimension mismatch");
  return f.series(ctx).evaluate(x, ctx);
}

/// (sum_{k != 0} ||k||^(2 beta) |fhat(k)|^2)^(1/2).
inline BigReal sobolev_norm(const PeriodicFunction &f, double beta,
                            const PrecisionContext &ctx) {
  BigReal sum(ctx);
  const BigReal b(beta, ctx);
  for (const auto &[k, c] : f.coefficients()) {
    if (k.is_zero())
      continue;
    const BigReal weight = pow(BigReal(k.norm2(), ctx), b);
    const BigReal re(c.real(), ctx);
    const BigReal im(c.imag(), ctx);
    sum += weight * (re * re + im * im);
  }
  return sqrt(sum);
}

// ---------------------------------------------------------------------------
// Test-function families

enum class FunctionFamily {
  constant,
  product_cosine,
  trig_monomial_pair,
  beta_decay_random
};

inline FunctionFamily parse_family(std::string_view name) {
  if (name == "constant")
    return FunctionFamily::constant;
  if (name == "product_cosine")
    return FunctionFamily::product_cosine;
  if (name == "trig_monomial_pair")
    return FunctionFamily::trig_monomial_pair;
  if (name == "beta_decay_random")
    return FunctionFamily::beta_decay_random;
  throw std::invalid_argument("unknown function family '" + std::string(name) +
                              "'");
}

struct FamilyParams {
  std::optional<WaveVector> k0;  // trig_monomial_pair
  double beta = 4.0;             // beta_decay_random
  std::int64_t max_frequency = 8; // beta_decay_random: K
  std::uint64_t seed = 1;        // beta_decay_random
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Phase in [0,1) for wave vector k: an independent SplitMix64 stream per k,
/// keyed by the seed, so phases do not depend on enumeration order.
inline double phase_for(std::uint64_t seed, const WaveVector &k) {
  std::uint64_t state = splitmix64(seed);
  for (auto c : k.components())
    state = splitmix64(state ^ static_cast<std::uint64_t>(c));
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

/// First nonzero component positive.
inline bool is_canonical_half(const WaveVector &k) {
  for (auto c : k.components())
    if (c != 0)
      return c > 0;
  return false;
}
} // namespace detail

/// constant: fhat(0)=1. product_cosine: fhat(k)=2^-d on {-1,1}^d.
/// trig_monomial_pair: fhat(+-k0)=1/2. beta_decay_random: Hermitian
/// coefficients u_k ||k||^-(beta+d/2+1/2) for 0 < ||k||_inf <= K with unit
/// phases u_k from SplitMix64(seed, k).
inline PeriodicFunction make_test_function(FunctionFamily kind, std::size_t d,
                                           const FamilyParams &params = {}) {
  if (d == 0)
    throw std::invalid_argument("make_test_function: dimension must be >= 1");
  PeriodicFunction::Coefficients coeffs;
  switch (kind) {
  case FunctionFamily::constant:
    coeffs[WaveVector::zero(d)] = 1.0;
    break;
  case FunctionFamily::product_cosine: {
    const double value = std::ldexp(1.0, -static_cast<int>(d));
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      std::vector<std::int64_t> k(d);
      for (std::size_t i = 0; i < d; ++i)
        k[i] = (mask >> i) & 1U ? 1 : -1;
      coeffs[WaveVector(std::move(k))] = value;
    }
    break;
  }
  case FunctionFamily::trig_monomial_pair: {
    if (!params.k0 || params.k0->dimension() != d)
      throw std::invalid_argument(
          "trig_monomial_pair: k0 of the function's dimension is required");
    if (params.k0->is_zero()) {
      coeffs[*params.k0] = 1.0;
    } else {
      coeffs[*params.k0] = 0.5;
      coeffs[-*params.k0] = 0.5;
    }
    break;
  }
  case FunctionFamily::beta_decay_random: {
    if (params.max_frequency < 1)
      throw std::invalid_argument("beta_decay_random: K must be >= 1");
    const std::int64_t K = params.max_frequency;
    const double exponent =
        params.beta + static_cast<double>(d) / 2.0 + 0.5;
    std::vector<std::int64_t> k(d, -K);
    while (true) {
      WaveVector wk(k);
      if (detail::is_canonical_half(wk)) {
        double n2 = 0;
        for (auto c : k)
          n2 += static_cast<double>(c) * static_cast<double>(c);
        const double magnitude = std::pow(n2, -exponent / 2.0);
        const double theta =
            2.0 * std::numbers::pi * detail::phase_for(params.seed, wk);
        const std::complex<double> c = std::polar(magnitude, theta);
        coeffs[wk] = c;
        coeffs[-wk] = std::conj(c);
      }
      std::size_t i = d;
      while (i-- > 0) {
        if (++k[i] <= K)
          break;
        k[i] = -K;
      }
      if (i == static_cast<std::size_t>(-1))
        break;
    }
    break;
  }
  }
  return PeriodicFunction(d, std::move(coeffs), true);
}

inline PeriodicFunction make_test_function(std::string_view kind, std::size_t d,
                                           const FamilyParams &params = {}) {
  return make_test_function(parse_family(kind), d, params);
}

// ---------------------------------------------------------------------------
// JSON function spec:
//   {"dimension": d, "real_valued": true,
//    "coefficients": [{"k": [..], "re": r, "im": i}, ...]}

inline PeriodicFunction function_from_json(const nlohmann::json &j) {
  if (!j.contains("dimension") || !j.contains("coefficients"))
    throw std::invalid_argument(
        "function spec: 'dimension' and 'coefficients' are required");
  const auto d = j.at("dimension").get<std::size_t>();
  const bool real_valued = j.value("real_valued", false);
  PeriodicFunction::Coefficients coeffs;
  for (const auto &entry : j.at("coefficients")) {
    WaveVector k(entry.at("k").get<std::vector<std::int64_t>>());
    const double re = entry.value("re", 0.0);
    const double im = entry.value("im", 0.0);
    auto [it, inserted] = coeffs.emplace(k, std::complex<double>(re, im));
    if (!inserted)
      throw std::invalid_argument("function spec: duplicate wave vector");
  }
  return PeriodicFunction(d, std::move(coeffs), real_valued);
}

inline PeriodicFunction function_from_json(std::istream &in) {
  return function_from_json(nlohmann::json::parse(in));
}

inline nlohmann::json to_json(const PeriodicFunction &f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto &[k, c] : f.coefficients()) {
    coeffs.push_back({{"k", std::vector<std::int64_t>(k.components().begin(),
                                                      k.components().end())},
                      {"re", c.real()},
                      {"im", c.imag()}});
  }
  nlohmann::json out = {{"dimension", f.dimension()},
                        {"coefficients", std::move(coeffs)}};
  if (f.real_valued())
    out["real_valued"] = true;
  return out;
}

} // namespace sparsegauss
