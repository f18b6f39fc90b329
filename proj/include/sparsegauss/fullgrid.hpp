#pragma once

// Full-grid Gaussian convolution as a Fourier multiplier, the lattice
// quasi-interpolant, sampled sup-norm errors and observed-order studies.

#include "sparsegauss/fourier_model.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace sparsegauss {

/// 1 - prod_i psi_hat(h_i k_i); in [0, 1).
inline BigReal error_coeff_full(const ScaleVector &h, const WaveVector &k,
                                const PrecisionContext &ctx) {
  return 1L - axis_multiplier(h, k, ctx);
}

/// C_h(f) = sum_k fhat(k) prod_i psi_hat(h_i k_i) e_k.
class ConvolutionApproximant {
public:
  ConvolutionApproximant(PeriodicFunction base, ScaleVector scale,
                         FourierSeries series)
      : base_(std::move(base)), scale_(std::move(scale)),
        series_(std::move(series)) {}

  [[nodiscard]] const PeriodicFunction &base() const noexcept { return base_; }
  [[nodiscard]] const ScaleVector &scale() const noexcept { return scale_; }
  [[nodiscard]] const FourierSeries &series() const noexcept { return series_; }

  [[nodiscard]] BigComplex evaluate(const Point &x,
                                    const PrecisionContext &ctx) const {
    return series_.evaluate(x, ctx);
  }

private:
  PeriodicFunction base_;
  ScaleVector scale_;
  FourierSeries series_;
};

inline ConvolutionApproximant convolve(const PeriodicFunction &f,
                                       const ScaleVector &h,
                                       const PrecisionContext &ctx) {
  if (h.dimension() != f.dimension())
    throw std::invalid_argument("convolve: dimension mismatch");
  std::vector<SeriesTerm> terms;
  for (const auto &[k, c] : f.coefficients()) {
    const BigReal m = axis_multiplier(h, k, ctx);
    terms.push_back(
        {k, BigComplex(BigReal(c.real(), ctx) * m, BigReal(c.imag(), ctx) * m)});
  }
  return ConvolutionApproximant(
      f, h, FourierSeries(f.dimension(), std::move(terms), f.real_valued()));
}

// ---------------------------------------------------------------------------
// Quasi-interpolation Q_h(f)(x) = sum_j f(jh) Psi(x/h - j), h = 2^-n.

/// (2 pi)^(-1/2) exp(-t^2 / 2).
inline BigReal unit_gaussian(const BigReal &t, const PrecisionContext &ctx) {
  BigReal arg = t * t;
  arg /= -2L;
  return exp_real(arg, ctx) / sqrt(pi(ctx) * 2L);
}

/// Window half-width R = ceil(sqrt(2 ln 2 * bits_out)) + 1; 12 for the
/// default 80 bits.
inline int default_truncation_radius(unsigned bits_out = 80) {
  return static_cast<int>(
             std::ceil(std::sqrt(2.0 * std::log(2.0) * bits_out))) +
         1;
}

/// Bound on |Q_h(1)(x) - 1|: the neglected window tail plus the lattice
/// aliasing term. By Poisson summation sum_j psi(y - j) =
/// 1 + 2 sum_{m>=1} exp(-2 pi^2 m^2) cos(2 pi m y), so even the untruncated
/// lattice sum deviates from one by up to a = 2 sum exp(-2 pi^2 m^2) per axis
/// (~5.4e-9); the product over d axes contributes (1+a)^d - 1. The window
/// covers every offset within R + 1/2 of x/h, so each axis loses at most
/// 2 psi(R+1/2) / (1 - exp(-(R+1/2))).
inline BigReal quasi_constant_tail(int radius, std::size_t d,
                                   const PrecisionContext &ctx) {
  const BigReal p = pi(ctx);
  BigReal alias(ctx);
  for (long m = 1; m <= 4; ++m) {
    BigReal arg = p * p * (-2L * m * m);
    alias += exp_real(arg, ctx);
  }
  alias *= 2L;
  BigReal alias_total(1L, ctx);
  BigReal axis_tail = 2L * unit_gaussian(BigReal(radius + 0.5, ctx), ctx);
  axis_tail /= 1L - exp_real(BigReal(-(radius + 0.5), ctx), ctx);
  BigReal per_axis_max = alias + 1L;
  for (std::size_t i = 0; i < d; ++i)
    alias_total *= per_axis_max;
  alias_total -= 1L;
  BigReal truncation = axis_tail * static_cast<long>(d);
  for (std::size_t i = 1; i < d; ++i)
    truncation *= per_axis_max;
  return alias_total + truncation;
}

class QuasiInterpolant {
public:
  /// Samples f on the periodic lattice 2^-n Z^d (one period).
  QuasiInterpolant(const PeriodicFunction &f, int level, int radius,
                   const PrecisionContext &ctx)
      : dimension_(f.dimension()), level_(level), radius_(radius) {
    if (!f.real_valued())
      throw std::invalid_argument("QuasiInterpolant: f must be real-valued");
    if (level < 0 || level > 20)
      throw std::invalid_argument("QuasiInterpolant: level outside [0,20]");
    if (radius < 1)
      throw std::invalid_argument("QuasiInterpolant: radius must be >= 1");
    period_ = std::int64_t{1} << level;
    const auto grid = f.series(ctx).sample_grid(static_cast<unsigned>(period_), ctx);
    // Drop the duplicated endpoint j_i = 2^n of each axis.
    std::size_t count = 1;
    for (std::size_t i = 0; i < dimension_; ++i)
      count *= static_cast<std::size_t>(period_);
    samples_.reserve(count);
    std::vector<std::int64_t> j(dimension_, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t flat = 0;
      for (std::size_t i = 0; i < dimension_; ++i)
        flat = flat * static_cast<std::size_t>(period_ + 1) +
               static_cast<std::size_t>(j[i]);
      samples_.push_back(grid[flat]);
      for (std::size_t i = dimension_; i-- > 0;) {
        if (++j[i] < period_)
          break;
        j[i] = 0;
      }
    }
  }

  QuasiInterpolant(const PeriodicFunction &f, int level,
                   const PrecisionContext &ctx)
      : QuasiInterpolant(f, level, default_truncation_radius(), ctx) {}

  [[nodiscard]] int level() const noexcept { return level_; }
  [[nodiscard]] int radius() const noexcept { return radius_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }

  /// Sample f(j h) at a lattice index; indices wrap periodically.
  [[nodiscard]] const BigReal &sample(std::span<const std::int64_t> j) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < dimension_; ++i) {
      std::int64_t w = j[i] % period_;
      if (w < 0)
        w += period_;
      flat = flat * static_cast<std::size_t>(period_) + static_cast<std::size_t>(w);
    }
    return samples_[flat];
  }

  /// sum over j = round(x/h) + o, ||o||_inf <= R, of f(jh) Psi(x/h - j),
  /// sample indices wrapped periodically.
  [[nodiscard]] BigReal evaluate(const Point &x,
                                 const PrecisionContext &ctx) const {
    return window_sum(x, ctx, true);
  }

  /// The same window sum with every sample replaced by one.
  [[nodiscard]] BigReal window_weight(const Point &x,
                                      const PrecisionContext &ctx) const {
    return window_sum(x, ctx, false);
  }

private:
  BigReal window_sum(const Point &x, const PrecisionContext &ctx,
                     bool use_samples) const {
    if (x.size() != dimension_)
      throw std::invalid_argument("QuasiInterpolant: point dimension mismatch");
    const std::size_t width = static_cast<std::size_t>(2 * radius_ + 1);
    std::vector<std::int64_t> base(dimension_);
    std::vector<std::vector<BigReal>> weights(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) {
      const BigRational y = x[i] * BigRational(static_cast<long>(period_));
      BigRational shifted = y + BigRational(1, 2);
      BigInt rounded;
      mpz_fdiv_q(rounded.get_mpz_t(), shifted.get_num_mpz_t(),
                 shifted.get_den_mpz_t());
      base[i] = rounded.get_si();
      weights[i].reserve(width);
      for (int o = -radius_; o <= radius_; ++o) {
        const BigRational t = y - BigRational(static_cast<long>(base[i] + o));
        weights[i].push_back(unit_gaussian(BigReal(t, ctx), ctx));
      }
    }
    BigReal total(ctx);
    std::vector<std::size_t> o(dimension_, 0);
    std::vector<std::int64_t> j(dimension_);
    std::size_t count = 1;
    for (std::size_t i = 0; i < dimension_; ++i)
      count *= width;
    for (std::size_t idx = 0; idx < count; ++idx) {
      BigReal w(1L, ctx);
      for (std::size_t i = 0; i < dimension_; ++i) {
        w *= weights[i][o[i]];
        j[i] = base[i] + static_cast<std::int64_t>(o[i]) - radius_;
      }
      if (use_samples)
        w *= sample(j);
      total += w;
      for (std::size_t i = dimension_; i-- > 0;) {
        if (++o[i] < width)
          break;
        o[i] = 0;
      }
    }
    return total;
  }

  std::size_t dimension_;
  int level_;
  int radius_;
  std::int64_t period_ = 1;
  std::vector<BigReal> samples_;
};

inline BigReal quasi_interpolant_eval(const QuasiInterpolant &q, const Point &x,
                                      const PrecisionContext &ctx) {
  return q.evaluate(x, ctx);
}

// ---------------------------------------------------------------------------
// Sampled sup-norm errors

using Evaluator = std::function<BigReal(const Point &)>;

/// Points {j/resolution : 0 <= j_i <= resolution}^d, row-major (last axis
/// fastest), matching FourierSeries::sample_grid.
inline std::vector<Point> uniform_points(unsigned resolution, std::size_t d) {
  std::vector<Point> out;
  std::vector<long> j(d, 0);
  while (true) {
    Point p;
    for (std::size_t i = 0; i < d; ++i)
      p.emplace_back(j[i], static_cast<long>(resolution));
    for (auto &c : p)
      c.canonicalize();
    out.push_back(std::move(p));
    std::size_t i = d;
    while (i-- > 0) {
      if (++j[i] <= static_cast<long>(resolution))
        break;
      j[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1))
      return out;
  }
}

/// max |a(x) - b(x)| over the (resolution+1)^d uniform points.
inline BigReal sup_error(const Evaluator &a, const Evaluator &b,
                         unsigned resolution, std::size_t d,
                         const PrecisionContext &ctx) {
  BigReal worst(ctx);
  for (const auto &x : uniform_points(resolution, d))
    worst = max(worst, abs(a(x) - b(x)));
  return worst;
}

/// max |a_i - b_i| over two samplings of the same grid.
inline BigReal sup_error(std::span<const BigReal> a, std::span<const BigReal> b,
                         const PrecisionContext &ctx) {
  if (a.size() != b.size())
    throw std::invalid_argument("sup_error: sample counts differ");
  BigReal worst(ctx);
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = max(worst, abs(a[i] - b[i]));
  return worst;
}

inline BigReal sup_error(const FourierSeries &a, const FourierSeries &b,
                         unsigned resolution, const PrecisionContext &ctx) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("sup_error: dimension mismatch");
  const auto sa = a.sample_grid(resolution, ctx);
  const auto sb = b.sample_grid(resolution, ctx);
  return sup_error(sa, sb, ctx);
}

/// Sampling resolution for a band-limited error: the error of a multiplier
/// approximation has the support of f, so 8 samples per shortest period
/// (rounded up to a power of two, at least 16) resolve its maximum to 1-cos(pi/8).
inline unsigned default_resolution(const PeriodicFunction &f) {
  const std::int64_t target = std::max<std::int64_t>(16, 8 * f.max_frequency());
  unsigned r = 16;
  while (static_cast<std::int64_t>(r) < target)
    r *= 2;
  return r;
}

struct OrderRow {
  int n;
  BigReal error;
  std::optional<double> log2_ratio; // log2(error(n-1) / error(n))
};

inline std::optional<double> log2_ratio(const BigReal &previous,
                                        const BigReal &current) {
  if (previous.is_zero() || current.is_zero())
    return std::nullopt;
  return previous.log2_abs() - current.log2_abs();
}

/// Full-grid errors sup|f - C_{2^-n} f| for n in [n_lo, n_hi].
inline std::vector<OrderRow> order_study(const PeriodicFunction &f, int n_lo,
                                         int n_hi, const PrecisionContext &ctx,
                                         unsigned resolution = 0) {
  if (!f.real_valued())
    throw std::invalid_argument("order_study: f must be real-valued");
  if (n_lo > n_hi || n_lo < 0)
    throw std::invalid_argument("order_study: bad level range");
  if (resolution == 0)
    resolution = default_resolution(f);
  const auto exact = f.series(ctx).sample_grid(resolution, ctx);
  std::vector<OrderRow> rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto h = ScaleVector::isotropic(
        inverse_power_of_two(static_cast<unsigned long>(n)), f.dimension());
    const auto approx = convolve(f, h, ctx).series().sample_grid(resolution, ctx);
    BigReal err = sup_error(exact, approx, ctx);
    std::optional<double> ratio;
    if (!rows.empty())
      ratio = log2_ratio(rows.back().error, err);
    rows.push_back({n, std::move(err), ratio});
  }
  return rows;
}

} // namespace sparsegauss
