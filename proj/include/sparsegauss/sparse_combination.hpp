#pragma once

// Combination-technique convolution on sparse grids: the Fourier multiplier
// C_{n,d}(k), the error coefficient E_{n,d}(k) = 1 - C_{n,d}(k), its
// asymptotic law, sparse approximants and the reference tables.

#include "sparsegauss/fullgrid.hpp"
#include "sparsegauss/grids.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparsegauss {

namespace detail {

inline void require_coeff_args(long n, std::size_t d, const WaveVector &k) {
  require_sparse_args(n, d);
  if (k.dimension() != d)
    throw std::invalid_argument("wave vector dimension differs from d");
}

/// factors[i][l] = exp(-2 pi^2 k_i^2 / 4^l) for l = 1..max_level; index 0
/// unused. Axes sharing |k_i| share one computed row.
inline std::vector<std::vector<BigReal>>
axis_factor_table(const WaveVector &k, int max_level,
                  const PrecisionContext &ctx) {
  std::map<std::int64_t, std::size_t> seen;
  std::vector<std::vector<BigReal>> rows;
  rows.reserve(k.dimension());
  for (std::size_t i = 0; i < k.dimension(); ++i) {
    const std::int64_t a = k[i] < 0 ? -k[i] : k[i];
    if (auto it = seen.find(a); it != seen.end()) {
      rows.push_back(rows[it->second]);
      continue;
    }
    std::vector<BigReal> row;
    row.reserve(static_cast<std::size_t>(max_level) + 1);
    row.emplace_back(1L, ctx);
    for (int l = 1; l <= max_level; ++l) {
      if (a == 0)
        row.emplace_back(1L, ctx);
      else
        row.push_back(gaussian_hat(
            BigRational(static_cast<long>(a)) *
                inverse_power_of_two(static_cast<unsigned long>(l)),
            ctx));
    }
    seen.emplace(a, rows.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

/// sum over |l|_1 = m, l_i >= 1, of prod_i factors[i][l_i], visiting
/// compositions in lexicographic order with running prefix products.
inline void layer_sum(const std::vector<std::vector<BigReal>> &factors,
                      std::size_t axis, long remaining, const BigReal &prefix,
                      BigReal &acc) {
  const std::size_t d = factors.size();
  if (axis + 1 == d) {
    acc += prefix * factors[axis][static_cast<std::size_t>(remaining)];
    return;
  }
  const long slots_after = static_cast<long>(d - axis - 1);
  for (long l = 1; l <= remaining - slots_after; ++l)
    layer_sum(factors, axis + 1, remaining - l,
              prefix * factors[axis][static_cast<std::size_t>(l)], acc);
}

} // namespace detail

/// C_{n,d}(k) = (-1)^(d-1) sum_{q=0}^{d-1} (-1)^q C(d-1,q)
///              sum_{|l|_1=n+q} prod_i exp(-2 pi^2 k_i^2 / 4^(l_i)).
/// Layers are summed in ascending q, compositions lexicographically.
inline BigReal comb_coeff(long n, std::size_t d, const WaveVector &k,
                          const PrecisionContext &ctx) {
  detail::require_coeff_args(n, d, k);
  // The largest level in any layer is n+q-(d-1) <= n.
  const auto factors = detail::axis_factor_table(k, static_cast<int>(n), ctx);
  BigReal total(ctx);
  const BigReal one(1L, ctx);
  for (std::size_t q = 0; q < d; ++q) {
    const long m = n + static_cast<long>(q);
    if (m < static_cast<long>(d))
      continue;
    BigReal layer(ctx);
    detail::layer_sum(factors, 0, m, one, layer);
    layer *= binomial(d - 1, q);
    if (q % 2 == 0)
      total += layer;
    else
      total -= layer;
  }
  if ((d - 1) % 2 == 1)
    total = -total;
  return total;
}

/// The same sum with one exp(-2 pi^2 sum_i k_i^2/4^(l_i)) per composition and
/// no shared factors. Slow; a cross-check for comb_coeff.
inline BigReal comb_coeff_uncached(long n, std::size_t d, const WaveVector &k,
                                   const PrecisionContext &ctx) {
  detail::require_coeff_args(n, d, k);
  const BigReal two_pi2 = pi(ctx) * pi(ctx) * 2L;
  BigReal total(ctx);
  for (std::size_t q = 0; q < d; ++q) {
    BigReal layer(ctx);
    for_each_composition(n + static_cast<long>(q), d, [&](std::span<const int> l) {
      BigRational s = 0;
      for (std::size_t i = 0; i < d; ++i)
        s += BigRational(static_cast<long>(k[i] * k[i])) *
             pow(BigRational(1, 4), static_cast<unsigned long>(l[i]));
      layer += exp_real(-(two_pi2 * s), ctx);
    });
    layer *= binomial(d - 1, q);
    if (q % 2 == 0)
      total += layer;
    else
      total -= layer;
  }
  if ((d - 1) % 2 == 1)
    total = -total;
  return total;
}

/// (2 pi^(2d) prod k_i^2 / (d-1)!) (3/2)^(d-1) n^(d-1) / 4^n.
inline BigReal asymptotic_coeff(long n, std::size_t d, const WaveVector &k,
                                const PrecisionContext &ctx) {
  detail::require_coeff_args(n, d, k);
  BigRational r = 2;
  for (std::size_t i = 0; i < d; ++i)
    r *= BigRational(static_cast<long>(k[i] * k[i]));
  if (r == 0)
    return BigReal(ctx);
  BigInt fact = 1;
  for (unsigned long i = 2; i < d; ++i)
    fact *= i;
  r /= BigRational(fact);
  r *= pow(BigRational(3, 2), d - 1);
  r *= pow(BigRational(n), d - 1);
  r *= inverse_power_of_two(2UL * static_cast<unsigned long>(n));
  const BigReal p2 = pi(ctx) * pi(ctx);
  BigReal pd(1L, ctx);
  for (std::size_t i = 0; i < d; ++i)
    pd *= p2;
  return pd * r;
}

struct ErrorCoefficientResult {
  long n;
  std::size_t d;
  WaveVector k;
  BigReal value;
  unsigned long bits;
  BigReal asymptotic;
  std::optional<BigReal> ratio; // value / asymptotic; absent when asymptotic = 0
  bool reliable = true;         // false when computed below default_bits(n, d)
};

/// E_{n,d}(k) = 1 - C_{n,d}(k) at ctx. Contexts below default_bits(n, d) are
/// refused unless force is set, in which case the result is flagged
/// unreliable.
inline ErrorCoefficientResult sparse_error_coeff(long n, std::size_t d,
                                                 const WaveVector &k,
                                                 const PrecisionContext &ctx,
                                                 bool force = false) {
  detail::require_coeff_args(n, d, k);
  const unsigned long needed = default_bits(static_cast<unsigned long>(n), d);
  const bool below = ctx.bits() < needed;
  if (below && !force)
    throw PrecisionPolicyError(
        "precision " + std::to_string(ctx.bits()) + " bits is below the " +
        std::to_string(needed) + "-bit default for n=" + std::to_string(n) +
        ", d=" + std::to_string(d) + " (use force to override)");
  BigReal value = 1L - comb_coeff(n, d, k, ctx);
  BigReal asym = asymptotic_coeff(n, d, k, ctx);
  std::optional<BigReal> ratio;
  if (!asym.is_zero())
    ratio = value / asym;
  return {n, d, k, std::move(value), ctx.bits(), std::move(asym),
          std::move(ratio), !below};
}

/// sparse_error_coeff at the default precision rule.
inline ErrorCoefficientResult sparse_error_coeff(long n, std::size_t d,
                                                 const WaveVector &k) {
  const PrecisionContext ctx(default_bits(static_cast<unsigned long>(n), d));
  return sparse_error_coeff(n, d, k, ctx);
}

// ---------------------------------------------------------------------------
// Sparse approximants

class SparseApproximant {
public:
  SparseApproximant(PeriodicFunction base, long level, FourierSeries series)
      : base_(std::move(base)), level_(level), series_(std::move(series)) {}

  [[nodiscard]] const PeriodicFunction &base() const noexcept { return base_; }
  [[nodiscard]] long level() const noexcept { return level_; }
  [[nodiscard]] const FourierSeries &series() const noexcept { return series_; }

  [[nodiscard]] BigComplex evaluate(const Point &x,
                                    const PrecisionContext &ctx) const {
    return series_.evaluate(x, ctx);
  }

private:
  PeriodicFunction base_;
  long level_;
  FourierSeries series_;
};

/// Multiplies every fhat(k) by C_{n,d}(k). Coefficients are computed at
/// max(ctx, default_bits(n, d)) and shared between wave vectors with the
/// same multiset {k_i^2}.
inline SparseApproximant sparse_convolve(const PeriodicFunction &f, long n,
                                         const PrecisionContext &ctx) {
  const std::size_t d = f.dimension();
  require_sparse_args(n, d);
  const PrecisionContext work(std::max<unsigned long>(
      ctx.bits(), default_bits(static_cast<unsigned long>(n), d)));
  std::map<std::vector<std::int64_t>, BigReal> cache;
  std::vector<SeriesTerm> terms;
  for (const auto &[k, c] : f.coefficients()) {
    std::vector<std::int64_t> key;
    for (auto ki : k.components())
      key.push_back(ki < 0 ? -ki : ki);
    std::sort(key.begin(), key.end());
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, comb_coeff(n, d, WaveVector(key), work).at(ctx))
               .first;
    const BigReal &m = it->second;
    terms.push_back(
        {k, BigComplex(BigReal(c.real(), ctx) * m, BigReal(c.imag(), ctx) * m)});
  }
  return SparseApproximant(f, n,
                           FourierSeries(d, std::move(terms), f.real_valued()));
}

/// Sparse errors sup|f - S_n f| for n in [n_lo, n_hi] over the uniform
/// sampling grid.
inline std::vector<OrderRow> sparse_order_study(const PeriodicFunction &f,
                                                int n_lo, int n_hi,
                                                const PrecisionContext &ctx,
                                                unsigned resolution = 0) {
  if (!f.real_valued())
    throw std::invalid_argument("sparse_order_study: f must be real-valued");
  if (n_lo > n_hi || n_lo < 1)
    throw std::invalid_argument("sparse_order_study: bad level range");
  if (resolution == 0)
    resolution = default_resolution(f);
  const auto exact = f.series(ctx).sample_grid(resolution, ctx);
  std::vector<OrderRow> rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto approx =
        sparse_convolve(f, n, ctx).series().sample_grid(resolution, ctx);
    BigReal err = sup_error(exact, approx, ctx);
    std::optional<double> ratio;
    if (!rows.empty())
      ratio = log2_ratio(rows.back().error, err);
    rows.push_back({n, std::move(err), ratio});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Tables

struct TableCell {
  long n;
  WaveVector k;
  ErrorCoefficientResult result;
  std::string value_text;      // "m.mm (e)"
  std::string asymptotic_text; // "m.mm (e)"
};

struct TableResult {
  std::size_t d;
  std::vector<WaveVector> k_list;
  std::vector<long> n_list;
  std::vector<TableCell> cells; // n-major, then k in k_list order
};

/// E_{n,d}(k) and the asymptotic law for every (n, k), each at
/// default_bits(n, d).
inline TableResult reproduce_table(std::size_t d,
                                   const std::vector<WaveVector> &k_list,
                                   const std::vector<long> &n_list) {
  TableResult out{d, k_list, n_list, {}};
  for (long n : n_list)
    for (const auto &k : k_list) {
      auto r = sparse_error_coeff(n, d, k);
      std::string v = format_paper_sci(r.value);
      std::string a = format_paper_sci(r.asymptotic);
      out.cells.push_back({n, k, std::move(r), std::move(v), std::move(a)});
    }
  return out;
}

/// A reference table as printed: per row n, then (value, formula) for each k.
struct TablePreset {
  std::string name;
  std::size_t d;
  std::vector<WaveVector> k_list;
  std::vector<long> n_list;
  std::vector<std::vector<std::array<std::string, 2>>> printed; // [row][k]
};

inline const TablePreset &table1_preset() {
  static const TablePreset p{
      "table1",
      2,
      {WaveVector{1, 1}, WaveVector{500, 700}},
      {40, 80, 160, 320, 640},
      {{{{"8.69 (-21)", "9.67 (-21)"}}, {{"5.19 (-10)", "1.18 (-9)"}}},
       {{{"1.52 (-44)", "1.60 (-44)"}}, {{"1.41 (-33)", "1.99 (-33)"}}},
       {{{"2.13 (-92)", "2.19 (-92)"}}, {{"2.31 (-81)", "2.68 (-81)"}}},
       {{{"2.02 (-188)", "2.05 (-188)"}}, {{"2.33 (-177)", "2.51 (-177)"}}},
       {{{"8.93 (-381)", "8.98 (-381)"}}, {{"1.06 (-369)", "1.10 (-369)"}}}}};
  return p;
}

inline const TablePreset &table2_preset() {
  static const TablePreset p{
      "table2",
      3,
      {WaveVector{1, 1, 1}, WaveVector{500, 700, 900}},
      {40, 80, 160, 320, 640},
      {{{{"1.72 (-18)", "2.86 (-18)"}}, {{"3.54 (-2)", "2.84 (-1)"}}},
       {{{"6.65 (-42)", "9.47 (-42)"}}, {{"4.62 (-25)", "9.40 (-25)"}}},
       {{{"1.95 (-89)", "2.59 (-89)"}}, {{"1.69 (-72)", "2.57 (-72)"}}},
       {{{"3.80 (-185)", "4.85 (-185)"}}, {{"3.54 (-168)", "4.82 (-168)"}}},
       {{{"3.39 (-377)", "4.26 (-377)"}}, {{"3.27 (-360)", "4.22 (-360)"}}}}};
  return p;
}

/// Preset by name ("table1", "table2"); nullptr when unknown.
inline const TablePreset *find_preset(std::string_view name) {
  if (name == "table1")
    return &table1_preset();
  if (name == "table2")
    return &table2_preset();
  return nullptr;
}

inline TableResult reproduce_table(const TablePreset &preset) {
  return reproduce_table(preset.d, preset.k_list, preset.n_list);
}

} // namespace sparsegauss
