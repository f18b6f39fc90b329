#pragma once

// Compositions, anisotropic tensor grids X_l, and the two sparse grid
// constructions: the union over |l|_1 = n+d-1 and the signed
// (inclusion/exclusion) combination over the layers |l|_1 = n+(d-1)-q.

#include "sparsegauss/numerics.hpp"

#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sparsegauss {

/// Level vector l with l_i >= 1.
class MultiIndex {
public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> levels) : MultiIndex(std::vector<int>(levels)) {}
  explicit MultiIndex(std::vector<int> levels) : levels_(std::move(levels)) {
    for (int l : levels_)
      if (l < 1)
        throw std::invalid_argument("MultiIndex: levels must be >= 1");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return levels_.size(); }
  [[nodiscard]] int operator[](std::size_t i) const { return levels_[i]; }
  [[nodiscard]] std::span<const int> levels() const noexcept { return levels_; }
  [[nodiscard]] long sum() const noexcept {
    return std::accumulate(levels_.begin(), levels_.end(), 0L);
  }

  friend auto operator<=>(const MultiIndex &, const MultiIndex &) = default;

private:
  std::vector<int> levels_;
};

/// Calls visit(levels) for every l with l_i >= 1 and |l|_1 = m, in
/// lexicographic order. The span is only valid during the call.
template <typename Visitor>
void for_each_composition(long m, std::size_t d, Visitor &&visit) {
  if (d == 0 || m < static_cast<long>(d))
    return;
  std::vector<int> l(d, 1);
  l[d - 1] = static_cast<int>(m - static_cast<long>(d - 1));
  while (true) {
    visit(std::span<const int>(l));
    // Rightmost slot i < d-1 whose tail can spare one unit.
    std::size_t i = d - 1;
    while (i-- > 0) {
      long tail = 0;
      for (std::size_t j = i + 1; j < d; ++j)
        tail += l[j];
      if (tail > static_cast<long>(d - 1 - i)) {
        ++l[i];
        for (std::size_t j = i + 1; j + 1 < d; ++j)
          l[j] = 1;
        long head = 0;
        for (std::size_t j = 0; j + 1 < d; ++j)
          head += l[j];
        l[d - 1] = static_cast<int>(m - head);
        break;
      }
    }
    if (i == static_cast<std::size_t>(-1))
      return;
  }
}

/// All compositions of m into d positive parts, lexicographic; C(m-1, d-1) of
/// them.
inline std::vector<MultiIndex> compositions(long m, std::size_t d) {
  std::vector<MultiIndex> out;
  for_each_composition(m, d, [&](std::span<const int> l) {
    out.emplace_back(std::vector<int>(l.begin(), l.end()));
  });
  return out;
}

/// Dyadic rational numerator / 2^exponent in lowest terms (odd numerator or
/// exponent 0).
struct DyadicCoordinate {
  std::int64_t numerator = 0;
  int exponent = 0;

  static DyadicCoordinate make(std::int64_t j, int level) {
    DyadicCoordinate c{j, level};
    while (c.exponent > 0 && (c.numerator % 2) == 0) {
      c.numerator /= 2;
      --c.exponent;
    }
    if (c.numerator == 0)
      c.exponent = 0;
    return c;
  }

  [[nodiscard]] BigRational value() const {
    return BigRational(static_cast<long>(numerator)) *
           inverse_power_of_two(static_cast<unsigned long>(exponent));
  }
  [[nodiscard]] std::string str() const {
    return std::to_string(numerator) + "/" +
           std::to_string(std::int64_t{1} << exponent);
  }

  friend bool operator==(const DyadicCoordinate &,
                         const DyadicCoordinate &) = default;
  /// Ordered by value.
  friend std::strong_ordering operator<=>(const DyadicCoordinate &a,
                                          const DyadicCoordinate &b) {
    const int e = std::max(a.exponent, b.exponent);
    const auto va = a.numerator << (e - a.exponent);
    const auto vb = b.numerator << (e - b.exponent);
    return va <=> vb;
  }
};

/// Node of [0,1]^d with exact dyadic coordinates.
class GridNode {
public:
  GridNode() = default;
  explicit GridNode(std::vector<DyadicCoordinate> c) : coords_(std::move(c)) {
    for (const auto &x : coords_)
      if (x.numerator < 0 || x.numerator > (std::int64_t{1} << x.exponent))
        throw std::invalid_argument("GridNode: coordinate outside [0,1]");
  }
  /// Node from numerators j_i over 2^levels_i.
  static GridNode from_indices(std::span<const std::int64_t> j,
                               std::span<const int> levels) {
    std::vector<DyadicCoordinate> c;
    c.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
      c.push_back(DyadicCoordinate::make(j[i], levels[i]));
    return GridNode(std::move(c));
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return coords_.size(); }
  [[nodiscard]] const DyadicCoordinate &operator[](std::size_t i) const {
    return coords_[i];
  }
  [[nodiscard]] std::span<const DyadicCoordinate> coordinates() const noexcept {
    return coords_;
  }
  /// Membership in X_l: every reduced denominator exponent is at most l_i.
  [[nodiscard]] bool in_grid(const MultiIndex &l) const {
    if (l.dimension() != coords_.size())
      return false;
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i].exponent > l[i])
        return false;
    return true;
  }
  [[nodiscard]] GridNode permuted(std::span<const std::size_t> perm) const {
    std::vector<DyadicCoordinate> c(coords_.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
      c[i] = coords_[perm[i]];
    return GridNode(std::move(c));
  }

  friend bool operator==(const GridNode &, const GridNode &) = default;
  friend auto operator<=>(const GridNode &a, const GridNode &b) {
    return std::lexicographical_compare_three_way(
        a.coords_.begin(), a.coords_.end(), b.coords_.begin(), b.coords_.end());
  }

private:
  std::vector<DyadicCoordinate> coords_;
};

using NodeSet = std::set<GridNode>;

inline void insert_grid_nodes(const MultiIndex &l, NodeSet &out) {
  const std::size_t d = l.dimension();
  if (d == 0)
    return;
  for (std::size_t i = 0; i < d; ++i)
    if (l[i] > 30)
      throw std::invalid_argument("grid_nodes: level above 30");
  std::vector<std::int64_t> j(d, 0);
  while (true) {
    out.insert(GridNode::from_indices(j, l.levels()));
    std::size_t i = d;
    while (i-- > 0) {
      if (++j[i] <= (std::int64_t{1} << l[i]))
        break;
      j[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1))
      return;
  }
}

/// Tensor grid X_l = {j_i / 2^l_i}; prod (2^l_i + 1) nodes.
inline NodeSet grid_nodes(const MultiIndex &l) {
  NodeSet out;
  insert_grid_nodes(l, out);
  return out;
}

/// Exact node count prod(2^l_i + 1).
inline BigInt grid_size(const MultiIndex &l) {
  BigInt out = 1;
  for (int level : l.levels()) {
    BigInt side = 1;
    mpz_mul_2exp(side.get_mpz_t(), side.get_mpz_t(),
                 static_cast<unsigned long>(level));
    out *= side + 1;
  }
  return out;
}

inline void require_sparse_args(long n, std::size_t d) {
  if (n < 1)
    throw std::invalid_argument("sparse grid level must be >= 1");
  if (d < 2)
    throw std::invalid_argument("sparse grids need dimension >= 2");
}

/// S_{n,d}: union of X_l over |l|_1 = n+d-1, deduplicated exactly.
inline NodeSet sparse_union_nodes(long n, std::size_t d) {
  require_sparse_args(n, d);
  NodeSet out;
  for_each_composition(n + static_cast<long>(d) - 1, d,
                       [&](std::span<const int> l) {
                         insert_grid_nodes(MultiIndex(std::vector<int>(l.begin(), l.end())), out);
                       });
  return out;
}

struct SignedGridTerm {
  MultiIndex index;
  long coefficient; // (-1)^q C(d-1, q)
  int q;
};

/// Layers q = 0..d-1 of the signed decomposition, each |l|_1 = n+(d-1)-q with
/// coefficient (-1)^q C(d-1,q). Layers with n+(d-1)-q < d are empty.
inline std::vector<SignedGridTerm> combination_terms(long n, std::size_t d) {
  require_sparse_args(n, d);
  std::vector<SignedGridTerm> out;
  for (std::size_t q = 0; q < d; ++q) {
    const long coeff = (q % 2 == 0 ? 1 : -1) * binomial(d - 1, q).get_si();
    for (auto &l : compositions(n + static_cast<long>(d - 1 - q), d))
      out.push_back({std::move(l), coeff, static_cast<int>(q)});
  }
  return out;
}

/// sum over terms of coefficient * [x in X_l].
inline long signed_multiplicity(const GridNode &x,
                                std::span<const SignedGridTerm> terms) {
  long m = 0;
  for (const auto &t : terms)
    if (x.in_grid(t.index))
      m += t.coefficient;
  return m;
}

/// Checks, on every node of the full grid X_{(n,..,n)}, that the signed
/// multiplicity is the indicator of S_{n,d}. Returns the number of nodes that
/// violate it (zero on success).
inline std::size_t combination_equivalence_violations(long n, std::size_t d) {
  const NodeSet sparse = sparse_union_nodes(n, d);
  const auto terms = combination_terms(n, d);
  const NodeSet full = grid_nodes(MultiIndex(std::vector<int>(d, static_cast<int>(n))));
  std::size_t bad = 0;
  for (const auto &x : full) {
    const long expected = sparse.count(x) ? 1 : 0;
    if (signed_multiplicity(x, terms) != expected)
      ++bad;
  }
  return bad;
}

} // namespace sparsegauss
