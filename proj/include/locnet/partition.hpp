#pragma once

#include <cstddef>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace locnet {

using Point = std::vector<double>;

// 1-based multi-index into a cubic partition; entry l addresses the cell slab
// along coordinate l. Kept 1-based to match the usual written form; linear
// storage below is 0-based.
using MultiIndex = std::vector<int>;

// n^d closed congruent cubes tiling [0,1]^d. Cell j covers
// prod_l [(j_l-1)/n, j_l/n]; adjacent cells share faces, so a point on a face
// belongs to every closed cell touching it (up to 2^d of them).
struct CubicPartition {
  int n = 0;
  int d = 0;

  std::size_t cell_count() const {
    std::size_t c = 1;
    for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(n);
    return c;
  }

  void check_index(const MultiIndex& j) const {
    if (static_cast<int>(j.size()) != d)
      throw std::invalid_argument("cell index has wrong length");
    for (int v : j)
      if (v < 1 || v > n)
        throw std::invalid_argument("cell index entry out of [1, n]");
  }

  // Center xi_j, coordinate l equal to (2 j_l - 1) / (2n).
  Point center(const MultiIndex& j) const {
    check_index(j);
    Point c(d);
    for (int l = 0; l < d; ++l)
      c[l] = static_cast<double>(2 * j[l] - 1) / static_cast<double>(2 * n);
    return c;
  }

  double lower(int jl) const { return static_cast<double>(jl - 1) / n; }
  double upper(int jl) const { return static_cast<double>(jl) / n; }

  // Closed-cell membership, consistent with lower()/upper() as evaluated.
  bool cell_contains(const MultiIndex& j, const Point& x) const {
    check_index(j);
    check_point(x);
    for (int l = 0; l < d; ++l)
      if (x[l] < lower(j[l]) || x[l] > upper(j[l])) return false;
    return true;
  }

  void check_point(const Point& x) const {
    if (static_cast<int>(x.size()) != d)
      throw std::invalid_argument("point has wrong dimension");
    for (double v : x)
      if (!(v >= 0.0 && v <= 1.0))
        throw std::domain_error("point outside the unit cube");
  }

  // Row-major linearization, leading coordinate slowest; 0-based.
  std::size_t to_linear(const MultiIndex& j) const {
    check_index(j);
    std::size_t idx = 0;
    for (int l = 0; l < d; ++l)
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(j[l] - 1);
    return idx;
  }

  MultiIndex from_linear(std::size_t idx) const {
    MultiIndex j(d);
    for (int l = d - 1; l >= 0; --l) {
      j[l] = static_cast<int>(idx % static_cast<std::size_t>(n)) + 1;
      idx /= static_cast<std::size_t>(n);
    }
    return j;
  }
};

inline CubicPartition make_partition(int n, int d) {
  if (n < 1) throw std::invalid_argument("make_partition: n must be >= 1");
  if (d < 1 || d > 16) throw std::invalid_argument("make_partition: d out of range");
  double cells = std::pow(static_cast<double>(n), d);
  if (cells > 1e8) throw std::invalid_argument("make_partition: n^d too large");
  return CubicPartition{n, d};
}

// Index of a closed cell containing x; ties on shared faces resolve to the
// lexicographically smallest index. Each coordinate is located independently
// and then nudged so that the result is consistent with lower()/upper() as
// floating-point predicates (x*n can round across a face).
inline MultiIndex locate(const CubicPartition& p, const Point& x) {
  p.check_point(x);
  MultiIndex j(p.d);
  for (int l = 0; l < p.d; ++l) {
    double scaled = x[l] * p.n;
    int jl = static_cast<int>(std::floor(scaled)) + 1;
    if (jl < 1) jl = 1;
    if (jl > p.n) jl = p.n;
    if (x[l] > p.upper(jl) && jl < p.n) {
      ++jl;
    } else if (jl > 1 && x[l] <= p.lower(jl)) {
      --jl;  // face point or rounding overshoot; prefer the smaller index
    }
    j[l] = jl;
  }
  return j;
}

// All indices of closed cells containing x (between 1 and 2^d of them),
// ascending lexicographically.
inline std::vector<MultiIndex> containing_cells(const CubicPartition& p,
                                                const Point& x) {
  p.check_point(x);
  MultiIndex base = locate(p, x);
  std::vector<std::vector<int>> perco(p.d);
  for (int l = 0; l < p.d; ++l) {
    perco[l].push_back(base[l]);
    int next = base[l] + 1;
    if (next <= p.n && x[l] >= p.lower(next) && x[l] <= p.upper(next))
      perco[l].push_back(next);
  }
  std::vector<MultiIndex> out;
  std::vector<std::size_t> pick(p.d, 0);
  while (true) {
    MultiIndex j(p.d);
    for (int l = 0; l < p.d; ++l) j[l] = perco[l][pick[l]];
    out.push_back(j);
    int l = p.d - 1;
    while (l >= 0 && ++pick[l] == perco[l].size()) pick[l--] = 0;
    if (l < 0) break;
  }
  return out;
}

// Indices of fine cells (partition with fine_n per axis) whose closed cube
// intersects closed coarse cell k of a partition with N per axis. Touching
// faces count as intersecting. The block is a product of per-coordinate index
// ranges, computed in exact integer arithmetic.
inline std::vector<MultiIndex> overlap_indices(int fine_n, int N,
                                               const MultiIndex& k) {
  if (fine_n < 1 || N < 1)
    throw std::invalid_argument("overlap_indices: grid sizes must be >= 1");
  const int d = static_cast<int>(k.size());
  if (d < 1) throw std::invalid_argument("overlap_indices: empty coarse index");
  for (int v : k)
    if (v < 1 || v > N)
      throw std::invalid_argument("overlap_indices: coarse index out of range");

  std::vector<int> lo(d), hi(d);
  for (int l = 0; l < d; ++l) {
    // smallest j with j*N >= fine_n*(k_l - 1), largest j with (j-1)*N <= fine_n*k_l
    long long a = static_cast<long long>(fine_n) * (k[l] - 1);
    long long b = static_cast<long long>(fine_n) * k[l];
    long long jmin = (a + N - 1) / N;
    if (jmin < 1) jmin = 1;
    long long jmax = b / N + 1;
    if (jmax > fine_n) jmax = fine_n;
    lo[l] = static_cast<int>(jmin);
    hi[l] = static_cast<int>(jmax);
  }

  std::vector<MultiIndex> out;
  MultiIndex j(d);
  for (int l = 0; l < d; ++l) j[l] = lo[l];
  while (true) {
    out.push_back(j);
    int l = d - 1;
    while (l >= 0) {
      if (++j[l] <= hi[l]) break;
      j[l] = lo[l];
      --l;
    }
    if (l < 0) break;
  }
  return out;
}

// A union of s distinct closed cells of a coarse partition (N per axis).
struct SupportSet {
  CubicPartition coarse;
  std::vector<MultiIndex> cells;  // sorted, distinct

  int s() const { return static_cast<int>(cells.size()); }

  bool contains(const Point& x) const {
    for (const MultiIndex& k : cells)
      if (coarse.cell_contains(k, x)) return true;
    return false;
  }
};

inline SupportSet make_support(int N, int d,
                               const std::vector<MultiIndex>& indices) {
  CubicPartition coarse = make_partition(N, d);
  if (indices.empty()) throw std::invalid_argument("make_support: no cells given");
  std::set<MultiIndex> seen;
  for (const MultiIndex& k : indices) {
    coarse.check_index(k);
    if (!seen.insert(k).second)
      throw std::invalid_argument("make_support: duplicate cell index");
  }
  SupportSet s;
  s.coarse = coarse;
  s.cells.assign(seen.begin(), seen.end());
  return s;
}

}  // namespace locnet
