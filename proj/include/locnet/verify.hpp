#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "locnet/netcore.hpp"
#include "locnet/partition.hpp"
#include "locnet/targets.hpp"

namespace locnet {

namespace detail {

// Visit every point of the uniform lattice {i/(pts-1)}^d.
template <typename Visit>
void for_each_grid_point(int d, int pts, Visit&& visit) {
  std::vector<int> idx(d, 0);
  Point x(d);
  while (true) {
    for (int l = 0; l < d; ++l)
      x[l] = static_cast<double>(idx[l]) / (pts - 1);
    visit(x);
    int l = d - 1;
    while (l >= 0 && ++idx[l] == pts) idx[l--] = 0;
    if (l < 0) break;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Localization check
// ---------------------------------------------------------------------------

struct GridReport {
  int grid_points_per_axis = 0;
  double min_inside_value = 0.0;    // min of the unit over the closed cell
  double max_inside_deficit = 0.0;  // 1 - min_inside_value, for display
  double max_outside_value = 0.0;   // max of the unit off the closed cell
  double epsilon = 0.0;
  double gain = 0.0;  // K actually used
  bool pass = false;
};

// Evaluate the localizer for cell j on a uniform grid and compare against the
// two tail bounds: value >= 1 - eps on the closed cell, value < eps strictly
// outside it. With no override the gain is threshold_for(sigma, eps), which
// satisfies exactly these comparisons by construction; an override permits
// deliberately failing configurations. The inside comparison is against
// 1 - eps directly, not against a recomputed deficit: 1.0 - value can round
// above eps even when value >= 1 - eps holds.
inline GridReport check_localization(const CubicPartition& p, const MultiIndex& j,
                                     double eps, SigmoidSpec sigma, int grid_pts,
                                     std::optional<double> gain_override = {}) {
  if (grid_pts < 3)
    throw std::invalid_argument("check_localization: grid_pts must be >= 3");
  p.check_index(j);
  const double K = gain_override ? *gain_override : threshold_for(sigma, eps);
  LocalizerNet net(p, j, K, sigma);

  GridReport report;
  report.grid_points_per_axis = grid_pts;
  report.epsilon = eps;
  report.gain = K;
  report.min_inside_value = 1.0;
  detail::for_each_grid_point(p.d, grid_pts, [&](const Point& x) {
    const double v = eval_localizer(net, x);
    if (p.cell_contains(j, x))
      report.min_inside_value = std::min(report.min_inside_value, v);
    else
      report.max_outside_value = std::max(report.max_outside_value, v);
  });
  report.max_inside_deficit = 1.0 - report.min_inside_value;
  report.pass =
      report.min_inside_value >= 1.0 - eps && report.max_outside_value < eps;
  return report;
}

// ---------------------------------------------------------------------------
// Sparse approximation check
// ---------------------------------------------------------------------------

struct SparseBoundReport {
  double sup_error = 0.0;        // max |f - net| over the grid
  double bound_error = 0.0;      // 2^{r/2} c0 n^-r + |f|_inf n^d eps
  double sup_off_support = 0.0;  // max |net| over grid points off the support blocks
  double bound_off_support = 0.0;  // |f|_inf n^d eps
  double f_sup_used = 0.0;
  int off_support_points = 0;
  int grid_pts = 0;
  double epsilon = 0.0;
  bool dimension_flag = false;  // set when d > 2 (leading constant unconfirmed there)
  bool pass = false;
};

// Compare a built approximant of a target against the closed-form error
// bounds, on a uniform grid.
//
// Two measurement caveats are deliberate:
//  - the grid spacing must not place points on interior cell faces of the
//    fine partition (choose grid_pts - 1 coprime to n). On a face several
//    closed cells fire their units at once and the pointwise bound does not
//    apply; off the faces the nets are constant on each open cell.
//  - the sup norm of f enters the bound; we use the lattice estimate, raised
//    to at least the largest coefficient magnitude (those are f values too).
//
// For sparse targets the off-support part additionally requires n >= 4N so
// that the fine cells meeting the support stay inside the stated blocks.
inline SparseBoundReport check_sparse_bound(const SparseTarget& f,
                                            const SparseApproximant& net,
                                            double eps, int grid_pts) {
  if (grid_pts < 3)
    throw std::invalid_argument("check_sparse_bound: grid_pts must be >= 3");
  if (!(eps > 0.0)) throw std::invalid_argument("check_sparse_bound: eps must be > 0");
  const CubicPartition& p = net.partition;
  if (f.d() != p.d)
    throw std::invalid_argument("check_sparse_bound: dimension mismatch");

  const bool sparse_kind = f.kind() == SparseTarget::Kind::sparse;
  if (sparse_kind && p.n < 4 * f.N())
    throw std::invalid_argument(
        "check_sparse_bound: off-support check requires n >= 4N");

  double f_sup = f.sup_norm();
  for (double c : net.coeffs) f_sup = std::max(f_sup, std::abs(c));

  const double cells = std::pow(static_cast<double>(p.n), p.d);
  SparseBoundReport report;
  report.grid_pts = grid_pts;
  report.epsilon = eps;
  report.f_sup_used = f_sup;
  report.dimension_flag = p.d > 2;
  report.bound_error = std::pow(2.0, f.r() / 2.0) * f.c0() *
                           std::pow(static_cast<double>(p.n), -f.r()) +
                       f_sup * cells * eps;
  report.bound_off_support = f_sup * cells * eps;

  // Fine cells whose closed cube meets a support cell. Off those blocks the
  // net must be eps-small regardless of f.
  std::set<std::size_t> support_block;
  if (sparse_kind) {
    for (const MultiIndex& k : f.support().cells)
      for (const MultiIndex& jf : overlap_indices(p.n, f.N(), k))
        support_block.insert(p.to_linear(jf));
  }

  detail::for_each_grid_point(p.d, grid_pts, [&](const Point& x) {
    const double v = eval_sparse_approximant(net, x);
    report.sup_error = std::max(report.sup_error, std::abs(f.eval(x) - v));
    if (sparse_kind && !support_block.empty()) {
      bool off = true;
      for (const MultiIndex& jc : containing_cells(p, x))
        if (support_block.count(p.to_linear(jc))) {
          off = false;
          break;
        }
      if (off) {
        ++report.off_support_points;
        report.sup_off_support = std::max(report.sup_off_support, std::abs(v));
      }
    }
  });

  report.pass = report.sup_error <= report.bound_error &&
                report.sup_off_support <= report.bound_off_support;
  return report;
}

}  // namespace locnet
