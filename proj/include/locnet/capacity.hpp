#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "locnet/netcore.hpp"
#include "locnet/rng.hpp"
#include "locnet/verify.hpp"

namespace locnet {

// ---------------------------------------------------------------------------
// Family sampling
// ---------------------------------------------------------------------------

// Draw one member of the two-gate-group family with coefficients uniform in
// the bound boxes. Shifts run over [-1 - 1/(2n), 1/(2n)] so the gate
// breakpoints -beta sweep the unit interval plus half a cell on each side.
inline PhiNetParams sample_phi_net(Rng& rng, int n, int d, PhiBounds bounds,
                                   SigmoidSpec sigma) {
  if (n < 1 || d < 1) throw std::invalid_argument("sample_phi_net: n, d must be >= 1");
  if (!(bounds.B >= 0.0 && bounds.C >= 0.0 && bounds.Xi >= 0.0))
    throw std::invalid_argument("sample_phi_net: bounds must be nonnegative");
  PhiNetParams params;
  params.n = n;
  params.d = d;
  params.bounds = bounds;
  params.sigma = sigma;
  const double shift_lo = -1.0 - 1.0 / (2.0 * n);
  const double shift_hi = 1.0 / (2.0 * n);
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= static_cast<std::size_t>(n);
  params.units.reserve(cells);
  for (std::size_t u = 0; u < cells; ++u) {
    PhiUnit unit;
    unit.c = rng.uniform(-bounds.C, bounds.C);
    unit.b = rng.uniform(-bounds.B, bounds.B);
    unit.alpha.resize(d);
    unit.alpha_p.resize(d);
    unit.beta.resize(d);
    unit.gamma.resize(d);
    unit.sign.assign(d, 1);
    unit.sign_p.assign(d, 1);
    for (int l = 0; l < d; ++l) {
      unit.alpha[l] = rng.uniform(-bounds.Xi, bounds.Xi);
      unit.alpha_p[l] = rng.uniform(-bounds.Xi, bounds.Xi);
      unit.beta[l] = rng.uniform(shift_lo, shift_hi);
      unit.gamma[l] = rng.uniform(shift_lo, shift_hi);
    }
    params.units.push_back(std::move(unit));
  }
  return params;
}

// Evaluate a net on the uniform grid, flattened to one vector per net.
inline std::vector<double> grid_vector(const PhiNetParams& params, int grid_pts) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::pow(grid_pts, params.d)));
  detail::for_each_grid_point(params.d, grid_pts,
                              [&](const Point& x) { v.push_back(eval_phi_net(params, x)); });
  return v;
}

// ---------------------------------------------------------------------------
// Greedy cover / packing in the sup metric
// ---------------------------------------------------------------------------

namespace detail {

// Sup distance with early exit once the running max clears the threshold.
inline bool sup_dist_within(const std::vector<double>& a,
                            const std::vector<double>& b, double threshold) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > threshold) return false;
  return true;
}

}  // namespace detail

struct CoveringEstimate {
  double epsilon = 0.0;
  int sample_size = 0;
  int grid_size = 0;
  int net_size_upper = 0;   // greedy cover cardinality at radius epsilon
  int packing_lower = 0;    // greedy separated set at separation 2*epsilon
};

// Greedy cover: scan in order, open a ball at each point not yet covered.
// The chosen centers end up pairwise more than radius apart, so the count is
// simultaneously a cover size and a maximal separated-set size at that radius.
inline int greedy_cover_count(const std::vector<std::vector<double>>& family,
                              double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("greedy_cover_count: radius <= 0");
  std::vector<const std::vector<double>*> centers;
  for (const auto& g : family) {
    bool covered = false;
    for (const auto* c : centers)
      if (detail::sup_dist_within(*c, g, radius)) {
        covered = true;
        break;
      }
    if (!covered) centers.push_back(&g);
  }
  return static_cast<int>(centers.size());
}

// Greedy packing: keep a point when it is strictly more than `separation`
// away from everything kept so far.
inline int greedy_packing_count(const std::vector<std::vector<double>>& family,
                                double separation) {
  if (!(separation > 0.0))
    throw std::invalid_argument("greedy_packing_count: separation <= 0");
  std::vector<const std::vector<double>*> kept;
  for (const auto& g : family) {
    bool close = false;
    for (const auto* c : kept)
      if (detail::sup_dist_within(*c, g, separation)) {
        close = true;
        break;
      }
    if (!close) kept.push_back(&g);
  }
  return static_cast<int>(kept.size());
}

// Cover at radius eps and packing at separation 2*eps over the same family of
// grid vectors. Any 2eps-separated set injects into any eps-cover, so
// packing_lower <= net_size_upper holds on every run.
inline CoveringEstimate empirical_covering(
    const std::vector<std::vector<double>>& family, double eps) {
  if (family.empty())
    throw std::invalid_argument("empirical_covering: empty family");
  const std::size_t len = family.front().size();
  for (const auto& g : family)
    if (g.size() != len)
      throw std::invalid_argument("empirical_covering: ragged family vectors");
  CoveringEstimate est;
  est.epsilon = eps;
  est.sample_size = static_cast<int>(family.size());
  est.grid_size = static_cast<int>(len);
  est.net_size_upper = greedy_cover_count(family, eps);
  est.packing_lower = greedy_packing_count(family, 2.0 * eps);
  return est;
}

// ---------------------------------------------------------------------------
// Closed-form log-capacity bounds
// ---------------------------------------------------------------------------

struct BoundValue {
  double log_bound = 0.0;
  bool degenerate = false;  // a logarithm argument fell at or below 1
};

// log covering-number bound for the two-gate-group family:
//
//   4 d n^d loglog( 3e (2d+1) C Csig n^d Xi / eps )
//   + n^d log( 4 B (24 e^2)^{2d} (2d+1)^{6d} C^{6d+2} Xi^{6d} Csig^{6d+1}
//              n^{6d^2+2d} / eps^{6d+2} )
//
// assembled in log space term by term so the astronomically large second
// argument never materializes.
inline BoundValue theoretical_bound(double eps, int n, int d, PhiBounds bounds,
                                    double c_sigma) {
  if (!(eps > 0.0) || n < 1 || d < 1 || !(bounds.B > 0.0) || !(bounds.C > 0.0) ||
      !(bounds.Xi > 0.0) || !(c_sigma > 0.0))
    throw std::invalid_argument("theoretical_bound: inputs must be positive");

  const double dn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double cells = std::pow(dn, dd);

  const double log1 = std::log(3.0) + 1.0 + std::log(2.0 * dd + 1.0) +
                      std::log(bounds.C) + std::log(c_sigma) + dd * std::log(dn) +
                      std::log(bounds.Xi) - std::log(eps);
  const double log2 = std::log(4.0) + std::log(bounds.B) +
                      2.0 * dd * (std::log(24.0) + 2.0) +
                      6.0 * dd * std::log(2.0 * dd + 1.0) +
                      (6.0 * dd + 2.0) * std::log(bounds.C) +
                      6.0 * dd * std::log(bounds.Xi) +
                      (6.0 * dd + 1.0) * std::log(c_sigma) +
                      (6.0 * dd * dd + 2.0 * dd) * std::log(dn) -
                      (6.0 * dd + 2.0) * std::log(eps);

  BoundValue out;
  if (!(log1 > 1.0) || !(log2 > 0.0)) {
    out.degenerate = true;
    out.log_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_bound = 4.0 * dd * cells * std::log(log1) + cells * log2;
  return out;
}

// Reference scale for the single-hidden-layer comparator with n^d units and
// coefficient bound Gamma: n^d log(Gamma / eps).
inline double shallow_bound_reference(double eps, int n, int d, double Gamma) {
  if (!(eps > 0.0) || n < 1 || d < 1 || !(Gamma > 0.0))
    throw std::invalid_argument("shallow_bound_reference: inputs must be positive");
  return std::pow(static_cast<double>(n), d) * std::log(Gamma / eps);
}

}  // namespace locnet
