#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "locnet/activation.hpp"
#include "locnet/partition.hpp"

namespace locnet {

// ---------------------------------------------------------------------------
// Localizer unit
// ---------------------------------------------------------------------------

// One cell indicator built from 2d heaviside gates behind a single sigmoid:
//
//   value(x) = sigma( 2K * [ sum_l H(1/(2n) + x_l - xi_l)
//                          + sum_l H(1/(2n) - x_l + xi_l) - 2d + 1/2 ] )
//
// with xi the cell center. All 2d gates fire exactly on the closed cell, where
// the bracket equals +1/2; losing any gate drops it to -1/2 or below. The
// argument therefore only takes values 2K(g - 2d + 1/2) for integer gate
// counts g: the unit is piecewise constant, >= sigma(K) on the closed cell and
// <= sigma(-K) everywhere else. Points on a shared face sit in several closed
// cells at once and fire all of those units simultaneously.
struct LocalizerNet {
  CubicPartition partition;
  MultiIndex cell;
  double gain = 0.0;  // K
  SigmoidSpec sigma;
  Point center;  // cached cell center

  LocalizerNet(CubicPartition p, MultiIndex j, double K, SigmoidSpec s)
      : partition(p), cell(std::move(j)), gain(K), sigma(s) {
    if (!(K > 0.0)) throw std::invalid_argument("LocalizerNet: gain must be > 0");
    center = partition.center(cell);
  }
};

inline double eval_localizer(const LocalizerNet& net, const Point& x) {
  net.partition.check_point(x);
  const double half_cell = 1.0 / (2.0 * net.partition.n);
  double gates = 0.0;
  for (int l = 0; l < net.partition.d; ++l) {
    gates += heaviside(half_cell + x[l] - net.center[l]);
    gates += heaviside(half_cell - x[l] + net.center[l]);
  }
  const double bracket = gates - 2.0 * net.partition.d + 0.5;
  return eval_sigmoid(net.sigma, 2.0 * net.gain * bracket);
}

// ---------------------------------------------------------------------------
// Sparse combination of localizer units
// ---------------------------------------------------------------------------

// sum_j coeff_j * localizer_j(x), one optional unit per cell of a fine
// partition. Coefficients are stored densely in linear cell order; each unit
// remembers the anchor point its coefficient was read from (the cell center
// unless the builder was handed custom anchors). Evaluation accumulates in
// long double over a fixed order sorted by |coeff| descending so the n^d-term
// sum is reproducible regardless of how the net was assembled.
struct SparseApproximant {
  CubicPartition partition;
  double gain = 0.0;  // K
  SigmoidSpec sigma;
  std::vector<double> coeffs;   // linear cell order
  std::vector<Point> anchors;   // linear cell order
  std::vector<Point> centers;   // cached cell centers (the gates use these)
  std::vector<std::size_t> eval_order;

  SparseApproximant(CubicPartition p, double K, SigmoidSpec s,
                    std::vector<double> c, std::vector<Point> a)
      : partition(p), gain(K), sigma(s), coeffs(std::move(c)), anchors(std::move(a)) {
    if (!(K > 0.0)) throw std::invalid_argument("SparseApproximant: gain must be > 0");
    if (coeffs.size() != partition.cell_count() || anchors.size() != coeffs.size())
      throw std::invalid_argument("SparseApproximant: size mismatch");
    centers.resize(coeffs.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const MultiIndex j = partition.from_linear(i);
      if (!partition.cell_contains(j, anchors[i]))
        throw std::invalid_argument("SparseApproximant: anchor outside its cell");
      centers[i] = partition.center(j);
    }
    eval_order.resize(coeffs.size());
    std::iota(eval_order.begin(), eval_order.end(), std::size_t{0});
    std::stable_sort(eval_order.begin(), eval_order.end(),
                     [this](std::size_t a_, std::size_t b_) {
                       return std::abs(coeffs[a_]) > std::abs(coeffs[b_]);
                     });
  }

  double coefficient(const MultiIndex& j) const {
    return coeffs[partition.to_linear(j)];
  }
};

inline SparseApproximant make_approximant(
    const CubicPartition& p, double K, SigmoidSpec sigma,
    const std::map<MultiIndex, double>& coeff_map) {
  std::vector<double> coeffs(p.cell_count(), 0.0);
  std::vector<Point> anchors(p.cell_count());
  for (std::size_t i = 0; i < anchors.size(); ++i)
    anchors[i] = p.center(p.from_linear(i));
  for (const auto& [j, v] : coeff_map) coeffs[p.to_linear(j)] = v;
  return SparseApproximant(p, K, sigma, std::move(coeffs), std::move(anchors));
}

inline double eval_sparse_approximant(const SparseApproximant& net, const Point& x) {
  net.partition.check_point(x);
  const double half_cell = 1.0 / (2.0 * net.partition.n);
  const int d = net.partition.d;
  long double acc = 0.0L;
  for (std::size_t idx : net.eval_order) {
    const double c = net.coeffs[idx];
    if (c == 0.0) continue;
    const Point& xi = net.centers[idx];
    double gates = 0.0;
    for (int l = 0; l < d; ++l) {
      gates += heaviside(half_cell + x[l] - xi[l]);
      gates += heaviside(half_cell - x[l] + xi[l]);
    }
    const double bracket = gates - 2.0 * d + 0.5;
    acc += static_cast<long double>(c) *
           eval_sigmoid(net.sigma, 2.0 * net.gain * bracket);
  }
  return static_cast<double>(acc);
}

// Interpolant of f at the cell anchors: coefficient_j = f(anchor_j), anchor
// defaulting to the cell center.
template <typename F>
SparseApproximant build_approximant(F&& f, const CubicPartition& p, double K,
                                    SigmoidSpec sigma) {
  std::vector<double> coeffs(p.cell_count());
  std::vector<Point> anchors(p.cell_count());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    anchors[i] = p.center(p.from_linear(i));
    coeffs[i] = f(anchors[i]);
  }
  return SparseApproximant(p, K, sigma, std::move(coeffs), std::move(anchors));
}

template <typename F>
SparseApproximant build_approximant(F&& f, const CubicPartition& p,
                                    const std::vector<Point>& anchors, double K,
                                    SigmoidSpec sigma) {
  if (anchors.size() != p.cell_count())
    throw std::invalid_argument("build_approximant: one anchor per cell required");
  std::vector<double> coeffs(p.cell_count());
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = f(anchors[i]);
  return SparseApproximant(p, K, sigma, std::move(coeffs), anchors);
}

// ---------------------------------------------------------------------------
// Two-gate-group hypothesis family
// ---------------------------------------------------------------------------

// General member of the family the learner searches:
//
//   g(x) = sum_j c_j sigma( sum_l a_jl H(s_jl x_l + beta_jl)
//                         + sum_l a'_jl H(s'_jl x_l + gamma_jl) + b_j )
//
// with |c| <= C, |b| <= B, |a|, |a'| <= Xi; shifts are unconstrained. The
// per-term orientation flags s, s' in {+1, -1} default to +1; flipping one
// mirrors that gate, which is what lets a localizer unit (whose second gate
// group reads H(1/(2n) - x_l + xi_l)) be written in this form without
// touching the closed-face semantics of the gates.
struct PhiBounds {
  double B = 0.0;   // bias bound
  double C = 0.0;   // outer coefficient bound
  double Xi = 0.0;  // inner weight bound
};

struct PhiUnit {
  double c = 0.0;
  double b = 0.0;
  std::vector<double> alpha, alpha_p;  // inner weights, one per coordinate
  std::vector<double> beta, gamma;     // shifts
  std::vector<std::int8_t> sign, sign_p;
};

struct PhiNetParams {
  int n = 0;
  int d = 0;
  PhiBounds bounds;
  SigmoidSpec sigma;
  std::vector<PhiUnit> units;  // exactly n^d of them
};

struct BoundViolation {
  std::size_t unit = 0;  // 0-based unit position
  std::string field;
  double value = 0.0;
  double bound = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<BoundViolation> violations;
};

inline ValidationReport validate_params(const PhiNetParams& params) {
  ValidationReport report;
  auto flag = [&](std::size_t u, const char* field, double v, double bound) {
    report.ok = false;
    report.violations.push_back({u, field, v, bound});
  };
  std::size_t expected = 1;
  for (int i = 0; i < params.d; ++i) expected *= static_cast<std::size_t>(params.n);
  if (params.units.size() != expected)
    throw std::invalid_argument("validate_params: unit count must equal n^d");
  for (std::size_t u = 0; u < params.units.size(); ++u) {
    const PhiUnit& unit = params.units[u];
    const std::size_t dd = static_cast<std::size_t>(params.d);
    if (unit.alpha.size() != dd || unit.alpha_p.size() != dd ||
        unit.beta.size() != dd || unit.gamma.size() != dd ||
        unit.sign.size() != dd || unit.sign_p.size() != dd)
      throw std::invalid_argument("validate_params: unit arrays must have length d");
    if (std::abs(unit.c) > params.bounds.C) flag(u, "c", unit.c, params.bounds.C);
    if (std::abs(unit.b) > params.bounds.B) flag(u, "b", unit.b, params.bounds.B);
    for (std::size_t l = 0; l < dd; ++l) {
      if (std::abs(unit.alpha[l]) > params.bounds.Xi)
        flag(u, "alpha", unit.alpha[l], params.bounds.Xi);
      if (std::abs(unit.alpha_p[l]) > params.bounds.Xi)
        flag(u, "alpha_p", unit.alpha_p[l], params.bounds.Xi);
      if (unit.sign[l] != 1 && unit.sign[l] != -1)
        flag(u, "sign", unit.sign[l], 1.0);
      if (unit.sign_p[l] != 1 && unit.sign_p[l] != -1)
        flag(u, "sign_p", unit.sign_p[l], 1.0);
    }
  }
  return report;
}

inline double eval_phi_net(const PhiNetParams& params, const Point& x) {
  ValidationReport report = validate_params(params);
  if (!report.ok)
    throw std::invalid_argument("eval_phi_net: parameter bounds violated (" +
                                std::to_string(report.violations.size()) +
                                " violations); run validate_params");
  if (static_cast<int>(x.size()) != params.d)
    throw std::domain_error("eval_phi_net: point has wrong dimension");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("eval_phi_net: point outside the unit cube");

  std::vector<std::size_t> order(params.units.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(params.units[a].c) > std::abs(params.units[b].c);
  });

  long double acc = 0.0L;
  for (std::size_t u : order) {
    const PhiUnit& unit = params.units[u];
    if (unit.c == 0.0) continue;
    double inner = unit.b;
    for (int l = 0; l < params.d; ++l) {
      inner += unit.alpha[l] * heaviside(unit.sign[l] * x[l] + unit.beta[l]);
      inner += unit.alpha_p[l] * heaviside(unit.sign_p[l] * x[l] + unit.gamma[l]);
    }
    acc += static_cast<long double>(unit.c) * eval_sigmoid(params.sigma, inner);
  }
  return static_cast<double>(acc);
}

namespace detail {

inline PhiUnit zero_unit(int d) {
  PhiUnit u;
  u.alpha.assign(d, 0.0);
  u.alpha_p.assign(d, 0.0);
  u.beta.assign(d, 0.0);
  u.gamma.assign(d, 0.0);
  u.sign.assign(d, 1);
  u.sign_p.assign(d, 1);
  return u;
}

// Localizer cell as one unit: alpha = alpha' = 2K, first gate group
// H(x_l + (1/(2n) - xi_l)), second group mirrored to H(-x_l + (1/(2n) + xi_l)),
// bias 2K(-2d + 1/2). Note |bias| = (4d - 1)K, so a bounds triple that is to
// admit this unit needs B >= (4d - 1)K, not just the 2d a free unit would need.
inline PhiUnit localizer_unit(const CubicPartition& p, const Point& xi, double K,
                              double coeff) {
  PhiUnit u = zero_unit(p.d);
  const double half_cell = 1.0 / (2.0 * p.n);
  u.c = coeff;
  u.b = 2.0 * K * (-2.0 * p.d + 0.5);
  for (int l = 0; l < p.d; ++l) {
    u.alpha[l] = 2.0 * K;
    u.alpha_p[l] = 2.0 * K;
    u.beta[l] = half_cell - xi[l];
    u.gamma[l] = half_cell + xi[l];
    u.sign_p[l] = -1;
  }
  return u;
}

}  // namespace detail

inline double localizer_bias_bound(int d, double K) {
  return (4.0 * d - 1.0) * K;
}

inline PhiNetParams encode_localizer(const LocalizerNet& net, PhiBounds bounds) {
  PhiNetParams params;
  params.n = net.partition.n;
  params.d = net.partition.d;
  params.bounds = bounds;
  params.sigma = net.sigma;
  const std::size_t cells = net.partition.cell_count();
  const std::size_t active = net.partition.to_linear(net.cell);
  params.units.reserve(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    if (i == active)
      params.units.push_back(
          detail::localizer_unit(net.partition, net.center, net.gain, 1.0));
    else
      params.units.push_back(detail::zero_unit(net.partition.d));
  }
  return params;
}

inline PhiNetParams encode_approximant(const SparseApproximant& net,
                                       PhiBounds bounds) {
  PhiNetParams params;
  params.n = net.partition.n;
  params.d = net.partition.d;
  params.bounds = bounds;
  params.sigma = net.sigma;
  const std::size_t cells = net.partition.cell_count();
  params.units.reserve(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const Point xi = net.partition.center(net.partition.from_linear(i));
    params.units.push_back(
        detail::localizer_unit(net.partition, xi, net.gain, net.coeffs[i]));
  }
  return params;
}

// ---------------------------------------------------------------------------
// Shallow reference net
// ---------------------------------------------------------------------------

// Single-hidden-layer comparator: sum_j c_j sigma(<w_j, x> + theta_j) with
// |c_j| <= Gamma. Only used as a capacity baseline.
struct ShallowUnit {
  double c = 0.0;
  std::vector<double> w;
  double theta = 0.0;
};

struct ShallowNetParams {
  int d = 0;
  double Gamma = 0.0;
  SigmoidSpec sigma;
  std::vector<ShallowUnit> units;
};

inline double eval_shallow(const ShallowNetParams& params, const Point& x) {
  if (static_cast<int>(x.size()) != params.d)
    throw std::domain_error("eval_shallow: point has wrong dimension");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("eval_shallow: point outside the unit cube");
  long double acc = 0.0L;
  for (const ShallowUnit& unit : params.units) {
    if (std::abs(unit.c) > params.Gamma)
      throw std::invalid_argument("eval_shallow: coefficient bound violated");
    if (unit.w.size() != static_cast<std::size_t>(params.d))
      throw std::invalid_argument("eval_shallow: weight length mismatch");
    double inner = unit.theta;
    for (int l = 0; l < params.d; ++l) inner += unit.w[l] * x[l];
    acc += static_cast<long double>(unit.c) * eval_sigmoid(params.sigma, inner);
  }
  return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

// Clip to [-M, M]; idempotent and 1-Lipschitz.
inline double project_clip(double v, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("project_clip: M must be > 0");
  return std::min(M, std::max(-M, v));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const PhiNetParams& params) {
  nlohmann::json units = nlohmann::json::array();
  for (const PhiUnit& u : params.units) {
    nlohmann::json sign = nlohmann::json::array();
    nlohmann::json sign_p = nlohmann::json::array();
    for (auto s : u.sign) sign.push_back(static_cast<int>(s));
    for (auto s : u.sign_p) sign_p.push_back(static_cast<int>(s));
    units.push_back({{"c", u.c},
                     {"b", u.b},
                     {"alpha", u.alpha},
                     {"alpha_p", u.alpha_p},
                     {"beta", u.beta},
                     {"gamma", u.gamma},
                     {"sign", sign},
                     {"sign_p", sign_p}});
  }
  return {{"kind", "phi"},
          {"n", params.n},
          {"d", params.d},
          {"sigma", sigmoid_name(params.sigma.kind)},
          {"bounds",
           {{"B", params.bounds.B}, {"C", params.bounds.C}, {"Xi", params.bounds.Xi}}},
          {"units", units}};
}

inline PhiNetParams phi_from_json(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() != "phi")
    throw std::invalid_argument("phi_from_json: kind must be 'phi'");
  PhiNetParams params;
  params.n = j.at("n").get<int>();
  params.d = j.at("d").get<int>();
  params.sigma = sigmoid_spec(j.at("sigma").get<std::string>());
  params.bounds.B = j.at("bounds").at("B").get<double>();
  params.bounds.C = j.at("bounds").at("C").get<double>();
  params.bounds.Xi = j.at("bounds").at("Xi").get<double>();
  for (const auto& ju : j.at("units")) {
    PhiUnit u;
    u.c = ju.at("c").get<double>();
    u.b = ju.at("b").get<double>();
    u.alpha = ju.at("alpha").get<std::vector<double>>();
    u.alpha_p = ju.at("alpha_p").get<std::vector<double>>();
    u.beta = ju.at("beta").get<std::vector<double>>();
    u.gamma = ju.at("gamma").get<std::vector<double>>();
    for (int s : ju.at("sign").get<std::vector<int>>())
      u.sign.push_back(static_cast<std::int8_t>(s));
    for (int s : ju.at("sign_p").get<std::vector<int>>())
      u.sign_p.push_back(static_cast<std::int8_t>(s));
    params.units.push_back(std::move(u));
  }
  return params;
}

}  // namespace locnet
