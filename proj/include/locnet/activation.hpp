#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace locnet {

// Heaviside gate: 1 on [0, inf), 0 on (-inf, 0). The closed half-line makes
// points on a shared cell face fire the gates of every touching cell.
inline double heaviside(double t) {
  if (std::isnan(t)) throw std::invalid_argument("heaviside: NaN input");
  return t >= 0.0 ? 1.0 : 0.0;
}

enum class SigmoidKind { logistic, tanh_half, arctan, gompertz };

// A bounded increasing activation with limits 0 at -inf and 1 at +inf,
// together with its sharp Lipschitz constant (the max slope).
struct SigmoidSpec {
  SigmoidKind kind = SigmoidKind::logistic;
  double lipschitz = 0.25;
};

inline SigmoidSpec sigmoid_spec(SigmoidKind kind) {
  switch (kind) {
    case SigmoidKind::logistic:
      return {kind, 0.25};
    case SigmoidKind::tanh_half:
      return {kind, 0.5};
    case SigmoidKind::arctan:
      return {kind, 1.0 / std::numbers::pi};
    case SigmoidKind::gompertz:
      return {kind, std::exp(-1.0)};
  }
  throw std::invalid_argument("sigmoid_spec: unknown kind");
}

inline SigmoidSpec sigmoid_spec(const std::string& name) {
  if (name == "logistic") return sigmoid_spec(SigmoidKind::logistic);
  if (name == "tanh") return sigmoid_spec(SigmoidKind::tanh_half);
  if (name == "arctan") return sigmoid_spec(SigmoidKind::arctan);
  if (name == "gompertz") return sigmoid_spec(SigmoidKind::gompertz);
  throw std::invalid_argument("sigmoid_spec: unknown kind '" + name + "'");
}

inline std::string sigmoid_name(SigmoidKind kind) {
  switch (kind) {
    case SigmoidKind::logistic: return "logistic";
    case SigmoidKind::tanh_half: return "tanh";
    case SigmoidKind::arctan: return "arctan";
    case SigmoidKind::gompertz: return "gompertz";
  }
  return "?";
}

inline double lipschitz_constant(const SigmoidSpec& s) { return s.lipschitz; }

inline double eval_sigmoid(const SigmoidSpec& s, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("eval_sigmoid: non-finite input");
  switch (s.kind) {
    case SigmoidKind::logistic:
      // Evaluate through the stable branch to avoid overflow at large |t|.
      return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                      : std::exp(t) / (1.0 + std::exp(t));
    case SigmoidKind::tanh_half:
      return (std::tanh(t) + 1.0) / 2.0;
    case SigmoidKind::arctan:
      return std::atan(t) / std::numbers::pi + 0.5;
    case SigmoidKind::gompertz:
      return std::exp(-std::exp(-t));
  }
  throw std::invalid_argument("eval_sigmoid: unknown kind");
}

namespace detail {

// Closed-form tail inversion where the shape allows it; the returned value is
// the exact crossing point sigma(K) = 1 - eps (for these three kinds the
// lower tail is then automatically at or below eps).
inline double threshold_closed_form(SigmoidKind kind, double eps) {
  switch (kind) {
    case SigmoidKind::logistic:
      return std::log(1.0 / eps - 1.0);
    case SigmoidKind::tanh_half:
      return 0.5 * std::log(1.0 / eps - 1.0);
    case SigmoidKind::arctan:
      return std::tan(std::numbers::pi * (0.5 - eps));
    default:
      throw std::logic_error("threshold_closed_form: no closed form");
  }
}

}  // namespace detail

// Smallest K with sigma(K) >= 1 - eps and sigma(-K) < eps, as evaluated in
// double precision. Closed-form inversion lands within an ulp of the true
// crossing, where the defining comparisons can go either way under rounding;
// the nudge loop below settles them on the conforming side. The asymmetric
// gompertz tail has no closed form and is bisected to 1e-12 instead.
inline double threshold_for(const SigmoidSpec& s, double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("threshold_for: eps must lie in (0, 0.5)");

  double K;
  if (s.kind == SigmoidKind::gompertz) {
    auto ok = [&](double t) {
      return eval_sigmoid(s, t) >= 1.0 - eps && eval_sigmoid(s, -t) < eps;
    };
    double hi = 1.0;
    while (!ok(hi)) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > 1e-12) {
      double mid = 0.5 * (lo + hi);
      if (ok(mid))
        hi = mid;
      else
        lo = mid;
    }
    K = hi;
  } else {
    K = detail::threshold_closed_form(s.kind, eps);
  }

  auto settles = [&](double t) {
    return eval_sigmoid(s, t) >= 1.0 - eps && eval_sigmoid(s, -t) < eps;
  };
  if (settles(K)) return K;

  // The closed form can round one output ulp short of the target, and near
  // the threshold the curve is so flat (slope ~ eps) that single-ulp nudges
  // of K cannot move the evaluated value at all. March upward with doubling
  // steps until both tails hold -- every curve saturates to exactly 1 and 0,
  // so this terminates -- then bisect back to the tightest settling gain.
  double lo = K;
  double hi = K;
  double step = (K > 0.0 ? K : 1.0) * 0x1p-52;
  for (int i = 0; !settles(hi); ++i) {
    if (i >= 200)
      throw std::runtime_error("threshold_for: tail conditions did not settle");
    hi += step;
    step *= 2.0;
  }
  for (int i = 0; i < 200 && std::nextafter(lo, hi) < hi; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (settles(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Gate gain for learning: the tail threshold at accuracy
// eps = n^-(r+d) * sqrt(s / N^d). Errors out (via threshold_for) when the
// configuration is too coarse for that accuracy to be meaningful (eps >= 1/2).
inline double level_for_learning(const SigmoidSpec& sigma, int n, int N, int s,
                                 double r, int d) {
  if (n < 1 || N < 1 || d < 1)
    throw std::invalid_argument("level_for_learning: n, N, d must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("level_for_learning: r must be > 0");
  double coarse_cells = std::pow(static_cast<double>(N), d);
  if (s < 1 || static_cast<double>(s) > coarse_cells)
    throw std::invalid_argument("level_for_learning: s must lie in [1, N^d]");
  double eps = std::pow(static_cast<double>(n), -(r + d)) *
               std::sqrt(static_cast<double>(s) / coarse_cells);
  return threshold_for(sigma, eps);
}

}  // namespace locnet
