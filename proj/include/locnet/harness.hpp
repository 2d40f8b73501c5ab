#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "locnet/learn.hpp"
#include "locnet/targets.hpp"

namespace locnet {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

// One experiment description, loadable from JSON with exactly these keys.
// s = 0 requests the full-support anchor target; s >= 1 (with N >= 1) the
// sparse cell-supported one.
struct ExperimentConfig {
  std::string task = "sweep";
  int d = 1;
  double r = 1.0;
  double c0 = 1.0;
  int N = 0;
  int s = 0;
  double tau = 0.1;
  std::vector<int> m_grid = {256, 512, 1024, 2048, 4096, 8192};
  int trials = 16;
  std::uint64_t seed = 1234;
  std::string sigma = "logistic";
  std::string out;
  std::string format = "csv";
  bool svg = false;
  bool share_target = false;  // one target per trial, shared across m
  int mc_points = 8192;
  int samples = 2000;  // family draws for capacity runs
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.task != "localize" && cfg.task != "approx" && cfg.task != "capacity" &&
      cfg.task != "learn" && cfg.task != "sweep")
    throw std::invalid_argument("config: unknown task '" + cfg.task + "'");
  if (cfg.d < 1 || cfg.d > 3) throw std::invalid_argument("config: d must be 1..3");
  if (!(cfg.r > 0.0 && cfg.r <= 1.0))
    throw std::invalid_argument("config: r must lie in (0, 1]");
  if (!(cfg.c0 > 0.0)) throw std::invalid_argument("config: c0 must be > 0");
  if (cfg.s < 0 || cfg.N < 0)
    throw std::invalid_argument("config: N and s must be >= 0");
  if (cfg.s > 0 && cfg.N < 1)
    throw std::invalid_argument("config: sparse target needs N >= 1");
  if (cfg.s > 0 && static_cast<double>(cfg.s) > std::pow(cfg.N, cfg.d))
    throw std::invalid_argument("config: s exceeds N^d");
  if (!(cfg.tau >= 0.0)) throw std::invalid_argument("config: tau must be >= 0");
  if (cfg.m_grid.empty()) throw std::invalid_argument("config: m_grid is empty");
  for (std::size_t i = 0; i < cfg.m_grid.size(); ++i) {
    if (cfg.m_grid[i] < 1)
      throw std::invalid_argument("config: m_grid entries must be >= 1");
    if (i > 0 && cfg.m_grid[i] <= cfg.m_grid[i - 1])
      throw std::invalid_argument("config: m_grid must be strictly increasing");
  }
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.format != "csv" && cfg.format != "json")
    throw std::invalid_argument("config: format must be csv or json");
  if (cfg.mc_points < 2) throw std::invalid_argument("config: mc_points must be >= 2");
  if (cfg.samples < 1) throw std::invalid_argument("config: samples must be >= 1");
  sigmoid_spec(cfg.sigma);  // validates the name
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "task") cfg.task = value.get<std::string>();
    else if (key == "d") cfg.d = value.get<int>();
    else if (key == "r") cfg.r = value.get<double>();
    else if (key == "c0") cfg.c0 = value.get<double>();
    else if (key == "N") cfg.N = value.get<int>();
    else if (key == "s") cfg.s = value.get<int>();
    else if (key == "tau") cfg.tau = value.get<double>();
    else if (key == "m_grid") cfg.m_grid = value.get<std::vector<int>>();
    else if (key == "trials") cfg.trials = value.get<int>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "sigma") cfg.sigma = value.get<std::string>();
    else if (key == "out") cfg.out = value.get<std::string>();
    else if (key == "format") cfg.format = value.get<std::string>();
    else if (key == "svg") cfg.svg = value.get<bool>();
    else if (key == "share_target") cfg.share_target = value.get<bool>();
    else if (key == "mc_points") cfg.mc_points = value.get<int>();
    else if (key == "samples") cfg.samples = value.get<int>();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  validate_config(cfg);
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"task", cfg.task},       {"d", cfg.d},
          {"r", cfg.r},             {"c0", cfg.c0},
          {"N", cfg.N},             {"s", cfg.s},
          {"tau", cfg.tau},         {"m_grid", cfg.m_grid},
          {"trials", cfg.trials},   {"seed", cfg.seed},
          {"sigma", cfg.sigma},     {"out", cfg.out},
          {"format", cfg.format},   {"svg", cfg.svg},
          {"share_target", cfg.share_target},
          {"mc_points", cfg.mc_points},
          {"samples", cfg.samples}};
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: malformed JSON in " + path + ": " +
                                e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Rates and schedules
// ---------------------------------------------------------------------------

inline double theoretical_rate(double r, int d) {
  if (!(r > 0.0)) throw std::invalid_argument("theoretical_rate: r must be > 0");
  if (d < 1) throw std::invalid_argument("theoretical_rate: d must be >= 1");
  return -2.0 * r / (2.0 * r + d);
}

inline double sparse_rate_factor(int s, int N, int d, double r) {
  if (N < 1 || d < 1) throw std::invalid_argument("sparse_rate_factor: N, d >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("sparse_rate_factor: r must be > 0");
  const double cells = std::pow(static_cast<double>(N), d);
  if (s < 1 || static_cast<double>(s) > cells)
    throw std::invalid_argument("sparse_rate_factor: s must lie in [1, N^d]");
  return std::pow(static_cast<double>(s) / cells, d / (2.0 * r + d));
}

// Per-axis resolution floor(m^{1/(2r+d)}), computed so that exact integer
// powers land on the integer (a bare pow() can round 4096^(1/3) below 16).
inline int schedule_n(int m, double r, int d) {
  if (m < 1) throw std::invalid_argument("schedule_n: m must be >= 1");
  if (!(r > 0.0) || d < 1)
    throw std::invalid_argument("schedule_n: need r > 0 and d >= 1");
  const double p = 2.0 * r + d;
  int k = static_cast<int>(std::floor(std::pow(static_cast<double>(m), 1.0 / p)));
  if (k < 1) k = 1;
  const double log_m = std::log(static_cast<double>(m));
  while (p * std::log(static_cast<double>(k + 1)) <= log_m + 1e-9) ++k;
  while (k > 1 && p * std::log(static_cast<double>(k)) > log_m + 1e-9) --k;
  return k;
}

// ---------------------------------------------------------------------------
// Rate sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  int m = 0;
  int trial = 0;
  double error = 0.0;
  std::uint64_t seed = 0;  // data stream seed for this cell
};

// One generalization-error measurement per (m, trial): seeded target, seeded
// dataset, dictionary fit at n = schedule_n(m), clipped, then Monte Carlo
// error on an independent stream. Rows come back ordered by (m, trial).
inline std::vector<SweepRow> run_rate_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SigmoidSpec sigma = sigmoid_spec(cfg.sigma);
  std::vector<SweepRow> rows;
  rows.reserve(cfg.m_grid.size() * static_cast<std::size_t>(cfg.trials));
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const int m = cfg.m_grid[mi];
    const int n = schedule_n(m, cfg.r, cfg.d);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t target_seed =
          cfg.share_target ? derive_seed(cfg.seed, {1, 0, static_cast<std::uint64_t>(trial)})
                           : derive_seed(cfg.seed, {1, mi + 1, static_cast<std::uint64_t>(trial)});
      const std::uint64_t data_seed =
          derive_seed(cfg.seed, {2, mi + 1, static_cast<std::uint64_t>(trial)});
      const std::uint64_t mc_seed =
          derive_seed(cfg.seed, {3, mi + 1, static_cast<std::uint64_t>(trial)});

      const SparseTarget target =
          cfg.s >= 1 ? make_sparse_target(target_seed, cfg.N, cfg.s, cfg.r, cfg.c0,
                                          cfg.d)
                     : make_lipschitz_target(target_seed, cfg.r, cfg.c0, cfg.d);
      const Dataset D = sample_dataset(data_seed, m, target, cfg.tau);

      ErmSpec spec;
      spec.n = n;
      spec.sigma = sigma;
      spec.r = cfg.r;
      spec.coarse_N = cfg.s >= 1 ? cfg.N : 1;
      spec.s = cfg.s >= 1 ? cfg.s : 1;
      spec.M = D.M;
      const FitResult fit = erm_fit(D, spec);

      auto clipped = [&](const Point& x) {
        return project_clip(eval_sparse_approximant(fit.estimator, x), D.M);
      };
      const McEstimate err =
          generalization_error(clipped, target, cfg.mc_points, mc_seed);
      rows.push_back({m, trial, err.value, data_seed});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Log-log rate fit
// ---------------------------------------------------------------------------

struct PerM {
  int m = 0;
  double mean_error = 0.0;
  double std_error = 0.0;  // of the mean over trials
};

struct RateFitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theory_exponent = 0.0;
  std::vector<PerM> per_m;
  bool degenerate = false;  // a nonpositive mean error blocks the log fit
};

// Least squares of log(mean error per m) against log m.
inline RateFitResult fit_rate(const std::vector<SweepRow>& rows, double r, int d) {
  if (rows.empty()) throw std::invalid_argument("fit_rate: no rows");
  RateFitResult fit;
  fit.theory_exponent = theoretical_rate(r, d);

  std::vector<int> ms;
  for (const SweepRow& row : rows)
    if (ms.empty() || ms.back() != row.m) ms.push_back(row.m);
  for (int m : ms) {
    long double sum = 0.0L, sum_sq = 0.0L;
    int count = 0;
    for (const SweepRow& row : rows)
      if (row.m == m) {
        sum += row.error;
        sum_sq += static_cast<long double>(row.error) * row.error;
        ++count;
      }
    PerM pm;
    pm.m = m;
    pm.mean_error = static_cast<double>(sum / count);
    if (count > 1) {
      const long double var = (sum_sq - sum * sum / count) / (count - 1);
      pm.std_error = std::sqrt(std::max(0.0, static_cast<double>(var)) / count);
    }
    fit.per_m.push_back(pm);
  }

  for (const PerM& pm : fit.per_m)
    if (!(pm.mean_error > 0.0)) {
      fit.degenerate = true;
      return fit;
    }
  if (fit.per_m.size() < 2) {
    fit.degenerate = true;
    return fit;
  }

  const std::size_t k = fit.per_m.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const PerM& pm : fit.per_m) {
    const double x = std::log(static_cast<double>(pm.m));
    const double y = std::log(pm.mean_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (k * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / k;
  const double ss_tot = syy - sy * sy / k;
  double ss_res = 0.0;
  for (const PerM& pm : fit.per_m) {
    const double x = std::log(static_cast<double>(pm.m));
    const double y = std::log(pm.mean_error);
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "m,trial,error,seed\n";
  for (const SweepRow& row : rows) {
    out += std::to_string(row.m);
    out += ',';
    out += std::to_string(row.trial);
    out += ',';
    out += detail::fmt_double(row.error);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows,
                                 const RateFitResult& fit,
                                 const ExperimentConfig& cfg) {
  nlohmann::json per_m = nlohmann::json::array();
  for (const PerM& pm : fit.per_m)
    per_m.push_back(
        {{"m", pm.m}, {"mean_error", pm.mean_error}, {"std_error", pm.std_error}});
  nlohmann::json jrows = nlohmann::json::array();
  for (const SweepRow& row : rows)
    jrows.push_back({{"m", row.m},
                     {"trial", row.trial},
                     {"error", row.error},
                     {"seed", row.seed}});
  return {{"config", config_to_json(cfg)},
          {"per_m", per_m},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"theory_exponent", fit.theory_exponent},
          {"degenerate", fit.degenerate},
          {"rows", jrows}};
}

// Minimal hand-rolled scatter plot: log-log points per (m, trial), the fitted
// line, and a guide line with the predicted exponent through the first mean.
inline std::string sweep_svg(const std::vector<SweepRow>& rows,
                             const RateFitResult& fit) {
  const double W = 640.0, H = 480.0, ML = 70.0, MR = 20.0, MT = 20.0, MB = 50.0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const SweepRow& row : rows) {
    if (!(row.error > 0.0)) continue;
    const double x = std::log10(static_cast<double>(row.m));
    const double y = std::log10(row.error);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (xmin > xmax) {
    xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  xmin -= padx, xmax += padx, ymin -= pady, ymax += pady;
  auto px = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto py = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
      << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
      << H - MB << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 12)
      << "\" text-anchor=\"middle\" font-size=\"14\">log10 m</text>\n";
  svg << "<text x=\"16\" y=\"" << (H / 2)
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
      << (H / 2) << ")\">log10 error</text>\n";

  for (const SweepRow& row : rows) {
    if (!(row.error > 0.0)) continue;
    svg << "<circle cx=\"" << num(px(std::log10(static_cast<double>(row.m))))
        << "\" cy=\"" << num(py(std::log10(row.error)))
        << "\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.55\"/>\n";
  }

  if (!fit.degenerate && !fit.per_m.empty()) {
    // fitted line (natural-log fit converted to the log10 axes)
    const double lx0 = xmin + padx, lx1 = xmax - padx;
    auto fit_y = [&](double lx) {
      const double ln_m = lx * std::numbers::ln10;
      return (fit.intercept + fit.slope * ln_m) / std::numbers::ln10;
    };
    svg << "<line x1=\"" << num(px(lx0)) << "\" y1=\"" << num(py(fit_y(lx0)))
        << "\" x2=\"" << num(px(lx1)) << "\" y2=\"" << num(py(fit_y(lx1)))
        << "\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n";
    // guide with the predicted exponent, anchored at the first per-m mean
    const double gx0 = std::log10(static_cast<double>(fit.per_m.front().m));
    const double gy0 = std::log10(fit.per_m.front().mean_error);
    auto guide_y = [&](double lx) {
      return gy0 + fit.theory_exponent * (lx - gx0);
    };
    svg << "<line x1=\"" << num(px(lx0)) << "\" y1=\"" << num(py(guide_y(lx0)))
        << "\" x2=\"" << num(px(lx1)) << "\" y2=\"" << num(py(guide_y(lx1)))
        << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << (W - MR - 8) << "\" y=\"" << (MT + 16)
        << "\" text-anchor=\"end\" font-size=\"13\">slope " << num(fit.slope)
        << ", predicted " << num(fit.theory_exponent) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_file: cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write_file: write failed for " + path);
}

// Write the sweep report in the configured format (plus the optional SVG
// alongside, at out + ".svg"). Returns the main report path.
inline std::string emit_report(const std::vector<SweepRow>& rows,
                               const RateFitResult& fit,
                               const ExperimentConfig& cfg) {
  if (cfg.out.empty()) throw std::invalid_argument("emit_report: no output path");
  if (cfg.format == "csv")
    write_file(cfg.out, sweep_csv(rows));
  else
    write_file(cfg.out, sweep_json(rows, fit, cfg).dump(2) + "\n");
  if (cfg.svg) write_file(cfg.out + ".svg", sweep_svg(rows, fit));
  return cfg.out;
}

}  // namespace locnet
