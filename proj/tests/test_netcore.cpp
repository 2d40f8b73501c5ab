#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "locnet/netcore.hpp"
#include "locnet/rng.hpp"

using namespace locnet;
using Catch::Matchers::WithinAbs;

namespace {
const SigmoidSpec kLogistic = sigmoid_spec(SigmoidKind::logistic);
}

TEST_CASE("a localizer unit takes exactly the gate-count values") {
  const double eps = 1e-6;
  const double K = threshold_for(kLogistic, eps);

  SECTION("one dimension: high on the closed cell, low everywhere else") {
    const CubicPartition p = make_partition(4, 1);
    const LocalizerNet net(p, {2}, K, kLogistic);
    const double high = eval_sigmoid(kLogistic, 2.0 * K * 0.5);
    const double low = eval_sigmoid(kLogistic, 2.0 * K * -0.5);
    for (int i = 0; i <= 200; ++i) {
      const Point x{i / 200.0};
      const double v = eval_localizer(net, x);
      if (p.cell_contains({2}, x))
        CHECK(v == high);
      else
        CHECK(v == low);
    }
    // the cell walls belong to the closed cell
    CHECK(eval_localizer(net, {0.25}) == high);
    CHECK(eval_localizer(net, {0.5}) == high);
  }

  SECTION("two dimensions: at most three distinct values appear") {
    const CubicPartition p = make_partition(3, 2);
    const LocalizerNet net(p, {2, 2}, K, kLogistic);
    const double v_in = eval_sigmoid(kLogistic, 2.0 * K * 0.5);
    const double v_edge = eval_sigmoid(kLogistic, 2.0 * K * -0.5);
    const double v_far = eval_sigmoid(kLogistic, 2.0 * K * -1.5);
    Rng rng(7);
    for (int i = 0; i < 400; ++i) {
      const Point x{rng.unit(), rng.unit()};
      const double v = eval_localizer(net, x);
      CHECK((v == v_in || v == v_edge || v == v_far));
      if (p.cell_contains({2, 2}, x)) CHECK(v == v_in);
    }
  }
}

TEST_CASE("localizer separates inside from outside at the requested level") {
  Rng rng(11);
  for (SigmoidKind kind :
       {SigmoidKind::logistic, SigmoidKind::tanh_half, SigmoidKind::arctan,
        SigmoidKind::gompertz}) {
    const SigmoidSpec s = sigmoid_spec(kind);
    for (double eps : {1e-2, 1e-5}) {
      const double K = threshold_for(s, eps);
      for (int d : {1, 2}) {
        const CubicPartition p = make_partition(3, d);
        MultiIndex j(d);
        for (int l = 0; l < d; ++l) j[l] = 1 + static_cast<int>(rng.below(3));
        const LocalizerNet net(p, j, K, s);
        for (int i = 0; i < 100; ++i) {
          Point x(d);
          for (int l = 0; l < d; ++l) x[l] = rng.unit();
          const double v = eval_localizer(net, x);
          if (p.cell_contains(j, x))
            CHECK(v >= 1.0 - eps);
          else
            CHECK(v < eps);
        }
      }
    }
  }
}

TEST_CASE("summing every cell's unit stays below 2^d + 1") {
  for (int d : {1, 2}) {
    for (int n : {2, 4}) {
      const double eps = std::pow(static_cast<double>(n), -(d + 1));
      const double K = threshold_for(kLogistic, eps);
      const CubicPartition p = make_partition(n, d);
      std::vector<LocalizerNet> units;
      for (std::size_t i = 0; i < p.cell_count(); ++i)
        units.emplace_back(p, p.from_linear(i), K, kLogistic);

      auto total = [&](const Point& x) {
        double sum = 0.0;
        for (const LocalizerNet& u : units) sum += eval_localizer(u, x);
        return sum;
      };

      Rng rng(23);
      const double cap = std::pow(2.0, d) + 1.0;
      for (int i = 0; i < 100; ++i) {
        Point x(d);
        for (int l = 0; l < d; ++l) x[l] = rng.unit();
        CHECK(total(x) < cap);
      }
      // a shared corner fires all 2^d adjacent cells at once
      const Point corner(d, 0.5);
      CHECK(total(corner) < cap);
      CHECK(total(corner) >= std::pow(2.0, d) * (1.0 - eps));
    }
  }
}

TEST_CASE("interpolation reads coefficients off the cell centers") {
  const CubicPartition p = make_partition(2, 1);
  const double K = threshold_for(kLogistic, 1e-8);
  const SparseApproximant net =
      build_approximant([](const Point& x) { return x[0]; }, p, K, kLogistic);
  CHECK(net.coefficient({1}) == 0.25);
  CHECK(net.coefficient({2}) == 0.75);

  // off the walls the net sits within leakage of the owning coefficient
  for (double x : {0.1, 0.3, 0.6, 0.9}) {
    const double want = x < 0.5 ? 0.25 : 0.75;
    CHECK_THAT(eval_sparse_approximant(net, {x}), WithinAbs(want, 1e-6));
  }
}

TEST_CASE("map construction and interpolation agree bitwise") {
  const CubicPartition p = make_partition(3, 2);
  const double K = threshold_for(kLogistic, 1e-6);
  auto f = [](const Point& x) { return std::sin(5.0 * x[0]) + x[1]; };

  const SparseApproximant a = build_approximant(f, p, K, kLogistic);
  std::map<MultiIndex, double> coeffs;
  for (std::size_t i = 0; i < p.cell_count(); ++i) {
    const MultiIndex j = p.from_linear(i);
    coeffs[j] = f(p.center(j));
  }
  const SparseApproximant b = make_approximant(p, K, kLogistic, coeffs);

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.unit(), rng.unit()};
    CHECK(eval_sparse_approximant(a, x) == eval_sparse_approximant(b, x));
  }
}

TEST_CASE("zero coefficients drop out of the evaluation") {
  const CubicPartition p = make_partition(4, 1);
  const double K = threshold_for(kLogistic, 1e-6);
  const SparseApproximant net =
      make_approximant(p, K, kLogistic, {{MultiIndex{2}, 3.0}});
  // only cell 2 contributes; everywhere else just its tail leaks
  CHECK_THAT(eval_sparse_approximant(net, {0.375}),
             WithinAbs(3.0 * eval_sigmoid(kLogistic, K), 1e-12));
  CHECK_THAT(eval_sparse_approximant(net, {0.9}),
             WithinAbs(3.0 * eval_sigmoid(kLogistic, -K), 1e-15));
}

TEST_CASE("anchors must live in their own cells") {
  const CubicPartition p = make_partition(2, 1);
  const std::vector<Point> good{{0.1}, {0.7}};
  const std::vector<Point> bad{{0.7}, {0.1}};
  auto f = [](const Point& x) { return x[0]; };
  CHECK_NOTHROW(build_approximant(f, p, good, 3.0, kLogistic));
  CHECK_THROWS_AS(build_approximant(f, p, bad, 3.0, kLogistic),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_approximant(f, p, {{0.1}}, 3.0, kLogistic),
                  std::invalid_argument);
}

TEST_CASE("gate-pair encoding reproduces the localizer") {
  const double K = threshold_for(kLogistic, 1e-5);
  // dyadic n keeps walls, centers, and encoded shifts exactly representable,
  // so the encoding agrees even at points sitting right on a wall
  for (int d : {1, 2}) {
    const CubicPartition p = make_partition(4, d);
    const MultiIndex j(d, 2);
    const LocalizerNet net(p, j, K, kLogistic);
    const PhiBounds bounds{std::max(2.0 * d, localizer_bias_bound(d, K)), 1.0,
                           2.0 * K};
    const PhiNetParams params = encode_localizer(net, bounds);
    CHECK(validate_params(params).ok);
    CHECK(params.units.size() == p.cell_count());

    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
      Point x(d);
      for (int l = 0; l < d; ++l)
        x[l] = (i % 4 == 0) ? 0.25 * rng.below(5) : rng.unit();
      CHECK_THAT(eval_phi_net(params, x),
                 WithinAbs(eval_localizer(net, x), 1e-12));
    }
  }
}

TEST_CASE("gate-pair encoding reproduces an interpolant") {
  const double K = threshold_for(kLogistic, 1e-5);
  const CubicPartition p = make_partition(3, 2);
  const SparseApproximant net = build_approximant(
      [](const Point& x) { return x[0] - 2.0 * x[1]; }, p, K, kLogistic);
  double cmax = 0.0;
  for (double c : net.coeffs) cmax = std::max(cmax, std::abs(c));
  const PhiBounds bounds{localizer_bias_bound(2, K), cmax, 2.0 * K};
  const PhiNetParams params = encode_approximant(net, bounds);
  CHECK(validate_params(params).ok);

  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Point x{rng.unit(), rng.unit()};
    CHECK_THAT(eval_phi_net(params, x),
               WithinAbs(eval_sparse_approximant(net, x), 1e-12));
  }
}

TEST_CASE("the localizer bias outgrows a bound of 2d") {
  const double K = threshold_for(kLogistic, 1e-4);
  CHECK(localizer_bias_bound(2, K) == (4.0 * 2 - 1.0) * K);
  CHECK(localizer_bias_bound(2, K) > 2.0 * 2);

  const CubicPartition p = make_partition(2, 2);
  const LocalizerNet net(p, {1, 1}, K, kLogistic);
  const PhiNetParams params = encode_localizer(net, PhiBounds{4.0, 1.0, 2.0 * K});
  const ValidationReport report = validate_params(params);
  CHECK(!report.ok);
  REQUIRE(!report.violations.empty());
  for (const BoundViolation& v : report.violations) CHECK(v.field == "b");
}

TEST_CASE("family evaluation rejects malformed parameters") {
  PhiNetParams params;
  params.n = 2;
  params.d = 1;
  params.bounds = {10.0, 1.0, 10.0};
  params.sigma = kLogistic;
  params.units.push_back(detail::zero_unit(1));  // one unit, two required
  CHECK_THROWS_AS(validate_params(params), std::invalid_argument);
  CHECK_THROWS_AS(eval_phi_net(params, {0.5}), std::invalid_argument);

  params.units.push_back(detail::zero_unit(1));
  CHECK_NOTHROW(validate_params(params));
  CHECK(eval_phi_net(params, {0.5}) == 0.0);
  CHECK_THROWS_AS(eval_phi_net(params, {1.5}), std::domain_error);

  params.units[0].c = 5.0;  // above C
  CHECK(!validate_params(params).ok);
  CHECK_THROWS_AS(eval_phi_net(params, {0.5}), std::invalid_argument);
}

TEST_CASE("parameters survive a serialization round trip") {
  const double K = threshold_for(kLogistic, 1e-5);
  const CubicPartition p = make_partition(3, 2);
  const SparseApproximant net = build_approximant(
      [](const Point& x) { return x[0] * x[1] - 0.3; }, p, K, kLogistic);
  const PhiNetParams params =
      encode_approximant(net, PhiBounds{localizer_bias_bound(2, K), 2.0, 2.0 * K});

  const nlohmann::json j = nlohmann::json::parse(to_json(params).dump());
  const PhiNetParams back = phi_from_json(j);
  CHECK(back.n == params.n);
  CHECK(back.d == params.d);
  CHECK(back.sigma.kind == params.sigma.kind);

  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const Point x{rng.unit(), rng.unit()};
    CHECK(eval_phi_net(back, x) == eval_phi_net(params, x));
  }
}

TEST_CASE("shallow comparator evaluates and enforces its coefficient cap") {
  ShallowNetParams params;
  params.d = 1;
  params.Gamma = 2.0;
  params.sigma = kLogistic;
  params.units.push_back({2.0, {0.0}, 0.0});
  CHECK(eval_shallow(params, {0.3}) == 1.0);

  params.units.push_back({1.0, {1.0}, -0.5});
  CHECK_THAT(eval_shallow(params, {0.5}), WithinAbs(1.5, 1e-15));

  params.units.push_back({3.0, {1.0}, 0.0});
  CHECK_THROWS_AS(eval_shallow(params, {0.5}), std::invalid_argument);
  params.units.pop_back();
  CHECK_THROWS_AS(eval_shallow(params, {1.5}), std::domain_error);
}

TEST_CASE("clipping is idempotent, short, and exact inside the band") {
  CHECK(project_clip(1.7, 1.0) == 1.0);
  CHECK(project_clip(-3.0, 1.0) == -1.0);
  CHECK(project_clip(0.3, 1.0) == 0.3);
  CHECK(project_clip(-1.0, 1.0) == -1.0);
  CHECK_THROWS_AS(project_clip(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(project_clip(0.5, -2.0), std::invalid_argument);

  Rng rng(29);
  for (int i = 0; i < 500; ++i) {
    const double v = rng.uniform(-5.0, 5.0);
    const double w = rng.uniform(-5.0, 5.0);
    const double M = rng.uniform(0.1, 3.0);
    CHECK(project_clip(project_clip(v, M), M) == project_clip(v, M));
    CHECK(std::abs(project_clip(v, M)) <= M);
    CHECK(std::abs(project_clip(v, M) - project_clip(w, M)) <=
          std::abs(v - w) * (1.0 + 1e-15));
  }
}
