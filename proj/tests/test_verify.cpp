#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "locnet/netcore.hpp"
#include "locnet/targets.hpp"
#include "locnet/verify.hpp"

using namespace locnet;
using Catch::Matchers::WithinAbs;

namespace {
const SigmoidSpec kLogistic = sigmoid_spec(SigmoidKind::logistic);
}

TEST_CASE("grid check accepts derived gains across curves and shapes") {
  for (SigmoidKind kind :
       {SigmoidKind::logistic, SigmoidKind::tanh_half, SigmoidKind::arctan,
        SigmoidKind::gompertz}) {
    const SigmoidSpec s = sigmoid_spec(kind);
    for (double eps : {1e-2, 1e-5}) {
      // 40 sub-intervals never land a grid point on a wall of 3 cells
      const CubicPartition p = make_partition(3, 2);
      const GridReport rep = check_localization(p, {2, 3}, eps, s, 41);
      INFO(sigmoid_name(kind) << " eps " << eps);
      CHECK(rep.pass);
      CHECK(rep.min_inside_value >= 1.0 - eps);
      CHECK(rep.max_outside_value < eps);
      CHECK(rep.gain == threshold_for(s, eps));
    }
  }
}

TEST_CASE("grid check flags an underpowered gain") {
  const CubicPartition p = make_partition(3, 1);
  const GridReport rep = check_localization(p, {2}, 1e-4, kLogistic, 41, 0.5);
  CHECK(!rep.pass);
  CHECK(rep.gain == 0.5);
  CHECK(rep.max_outside_value > 1e-4);
}

TEST_CASE("grid check validates its inputs") {
  const CubicPartition p = make_partition(3, 1);
  CHECK_THROWS_AS(check_localization(p, {2}, 1e-4, kLogistic, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_localization(p, {4}, 1e-4, kLogistic, 41),
                  std::invalid_argument);
}

TEST_CASE("sparse bound audit reproduces the worked example") {
  // one supported cell out of two on the line, fine resolution 8, level 8^-2
  const SparseTarget f =
      SparseTarget::from_support(make_support(2, 1, {{1}}), 1.0, 1.0);
  const CubicPartition p = make_partition(8, 1);
  const double eps = std::pow(8.0, -2.0);
  const double K = threshold_for(kLogistic, eps);
  const SparseApproximant net =
      build_approximant([&](const Point& x) { return f.eval(x); }, p, K, kLogistic);

  // 999 sub-intervals share no factor with 8, so no grid point sits on a wall
  const SparseBoundReport rep = check_sparse_bound(f, net, eps, 1000);
  CHECK(rep.pass);
  CHECK(rep.f_sup_used == 0.5);
  CHECK_THAT(rep.bound_error,
             WithinAbs(std::sqrt(2.0) * 0.125 + 0.5 * 8.0 * eps, 1e-12));
  CHECK_THAT(rep.bound_off_support, WithinAbs(0.0625, 1e-15));
  CHECK(rep.sup_error <= rep.bound_error);
  CHECK(rep.sup_error > 0.0);
  CHECK(rep.off_support_points > 0);
  CHECK(rep.sup_off_support <= rep.bound_off_support);
  CHECK(!rep.dimension_flag);
}

TEST_CASE("sparse bound audit works for full-support targets too") {
  const SparseTarget f = make_lipschitz_target(3, 1.0, 1.0, 2);
  const CubicPartition p = make_partition(5, 2);
  const double eps = 1e-4;
  const SparseApproximant net = build_approximant(
      [&](const Point& x) { return f.eval(x); }, p, threshold_for(kLogistic, eps),
      kLogistic);
  const SparseBoundReport rep = check_sparse_bound(f, net, eps, 42);
  CHECK(rep.pass);
  CHECK(rep.off_support_points == 0);
  CHECK(rep.sup_off_support == 0.0);
}

TEST_CASE("approximation error shrinks as the partition refines") {
  const SparseTarget f =
      SparseTarget::from_support(make_support(2, 1, {{1}}), 1.0, 1.0);
  double prev = 1e300;
  for (int n : {8, 16, 32}) {
    const double eps = std::pow(static_cast<double>(n), -2.0);
    const SparseApproximant net = build_approximant(
        [&](const Point& x) { return f.eval(x); }, make_partition(n, 1),
        threshold_for(kLogistic, eps), kLogistic);
    const SparseBoundReport rep = check_sparse_bound(f, net, eps, 42);
    CHECK(rep.pass);
    CHECK(rep.sup_error < prev);
    prev = rep.sup_error;
  }
}

TEST_CASE("sparse bound audit validates its inputs") {
  const SparseTarget f =
      SparseTarget::from_support(make_support(2, 1, {{1}}), 1.0, 1.0);
  const double K = threshold_for(kLogistic, 1e-3);
  const SparseApproximant coarse = build_approximant(
      [&](const Point& x) { return f.eval(x); }, make_partition(7, 1), K,
      kLogistic);
  CHECK_THROWS_AS(check_sparse_bound(f, coarse, 1e-3, 42), std::invalid_argument);

  const SparseApproximant fine = build_approximant(
      [&](const Point& x) { return f.eval(x); }, make_partition(8, 1), K,
      kLogistic);
  CHECK_THROWS_AS(check_sparse_bound(f, fine, 0.0, 42), std::invalid_argument);
  CHECK_THROWS_AS(check_sparse_bound(f, fine, 1e-3, 2), std::invalid_argument);

  const SparseTarget g = make_lipschitz_target(1, 1.0, 1.0, 2);
  CHECK_THROWS_AS(check_sparse_bound(g, fine, 1e-3, 42), std::invalid_argument);
}

TEST_CASE("dimension flag raises above two dimensions") {
  const SparseTarget f = make_lipschitz_target(4, 1.0, 1.0, 3);
  const SparseApproximant net = build_approximant(
      [&](const Point& x) { return f.eval(x); }, make_partition(4, 3),
      threshold_for(kLogistic, 1e-4), kLogistic);
  const SparseBoundReport rep = check_sparse_bound(f, net, 1e-4, 8);
  CHECK(rep.dimension_flag);
}

TEST_CASE("interpolating the constant one shows the wall pile-up") {
  const CubicPartition p = make_partition(10, 2);
  const double eps = 1e-6;
  const SparseApproximant net = build_approximant(
      [](const Point&) { return 1.0; }, p, threshold_for(kLogistic, eps), kLogistic);

  // away from the walls exactly one unit is high, the rest only leak
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.unit(), rng.unit()};
    CHECK_THAT(eval_sparse_approximant(net, x), WithinAbs(1.0, 2e-4));
  }

  // an interior corner lies in four closed cells, so four units are high at
  // once and the net overshoots by a factor 2^d; this is why measurement
  // grids keep their points off the walls
  const double corner = eval_sparse_approximant(net, {0.5, 0.5});
  CHECK(corner > 3.99);
  CHECK(corner < 4.01);
}
