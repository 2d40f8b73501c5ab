#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "locnet/targets.hpp"

using namespace locnet;
using Catch::Matchers::WithinAbs;

TEST_CASE("anchor targets scale the distance to the nearest anchor") {
  const SparseTarget f = SparseTarget::from_anchors({{0.2}}, 1.0, 2.0, 1);
  CHECK(f.eval({0.2}) == 0.0);
  CHECK(f.eval({0.5}) == 2.0 * 0.3);
  CHECK(f.eval({0.0}) == 2.0 * 0.2);

  const SparseTarget g = SparseTarget::from_anchors({{0.0, 0.0}, {1.0, 1.0}}, 0.5,
                                                    1.0, 2);
  CHECK(g.eval({0.0, 0.0}) == 0.0);
  CHECK_THAT(g.eval({0.3, 0.4}), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK(g.kind() == SparseTarget::Kind::anchors);
  CHECK_THROWS_AS(g.support(), std::invalid_argument);
  CHECK_THROWS_AS(g.eval({0.5}), std::invalid_argument);
}

TEST_CASE("cell-supported targets measure distance into the support") {
  // support = first of two cells on the line, so the function climbs away
  // from [1/2, 1] and tops out at the left endpoint
  const SparseTarget f =
      SparseTarget::from_support(make_support(2, 1, {{1}}), 1.0, 1.0);
  CHECK(f.kind() == SparseTarget::Kind::sparse);
  CHECK(f.N() == 2);
  CHECK(f.s() == 1);
  CHECK(f.eval({0.25}) == 0.25);
  CHECK(f.eval({0.0}) == 0.5);
  CHECK(f.eval({0.5}) == 0.0);
  CHECK(f.eval({0.75}) == 0.0);
  CHECK(f.eval({1.0}) == 0.0);
  CHECK(f.sup_norm() == 0.5);

  // rough-exponent version bends the same profile
  const SparseTarget h =
      SparseTarget::from_support(make_support(2, 1, {{1}}), 0.5, 1.0);
  CHECK_THAT(h.eval({0.25}), WithinAbs(0.5, 1e-15));
  CHECK(h.eval({0.75}) == 0.0);
}

TEST_CASE("full-support edge case falls back to the cube walls") {
  const SparseTarget f =
      SparseTarget::from_support(make_support(2, 1, {{1}, {2}}), 1.0, 1.0);
  CHECK(f.eval({0.5}) == 0.5);
  CHECK(f.eval({0.2}) == 0.2);
  CHECK(f.eval({0.9}) == Catch::Approx(0.1).margin(1e-15));
  CHECK(f.eval({0.0}) == 0.0);
  CHECK(f.eval({1.0}) == 0.0);
}

TEST_CASE("targets vanish exactly off their support") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    for (int d : {1, 2}) {
      const SparseTarget f = make_sparse_target(seed, 3, 2, 1.0, 1.5, d);
      const SupportSet& S = f.support();
      CHECK(S.s() == 2);
      Rng rng(derive_seed(seed, {99}));
      int off = 0;
      for (int i = 0; i < 300; ++i) {
        Point x(d);
        for (int l = 0; l < d; ++l) x[l] = rng.unit();
        if (S.contains(x)) {
          CHECK(f.eval(x) >= 0.0);
        } else {
          ++off;
          CHECK(f.eval(x) == 0.0);
        }
      }
      CHECK(off > 0);
    }
  }
}

TEST_CASE("targets stay positive well inside their support") {
  const SparseTarget f =
      SparseTarget::from_support(make_support(4, 2, {{2, 3}}), 0.5, 1.0);
  // center of the supported cell is as deep inside as it gets
  const Point center{0.375, 0.625};
  CHECK(f.eval(center) > 0.0);
  CHECK_THAT(f.eval(center), WithinAbs(std::sqrt(0.125), 1e-15));
}

TEST_CASE("generated targets obey their smoothness budget") {
  for (std::uint64_t seed : {5ULL, 6ULL}) {
    for (double r : {0.5, 1.0}) {
      const SparseTarget dense = make_lipschitz_target(seed, r, 2.0, 2);
      const auto rep1 = verify_lipschitz(
          [&](const Point& x) { return dense.eval(x); }, r, 2.0, 2, 2000, seed);
      CHECK(rep1.pass);
      CHECK(rep1.max_ratio <= 2.0 * (1.0 + 1e-9));

      const SparseTarget sparse = make_sparse_target(seed, 2, 1, r, 1.0, 2);
      const auto rep2 = verify_lipschitz(
          [&](const Point& x) { return sparse.eval(x); }, r, 1.0, 2, 2000, seed);
      CHECK(rep2.pass);
    }
  }
}

TEST_CASE("a function breaking the budget is caught") {
  const auto rep = verify_lipschitz([](const Point& x) { return 2.0 * x[0]; }, 1.0,
                                    1.0, 1, 4000, 77);
  CHECK(!rep.pass);
  CHECK(rep.max_ratio > 1.5);
  CHECK(rep.max_ratio <= 2.0 + 1e-9);
}

TEST_CASE("sup norm estimates and the hard cap line up") {
  const SparseTarget f = make_lipschitz_target(9, 1.0, 1.5, 2);
  CHECK(f.sup_norm() <= f.sup_norm_bound());
  CHECK_THAT(f.sup_norm_bound(), WithinAbs(1.5 * std::sqrt(2.0), 1e-12));
  CHECK(f.sup_norm() > 0.0);

  const SparseTarget g = make_sparse_target(9, 2, 1, 0.5, 1.0, 1);
  CHECK(g.sup_norm() <= g.sup_norm_bound());
  CHECK(g.sup_norm() > 0.0);
}

TEST_CASE("target construction rejects bad shapes") {
  CHECK_THROWS_AS(SparseTarget::from_anchors({}, 1.0, 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseTarget::from_anchors({{0.5, 0.5}}, 1.0, 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseTarget::from_anchors({{0.5}}, 0.0, 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseTarget::from_anchors({{0.5}}, 1.2, 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseTarget::from_anchors({{0.5}}, 1.0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_sparse_target(1, 2, 0, 1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_sparse_target(1, 2, 5, 1.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("seeded generation is reproducible and serializable") {
  const SparseTarget a = make_sparse_target(123, 3, 2, 0.5, 1.0, 2);
  const SparseTarget b = make_sparse_target(123, 3, 2, 0.5, 1.0, 2);
  const SparseTarget c = make_sparse_target(124, 3, 2, 0.5, 1.0, 2);
  Rng rng(55);
  bool saw_difference = false;
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.unit(), rng.unit()};
    CHECK(a.eval(x) == b.eval(x));
    if (a.eval(x) != c.eval(x)) saw_difference = true;
  }
  CHECK(saw_difference);

  const SparseTarget back = target_from_json(target_to_json(a));
  const SparseTarget dense = make_lipschitz_target(8, 1.0, 2.0, 2);
  const SparseTarget dense_back = target_from_json(target_to_json(dense));
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.unit(), rng.unit()};
    CHECK(back.eval(x) == a.eval(x));
    CHECK(dense_back.eval(x) == dense.eval(x));
  }
}
