#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mbpinn/metrics.hpp"

using namespace mbpinn;

TEST_CASE("pointwise absolute error") {
  Vector a(3), b(3);
  a << 1.0, -2.0, 0.5;
  b << 1.0, -2.0, 0.5;
  CHECK(bench::abse(a, b) == Vector(Vector::Zero(3)));

  Vector p = Vector::Constant(1, 1.5), e = Vector::Constant(1, 1.0);
  CHECK(bench::abse(p, e)[0] == 0.5);
  CHECK(bench::abse(e, p) == bench::abse(p, e));
  CHECK_THROWS(bench::abse(a, p));
}

TEST_CASE("relative L2 error") {
  Vector e(4);
  e << 1.0, -2.0, 3.0, -4.0;
  CHECK(bench::rel(e, e) == 0.0);
  CHECK(bench::rel(Vector::Zero(4), e) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bench::rel(Vector(2.0 * e), e) == doctest::Approx(1.0).epsilon(1e-15));

  // invariant under common rescaling of both arguments
  Rng rng(3);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector pred(16), exact(16);
  for (int i = 0; i < 16; ++i) {
    pred[i] = n01(rng);
    exact[i] = n01(rng) + 2.0;
  }
  const double base = bench::rel(pred, exact);
  for (double c : {-3.0, 0.25, 1e6}) {
    CHECK(bench::rel(Vector(c * pred), Vector(c * exact)) ==
          doctest::Approx(base).epsilon(1e-12));
  }

  CHECK_THROWS(bench::rel(Vector::Zero(4), Vector::Zero(4)));  // zero-norm reference
  CHECK_THROWS(bench::rel(Vector::Zero(3), e));
}

TEST_CASE("posterior predictive mean and spread over parameter samples") {
  nets::Network net = nets::make_network(testutil::small_spec(0, 1, {4}));
  Rng rng(7);
  const Vector ta = nets::init_params(net, rng);
  const Vector tb = nets::init_params(net, rng);
  const auto p = problems::PdeProblem::make(problems::ProblemId::kMultiscale1d, 0.5);
  const auto grid = data::eval_grid(p, 17);

  SUBCASE("a single sample predicts its own forward pass with zero spread") {
    const auto [mean, stddev] = bench::posterior_predict({ta}, net, grid);
    REQUIRE(mean.size() == 17);
    for (Eigen::Index i = 0; i < 17; ++i) {
      CHECK(mean[i] == doctest::Approx(nets::forward(net, ta, grid.points.col(i))).epsilon(1e-12));
    }
    // not bitwise zero: FMA contraction leaves ~eps*x^2 under the sqrt
    CHECK(stddev.lpNorm<Eigen::Infinity>() <= 1e-9);
  }

  SUBCASE("identical samples collapse to zero spread") {
    // n*x^2/n - (n*x/n)^2 can leave ~eps*x^2 of cancellation noise under the sqrt
    const auto [mean, stddev] = bench::posterior_predict({ta, ta, ta}, net, grid);
    CHECK(stddev.lpNorm<Eigen::Infinity>() <= 1e-7);
  }

  SUBCASE("two samples give the midpoint and half the gap") {
    const auto [mean, stddev] = bench::posterior_predict({ta, tb}, net, grid);
    for (Eigen::Index i = 0; i < 17; ++i) {
      const double fa = nets::forward(net, ta, grid.points.col(i));
      const double fb = nets::forward(net, tb, grid.points.col(i));
      CHECK(mean[i] == doctest::Approx(0.5 * (fa + fb)).epsilon(1e-12));
      CHECK(std::abs(stddev[i] - 0.5 * std::abs(fa - fb)) <= 1e-9);
    }
  }

  SUBCASE("offset selects the right block of a stacked sample vector") {
    const Eigen::Index n = net.layout.total_size();
    Vector padded(3 + n);
    padded << Vector::Constant(3, 99.0), ta;  // decoy block, then the real segment
    const auto [mean, stddev] = bench::posterior_predict({padded}, net, grid, 3);
    for (Eigen::Index i = 0; i < 17; ++i) {
      CHECK(mean[i] == doctest::Approx(nets::forward(net, ta, grid.points.col(i))).epsilon(1e-12));
    }
    CHECK_THROWS(bench::posterior_predict({padded}, net, grid, 4));  // runs past the end
    CHECK_THROWS(bench::posterior_predict({}, net, grid));
  }
}
