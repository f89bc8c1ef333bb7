#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "mbpinn/observations.hpp"

using namespace mbpinn;
using problems::Field;
using problems::PdeProblem;
using problems::ProblemId;

TEST_CASE("latin hypercube puts exactly one point in each stratum") {
  const auto p = PdeProblem::make(ProblemId::kMultiscale1d, 0.5);
  Rng rng(2024);
  const Matrix pts = data::lhs_sample(4, p.domain(), rng);
  REQUIRE(pts.cols() == 4);
  std::vector<double> xs(pts.data(), pts.data() + 4);
  std::sort(xs.begin(), xs.end());
  for (int i = 0; i < 4; ++i) {
    CHECK(xs[i] >= 0.25 * i);
    CHECK(xs[i] < 0.25 * (i + 1));
  }

  // and per-axis in 2d, with every point inside the box
  const auto p4 = PdeProblem::make(ProblemId::kPoisson2d);
  const Matrix q = data::lhs_sample(50, p4.domain(), rng);
  REQUIRE(q.rows() == 2);
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<int> hits(50, 0);
    for (int j = 0; j < 50; ++j) {
      CHECK(q(axis, j) >= -1.0);
      CHECK(q(axis, j) <= 1.0);
      const int stratum = std::min<int>(49, static_cast<int>((q(axis, j) + 1.0) / (2.0 / 50)));
      hits[stratum]++;
    }
    CHECK(*std::max_element(hits.begin(), hits.end()) == 1);
  }

  Rng r1(7), r2(7);
  CHECK(data::lhs_sample(16, p.domain(), r1) == data::lhs_sample(16, p.domain(), r2));
  CHECK_THROWS(data::lhs_sample(0, p.domain(), rng));
}

TEST_CASE("boundary sampling alternates endpoints in 1d and covers the perimeter in 2d") {
  const auto p1 = PdeProblem::make(ProblemId::kMultiscale1d, 0.5);
  Rng rng(5);
  const Matrix b = data::boundary_sample(5, p1.domain(), rng);
  CHECK(b(0, 0) == 0.0);
  CHECK(b(0, 1) == 1.0);
  CHECK(b(0, 2) == 0.0);
  CHECK(b(0, 3) == 1.0);
  CHECK(b(0, 4) == 0.0);

  const auto p4 = PdeProblem::make(ProblemId::kPoisson2d);
  const Matrix q = data::boundary_sample(200, p4.domain(), rng);
  int edge_hits[4] = {0, 0, 0, 0};
  for (int j = 0; j < 200; ++j) {
    CHECK(p4.on_boundary(q.col(j)));
    if (q(1, j) == -1.0) edge_hits[0]++;
    if (q(0, j) == 1.0) edge_hits[1]++;
    if (q(1, j) == 1.0) edge_hits[2]++;
    if (q(0, j) == -1.0) edge_hits[3]++;
  }
  for (int e = 0; e < 4; ++e) CHECK(edge_hits[e] > 0);
}

TEST_CASE("observations carry exact clean values and the requested point counts") {
  const auto p1 = PdeProblem::make(ProblemId::kMultiscale1d, 0.5);
  Rng rng(11);
  const auto obs = data::make_observations(p1, Field::kSolution, 98, 2, 0.01, 0.01, rng);
  REQUIRE(obs.size() == 100);
  CHECK(obs.field == Field::kSolution);
  CHECK(obs.tau == 0.01);
  CHECK(obs.noise_level == 0.01);
  // the two boundary points are appended after the interior block
  CHECK(obs.points(0, 98) == 0.0);
  CHECK(obs.points(0, 99) == 1.0);
  for (Eigen::Index j = 0; j < obs.size(); ++j) {
    CHECK(obs.clean[j] == p1.exact_solution(obs.points.col(j)));
  }
}

TEST_CASE("zero noise leaves observations bit-identical to the exact field") {
  const auto p2 = PdeProblem::make(ProblemId::kNonlinearPoisson1d);
  Rng rng(13);
  const auto obs = data::make_observations(p2, Field::kCoefficient, 25, 0, 0.0, 1.0, rng);
  CHECK(obs.noisy == obs.clean);
}

TEST_CASE("noise draws have the configured standard deviation") {
  const auto p1 = PdeProblem::make(ProblemId::kMultiscale1d, 0.5);
  Rng rng(17);
  const double sigma = 0.05;
  const auto obs = data::make_observations(p1, Field::kSolution, 10000, 0, sigma, 1.0, rng);
  const Vector noise = obs.noisy - obs.clean;
  const double mean = noise.mean();
  const double var = (noise.array() - mean).square().sum() / (noise.size() - 1);
  CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt(10000.0));
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("observation determinism and input validation") {
  const auto p3 = PdeProblem::make(ProblemId::kMultiscale2d, 0.5);
  Rng r1(23), r2(23);
  const auto a = data::make_observations(p3, Field::kSolution, 40, 0, 0.01, 0.01, r1);
  const auto b = data::make_observations(p3, Field::kSolution, 40, 0, 0.01, 0.01, r2);
  CHECK(a.points == b.points);
  CHECK(a.noisy == b.noisy);

  Rng rng(29);
  CHECK_THROWS(data::make_observations(p3, Field::kForce, 10, 5, 0.01, 0.01, rng));
  CHECK_THROWS(data::make_observations(p3, Field::kBoundary, 10, 5, 0.01, 0.01, rng));
  CHECK_THROWS(data::make_observations(p3, Field::kSolution, 10, 0, -0.1, 0.01, rng));
  CHECK_THROWS(data::make_observations(p3, Field::kSolution, 10, 0, 0.01, 0.0, rng));
  CHECK_THROWS(data::make_observations(p3, Field::kSolution, 0, 0, 0.01, 0.01, rng));
  CHECK_NOTHROW(data::make_observations(p3, Field::kBoundary, 0, 8, 0.01, 0.01, rng));
}

TEST_CASE("signal-to-noise ratio in decibels") {
  const Vector c3 = Vector::Constant(4, 3.0);
  CHECK(*data::snr_db(c3, Vector::Constant(4, 3.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(*data::snr_db(c3, Vector::Constant(4, 0.3)) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_FALSE(data::snr_db(c3, Vector::Zero(4)).has_value());
  CHECK_THROWS(data::snr_db(c3, Vector::Zero(3)));

  // halving the noise amplitude adds 10*log10(4) dB regardless of the signal
  Rng rng(31);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector clean(64), noise(64);
  for (int i = 0; i < 64; ++i) {
    clean[i] = 2.0 + n01(rng);
    noise[i] = 0.3 * n01(rng);
  }
  const double gain = *data::snr_db(clean, Vector(noise / 2.0)) - *data::snr_db(clean, noise);
  CHECK(gain == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));
}

TEST_CASE("evaluation grids are equidistant and endpoint-inclusive") {
  const auto p1 = PdeProblem::make(ProblemId::kMultiscale1d, 0.5);
  const auto g1 = data::eval_grid(p1, 1000);
  REQUIRE(g1.points.cols() == 1000);
  CHECK(g1.points(0, 0) == 0.0);
  CHECK(g1.points(0, 999) == 1.0);
  for (int i = 1; i < 1000; ++i) {
    CHECK(g1.points(0, i) - g1.points(0, i - 1) ==
          doctest::Approx(1.0 / 999.0).epsilon(1e-12));
  }
  CHECK(g1.exact[500] == p1.exact_solution(g1.points.col(500)));

  const auto p4 = PdeProblem::make(ProblemId::kPoisson2d);
  const auto g2 = data::eval_grid(p4, 100);
  REQUIRE(g2.points.cols() == 10000);
  CHECK(g2.points.col(0) == Vector(Vector::Constant(2, -1.0)));
  CHECK(g2.points.col(9999) == Vector(Vector::Constant(2, 1.0)));
  CHECK(g2.exact[1234] == p4.exact_solution(g2.points.col(1234)));

  const auto p2 = PdeProblem::make(ProblemId::kNonlinearPoisson1d);
  const auto gk = data::eval_grid(p2, 11, Field::kCoefficient);
  CHECK(gk.exact[5] == doctest::Approx(1.1).epsilon(1e-15));  // coefficient at x = 0.5

  CHECK_THROWS(data::eval_grid(p1, 1));
}
