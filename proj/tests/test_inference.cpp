#include <doctest.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "helpers.hpp"
#include "mbpinn/inference.hpp"

using namespace mbpinn;
using infer::AdamConfig;
using infer::Chain;
using infer::HmcConfig;
using infer::RunStatus;
using infer::Schedule;

namespace {

// isotropic standard normal in `n` dimensions: log p = -|theta|^2/2
class StdNormalDensity : public post::LogDensity {
 public:
  explicit StdNormalDensity(Eigen::Index n) : n_(n) {}
  Eigen::Index dim() const override { return n_; }
  bool eval(const Vector& theta, double& value, Vector& grad) override {
    value = -0.5 * theta.squaredNorm();
    grad = -theta;
    return true;
  }

 private:
  Eigen::Index n_;
};

// 1d quadratic bowl centred at 3: -log p = (theta - 3)^2 / 2
class ShiftedBowl : public post::LogDensity {
 public:
  Eigen::Index dim() const override { return 1; }
  bool eval(const Vector& theta, double& value, Vector& grad) override {
    value = -0.5 * (theta[0] - 3.0) * (theta[0] - 3.0);
    grad = Vector::Constant(1, -(theta[0] - 3.0));
    return true;
  }
};

// healthy at the initial value-only probe, then every gradient eval blows up
class GradBlowup : public post::LogDensity {
 public:
  Eigen::Index dim() const override { return 2; }
  bool eval(const Vector&, double&, Vector&) override { return false; }
  bool eval_value(const Vector&, double& value) override {
    value = 0.0;
    return true;
  }
};

class BadStart : public post::LogDensity {
 public:
  Eigen::Index dim() const override { return 2; }
  bool eval(const Vector&, double&, Vector&) override { return false; }
};

double std_normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

TEST_CASE("schedule evaluation") {
  Schedule fixed;
  CHECK(infer::schedule_step(fixed, 0.01, 0) == 0.01);
  CHECK(infer::schedule_step(fixed, 0.01, 123456) == 0.01);

  Schedule decay{Schedule::Kind::kDecay, 0.95, 100};
  CHECK(infer::schedule_step(decay, 2.0, 0) == 2.0);
  CHECK(infer::schedule_step(decay, 2.0, 99) == 2.0);
  CHECK(infer::schedule_step(decay, 2.0, 100) == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(infer::schedule_step(decay, 2.0, 1000) ==
        doctest::Approx(2.0 * std::pow(0.95, 10.0)).epsilon(1e-14));
  CHECK_THROWS(infer::schedule_step(decay, 2.0, -1));
  Schedule broken{Schedule::Kind::kDecay, 0.95, 0};
  CHECK_THROWS(infer::schedule_step(broken, 2.0, 10));
}

TEST_CASE("single Adam update") {
  AdamConfig cfg;

  SUBCASE("zero gradient leaves parameters untouched") {
    Vector theta = Vector::Constant(3, 1.5), m = Vector::Zero(3), v = Vector::Zero(3);
    adam_step(theta, Vector::Zero(3), m, v, 1, 0.1, cfg);
    CHECK(theta == Vector(Vector::Constant(3, 1.5)));
  }

  SUBCASE("first step follows the bias-corrected closed form") {
    Vector theta = Vector::Zero(1), m = Vector::Zero(1), v = Vector::Zero(1);
    const double g = 0.37, alpha = 0.05;
    adam_step(theta, Vector::Constant(1, g), m, v, 1, alpha, cfg);
    CHECK(theta[0] == doctest::Approx(-alpha * g / (std::abs(g) + cfg.eps_hat)).epsilon(1e-14));
    CHECK(m[0] == doctest::Approx((1.0 - cfg.beta1) * g).epsilon(1e-15));
    CHECK(v[0] == doctest::Approx((1.0 - cfg.beta2) * g * g).epsilon(1e-15));
  }

  SUBCASE("the first step is nearly scale-free in the gradient") {
    auto first_update = [&](double g) {
      Vector theta = Vector::Zero(1), m = Vector::Zero(1), v = Vector::Zero(1);
      adam_step(theta, Vector::Constant(1, g), m, v, 1, 0.1, cfg);
      return theta[0];
    };
    CHECK(first_update(0.5) == doctest::Approx(first_update(50.0)).epsilon(1e-6));
    CHECK(first_update(0.5) == doctest::Approx(-0.1).epsilon(1e-7));
    CHECK(first_update(-0.5) == doctest::Approx(0.1).epsilon(1e-7));
  }

  SUBCASE("step counter is 1-based") {
    Vector theta = Vector::Zero(1), m = Vector::Zero(1), v = Vector::Zero(1);
    CHECK_THROWS(adam_step(theta, Vector::Constant(1, 1.0), m, v, 0, 0.1, cfg));
  }
}

TEST_CASE("Adam drives simple objectives to their optimum") {
  SUBCASE("quadratic bowl") {
    ShiftedBowl bowl;
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 2000;
    const auto result = infer::adam_run(bowl, Vector::Zero(1), cfg);
    CHECK(std::abs(result.theta[0] - 3.0) <= 1e-3);
    REQUIRE(result.loss_trace.size() == 2000);
    CHECK(result.loss_trace.back() < result.loss_trace.front());
    CHECK(result.loss_trace.back() <= 1e-6);
  }

  SUBCASE("gaussian log density pulls parameters to zero") {
    StdNormalDensity prior(6);
    AdamConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 3000;
    Rng rng(9);
    std::normal_distribution<double> n01(0.0, 1.0);
    Vector init(6);
    for (int i = 0; i < 6; ++i) init[i] = n01(rng);
    const auto result = infer::adam_run(prior, init, cfg);
    CHECK(result.theta.lpNorm<Eigen::Infinity>() <= 1e-3);
  }

  SUBCASE("decay schedule shrinks the realized step") {
    ShiftedBowl bowl;
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 400;
    cfg.schedule = Schedule{Schedule::Kind::kDecay, 0.5, 100};
    const auto slow = infer::adam_run(bowl, Vector::Zero(1), cfg);
    cfg.schedule = Schedule{};
    const auto fast = infer::adam_run(bowl, Vector::Zero(1), cfg);
    CHECK(std::abs(fast.theta[0] - 3.0) < std::abs(slow.theta[0] - 3.0));
  }

  SUBCASE("non-finite objectives abort loudly") {
    GradBlowup bad;
    AdamConfig cfg;
    cfg.epochs = 5;
    CHECK_THROWS_AS(infer::adam_run(bad, Vector::Zero(2), cfg), std::runtime_error);
    cfg.learning_rate = 0.0;
    ShiftedBowl bowl;
    CHECK_THROWS_AS(infer::adam_run(bowl, Vector::Zero(1), cfg), std::invalid_argument);
  }
}

TEST_CASE("one leapfrog step on the harmonic potential matches the closed form") {
  StdNormalDensity kernel(1);
  const double d = 0.3, theta0 = 0.7, r0 = -0.4;
  Vector theta = Vector::Constant(1, theta0);
  Vector r = Vector::Constant(1, r0);
  double logpost = 0.0;
  REQUIRE(infer::leapfrog(kernel, theta, r, d, 1, Vector(), &logpost));

  const double theta1 = theta0 * (1.0 - 0.5 * d * d) + d * r0;
  const double r1 = r0 - 0.5 * d * (theta0 + theta1);
  CHECK(theta[0] == doctest::Approx(theta1).epsilon(1e-15));
  CHECK(r[0] == doctest::Approx(r1).epsilon(1e-15));
  CHECK(logpost == doctest::Approx(-0.5 * theta1 * theta1).epsilon(1e-15));
  CHECK_THROWS(infer::leapfrog(kernel, theta, r, d, 0, Vector(), nullptr));
}

TEST_CASE("leapfrog is reversible under momentum flip") {
  StdNormalDensity kernel(5);
  Rng rng(17);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector theta(5), r(5);
  for (int i = 0; i < 5; ++i) {
    theta[i] = n01(rng);
    r[i] = n01(rng);
  }
  const Vector theta_in = theta, r_in = r;
  REQUIRE(infer::leapfrog(kernel, theta, r, 0.05, 20, Vector(), nullptr));
  r = -r;
  REQUIRE(infer::leapfrog(kernel, theta, r, 0.05, 20, Vector(), nullptr));
  CHECK((theta - theta_in).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((r + r_in).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("leapfrog preserves phase-space volume") {
  StdNormalDensity kernel(2);
  const double d = 0.2;
  const int L = 15;
  auto flow = [&](const Eigen::Vector4d& z) {
    Vector theta = z.head(2), r = z.tail(2);
    REQUIRE(infer::leapfrog(kernel, theta, r, d, L, Vector(), nullptr));
    Eigen::Vector4d out;
    out << theta, r;
    return out;
  };
  Eigen::Vector4d z0;
  z0 << 0.3, -0.8, 1.1, 0.25;
  Eigen::Matrix4d jac;
  const double h = 1e-6;
  for (int c = 0; c < 4; ++c) {
    Eigen::Vector4d zp = z0, zm = z0;
    zp[c] += h;
    zm[c] -= h;
    jac.col(c) = (flow(zp) - flow(zm)) / (2.0 * h);
  }
  CHECK(jac.determinant() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Metropolis rule accepts uphill moves always and downhill at the exact rate") {
  Rng rng(23);
  CHECK(infer::mh_accept(-5.0, -5.0, rng));
  CHECK(infer::mh_accept(-5.0, -4.0, rng));
  CHECK(infer::mh_accept(-5.0, 100.0, rng));

  auto rate = [&](double dh) {
    int acc = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += infer::mh_accept(0.0, dh, rng) ? 1 : 0;
    return static_cast<double>(acc) / n;
  };
  CHECK(rate(-1.0) == doctest::Approx(std::exp(-1.0)).epsilon(0.03));
  CHECK(rate(std::log(0.5)) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("HMC samples the standard normal correctly") {
  StdNormalDensity kernel(1);
  HmcConfig cfg;
  cfg.step_size = 0.5;
  cfg.leapfrog_steps = 8;
  cfg.trajectories = 11000;
  cfg.keep_last = 10000;
  cfg.seed = 2718;

  const Chain chain = infer::hmc_run(kernel, Vector::Zero(1), cfg);
  REQUIRE(chain.status == RunStatus::kSuccess);
  REQUIRE(chain.samples.size() == 10000);
  CHECK(chain.accept_flags.size() == 11000);
  CHECK(chain.hamiltonians.size() == 11000);
  CHECK(chain.accept_rate() > 0.9);

  std::vector<double> xs(chain.samples.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = chain.samples[i][0];
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1.0;
  CHECK(std::abs(mean) <= 0.05);
  CHECK(std::abs(var - 1.0) <= 0.1);

  // Kolmogorov-Smirnov against the exact CDF at the 1% level
  std::sort(xs.begin(), xs.end());
  double dmax = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std_normal_cdf(xs[i]);
    dmax = std::max(dmax, std::abs(f - static_cast<double>(i) / n));
    dmax = std::max(dmax, std::abs(static_cast<double>(i + 1) / n - f));
  }
  CHECK(dmax * std::sqrt(n) < 1.63);
}

TEST_CASE("HMC is deterministic in the seed and explicit unit mass is a no-op") {
  StdNormalDensity kernel(3);
  HmcConfig cfg;
  cfg.step_size = 0.4;
  cfg.leapfrog_steps = 5;
  cfg.trajectories = 50;
  cfg.keep_last = 30;
  cfg.seed = 99;

  Vector init = Vector::Constant(3, 0.2);
  const Chain a = infer::hmc_run(kernel, init, cfg);
  const Chain b = infer::hmc_run(kernel, init, cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
  CHECK(a.accept_flags == b.accept_flags);
  CHECK(a.hamiltonians == b.hamiltonians);

  cfg.mass = Vector::Ones(3);
  const Chain c = infer::hmc_run(kernel, init, cfg);
  REQUIRE(c.status == RunStatus::kSuccess);
  REQUIRE(c.samples.size() == a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == c.samples[i]);

  cfg.seed = 100;
  const Chain d = infer::hmc_run(kernel, init, cfg);
  CHECK(a.samples.back() != d.samples.back());
}

TEST_CASE("HMC failure is total and carries the trajectory index") {
  GradBlowup bad;
  HmcConfig cfg;
  cfg.trajectories = 10;
  cfg.keep_last = 5;
  const Chain chain = infer::hmc_run(bad, Vector::Zero(2), cfg);
  CHECK(chain.status == RunStatus::kFailure);
  CHECK(chain.samples.empty());
  CHECK(chain.failed_trajectory == 0);
  CHECK_FALSE(chain.failure_reason.empty());
  CHECK(chain.accept_rate() == 0.0);

  BadStart worse;
  const Chain chain2 = infer::hmc_run(worse, Vector::Zero(2), cfg);
  CHECK(chain2.status == RunStatus::kFailure);
  CHECK(chain2.failure_reason.find("initial") != std::string::npos);
}

TEST_CASE("HMC validates its configuration") {
  StdNormalDensity kernel(2);
  HmcConfig cfg;
  cfg.trajectories = 5;
  cfg.keep_last = 6;
  CHECK_THROWS(infer::hmc_run(kernel, Vector::Zero(2), cfg));
  cfg.keep_last = 5;
  cfg.step_size = 0.0;
  CHECK_THROWS(infer::hmc_run(kernel, Vector::Zero(2), cfg));
  cfg.step_size = 0.1;
  cfg.mass = Vector::Ones(3);
  CHECK_THROWS(infer::hmc_run(kernel, Vector::Zero(2), cfg));
  cfg.mass = -Vector::Ones(2);
  CHECK_THROWS(infer::hmc_run(kernel, Vector::Zero(2), cfg));

  cfg.mass = Vector();
  cfg.keep_last = 0;
  const Chain chain = infer::hmc_run(kernel, Vector::Zero(2), cfg);
  CHECK(chain.status == RunStatus::kSuccess);
  CHECK(chain.samples.empty());
  CHECK(chain.accept_flags.size() == 5);
}
