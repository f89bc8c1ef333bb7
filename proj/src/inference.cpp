#include "mbpinn/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace mbpinn::infer {

double schedule_step(const Schedule& schedule, double base, long t) {
  if (t < 0) throw std::invalid_argument("schedule_step: t must be >= 0");
  if (schedule.kind == Schedule::Kind::kFixed) return base;
  if (schedule.every_n <= 0) throw std::invalid_argument("schedule_step: every_n must be positive");
  return base * std::pow(schedule.factor, static_cast<double>(t / schedule.every_n));
}

double Chain::accept_rate() const {
  if (accept_flags.empty()) return 0.0;
  double acc = 0.0;
  for (bool b : accept_flags) acc += b ? 1.0 : 0.0;
  return acc / static_cast<double>(accept_flags.size());
}

namespace {

double kinetic(const Vector& momentum, const Vector& inv_mass) {
  if (inv_mass.size() == 0) return 0.5 * momentum.squaredNorm();
  return 0.5 * momentum.dot(inv_mass.cwiseProduct(momentum));
}

}  // namespace

bool leapfrog(post::LogDensity& kernel, Vector& theta, Vector& momentum, double step_size,
              int steps, const Vector& inv_mass, double* final_logpost) {
  if (steps < 1) throw std::invalid_argument("leapfrog: steps must be >= 1");
  double logpost = 0.0;
  Vector grad(theta.size());
  if (!kernel.eval(theta, logpost, grad)) return false;
  momentum += 0.5 * step_size * grad;
  for (int n = 0; n < steps; ++n) {
    if (inv_mass.size() == 0) {
      theta += step_size * momentum;
    } else {
      theta += step_size * inv_mass.cwiseProduct(momentum);
    }
    if (!kernel.eval(theta, logpost, grad)) return false;
    momentum += step_size * grad;
  }
  momentum -= 0.5 * step_size * grad;
  if (!theta.allFinite() || !momentum.allFinite()) return false;
  if (final_logpost) *final_logpost = logpost;
  return true;
}

bool mh_accept(double h_old, double h_new, Rng& rng) {
  if (h_new >= h_old) return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < std::exp(h_new - h_old);
}

Chain hmc_run(post::LogDensity& kernel, const Vector& init, const HmcConfig& config) {
  if (config.keep_last > config.trajectories || config.keep_last < 0) {
    throw std::invalid_argument("hmc_run: keep_last must be in [0, trajectories]");
  }
  if (config.step_size <= 0) throw std::invalid_argument("hmc_run: step_size must be positive");
  if (config.mass.size() != 0 && config.mass.size() != init.size()) {
    throw std::invalid_argument("hmc_run: mass diagonal size mismatch");
  }

  Vector inv_mass;
  Vector mass_std;
  if (config.mass.size() != 0) {
    if ((config.mass.array() <= 0).any()) {
      throw std::invalid_argument("hmc_run: mass entries must be positive");
    }
    inv_mass = config.mass.cwiseInverse();
    mass_std = config.mass.cwiseSqrt();
  }

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Chain chain;
  chain.samples.reserve(config.keep_last);

  Vector theta = init;
  double logpost = 0.0;
  if (!kernel.eval_value(theta, logpost)) {
    chain.status = RunStatus::kFailure;
    chain.failed_trajectory = 0;
    chain.failure_reason = "non-finite log posterior at the initial state";
    return chain;
  }

  Vector momentum(init.size());
  Vector theta_prop(init.size());
  for (int k = 0; k < config.trajectories; ++k) {
    const double d = schedule_step(config.schedule, config.step_size, k);
    for (Eigen::Index i = 0; i < momentum.size(); ++i) {
      momentum[i] = normal(rng);
      if (mass_std.size() != 0) momentum[i] *= mass_std[i];
    }
    const double h_old = logpost - kinetic(momentum, inv_mass);

    theta_prop = theta;
    double logpost_prop = 0.0;
    if (!leapfrog(kernel, theta_prop, momentum, d, config.leapfrog_steps, inv_mass,
                  &logpost_prop)) {
      chain.status = RunStatus::kFailure;
      chain.failed_trajectory = k;
      chain.failure_reason = "non-finite state or gradient inside leapfrog";
      chain.samples.clear();
      return chain;
    }
    const double h_new = logpost_prop - kinetic(momentum, inv_mass);
    if (!std::isfinite(h_new)) {
      chain.status = RunStatus::kFailure;
      chain.failed_trajectory = k;
      chain.failure_reason = "non-finite Hamiltonian";
      chain.samples.clear();
      return chain;
    }

    const bool accept = mh_accept(h_old, h_new, rng);
    if (accept) {
      theta = theta_prop;
      logpost = logpost_prop;
    }
    chain.accept_flags.push_back(accept);
    chain.hamiltonians.push_back(accept ? h_new : h_old);
    if (k >= config.trajectories - config.keep_last) {
      chain.samples.push_back(theta);
    }
  }
  return chain;
}

void adam_step(Vector& theta, const Vector& grad, Vector& m, Vector& v, long t, double alpha,
               const AdamConfig& config) {
  if (t < 1) throw std::invalid_argument("adam_step: t must be >= 1");
  m = config.beta1 * m + (1.0 - config.beta1) * grad;
  v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  // theta -= alpha * m_hat / (sqrt(v_hat) + eps)
  theta.array() -=
      alpha * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config.eps_hat);
}

AdamResult adam_run(post::LogDensity& kernel, const Vector& init, const AdamConfig& config) {
  if (config.learning_rate <= 0) throw std::invalid_argument("adam_run: learning rate must be positive");
  if (config.beta1 <= 0 || config.beta1 > 1 || config.beta2 <= 0 || config.beta2 > 1) {
    throw std::invalid_argument("adam_run: beta1, beta2 must lie in (0, 1]");
  }
  AdamResult result;
  result.theta = init;
  result.loss_trace.reserve(config.epochs);
  Vector m = Vector::Zero(init.size());
  Vector v = Vector::Zero(init.size());
  Vector grad(init.size());
  for (long e = 0; e < config.epochs; ++e) {
    double logpost = 0.0;
    if (!kernel.eval(result.theta, logpost, grad)) {
      throw std::runtime_error("adam_run: non-finite loss or gradient at epoch " +
                               std::to_string(e));
    }
    result.loss_trace.push_back(-logpost);
    const double alpha = schedule_step(config.schedule, config.learning_rate, e);
    adam_step(result.theta, -grad, m, v, e + 1, alpha, config);
  }
  return result;
}

}  // namespace mbpinn::infer
