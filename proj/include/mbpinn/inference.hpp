#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbpinn/posterior.hpp"
#include "mbpinn/rng.hpp"

namespace mbpinn::infer {

// Step-size / learning-rate schedule: fixed, or decayed by `factor` every
// `every_n` steps (base * factor^floor(t / every_n)).
struct Schedule {
  enum class Kind { kFixed, kDecay };
  Kind kind = Kind::kFixed;
  double factor = 0.95;
  long every_n = 100;
};

double schedule_step(const Schedule& schedule, double base, long t);

struct HmcConfig {
  double step_size = 1e-3;
  int leapfrog_steps = 500;
  int trajectories = 200;
  int keep_last = 150;
  Vector mass;  // diagonal mass matrix; empty = identity
  Schedule schedule;  // applied across trajectories
  std::uint64_t seed = 0;
};

enum class RunStatus { kSuccess, kFailure };

// HMC output. Failure is a value, not an exception: any non-finite kernel
// value, gradient, or Hamiltonian anywhere in the run poisons the whole chain
// (reported downstream as "---"), carrying the offending trajectory index.
struct Chain {
  std::vector<Vector> samples;  // last keep_last states on success
  std::vector<bool> accept_flags;
  std::vector<double> hamiltonians;
  RunStatus status = RunStatus::kSuccess;
  int failed_trajectory = -1;
  std::string failure_reason;
  double accept_rate() const;
};

// One leapfrog trajectory: half-step momentum, L position/momentum steps, and
// the trailing half-step momentum correction. Returns false (Failure) if any
// intermediate value or gradient is non-finite. On success *final_logpost
// holds log-posterior(theta_out).
bool leapfrog(post::LogDensity& kernel, Vector& theta, Vector& momentum, double step_size,
              int steps, const Vector& inv_mass, double* final_logpost);

// Accept with probability min{1, exp(h_new - h_old)}, H = logpost - kinetic.
bool mh_accept(double h_old, double h_new, Rng& rng);

Chain hmc_run(post::LogDensity& kernel, const Vector& init, const HmcConfig& config);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  long epochs = 20000;
  Schedule schedule;  // applied across epochs
};

// One bias-corrected Adam update, t is the 1-based step count.
void adam_step(Vector& theta, const Vector& grad, Vector& m, Vector& v, long t, double alpha,
               const AdamConfig& config);

struct AdamResult {
  Vector theta;  // final-epoch parameters (the MAP estimate)
  std::vector<double> loss_trace;
};

// Full-batch minimization of -log posterior. Non-finite losses or gradients
// abort with a diagnostic (unlike HMC, this path is expected to always
// deliver a result; a blow-up here is a configuration error).
AdamResult adam_run(post::LogDensity& kernel, const Vector& init, const AdamConfig& config);

}  // namespace mbpinn::infer
