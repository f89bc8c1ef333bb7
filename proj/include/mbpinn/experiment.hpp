#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbpinn/inference.hpp"
#include "mbpinn/metrics.hpp"
#include "mbpinn/observations.hpp"
#include "mbpinn/problems.hpp"

#include <json.hpp>

namespace mbpinn::bench {

// The six benchmark methods: solver architecture x estimator.
enum class Method { kBpinnHmc, kBpinnSgd, kFfHmc, kFfSgd, k2ffHmc, k2ffSgd };

Method parse_method(const std::string& name);
const char* method_name(Method m);
bool is_hmc(Method m);
int pipeline_count(Method m);  // 0 = plain network

// Observation counts; negative values mean "use the problem's benchmark
// protocol default".
struct ObsCounts {
  Eigen::Index solution_interior = -1;
  Eigen::Index solution_boundary = -1;
  Eigen::Index boundary = -1;  // separate boundary set (2d problems)
  Eigen::Index force = -1;
  Eigen::Index coefficient = -1;  // inverse problem only
};

struct ExperimentConfig {
  problems::ProblemId problem = problems::ProblemId::kMultiscale1d;
  double epsilon = 0.1;
  double noise = 0.01;
  std::uint64_t seed = 0;
  Method method = Method::kBpinnHmc;
  double step_size = 1e-3;  // HMC step size / Adam learning rate

  int trajectories = 200;
  int leapfrog_steps = 500;
  int keep_last = 150;
  long epochs = 20000;
  infer::Schedule schedule;

  double prior_std = 1.0;
  std::optional<double> tau_solution, tau_force, tau_boundary, tau_coefficient;
  ObsCounts obs;
  std::vector<Eigen::Index> hidden;       // empty = problem default
  std::vector<double> xi_solution;        // pipeline stds; empty = default
  std::vector<double> xi_coefficient;
  Eigen::Index grid_resolution = 0;       // 0 = 1000 (1d) / 100 (2d)
  bool desk_scale = false;                // cap epochs/trajectories/2d counts
};

struct RunResult {
  Method method = Method::kBpinnHmc;
  double step_size = 0.0;
  infer::RunStatus status = infer::RunStatus::kSuccess;
  int failed_trajectory = -1;
  std::string failure_reason;
  std::optional<double> rel_solution;
  std::optional<double> rel_coefficient;
  double abse_max = 0.0;
  double accept_rate = 0.0;  // HMC only
  std::vector<std::pair<std::string, std::optional<double>>> snr;  // field -> dB
  double wall_time = 0.0;

  // prediction profiles for plotting (success only)
  data::EvalGrid grid;
  Vector mean, std;
  data::EvalGrid k_grid;  // P2 coefficient
  Vector k_mean, k_std;
};

// The observation sets the benchmark protocol prescribes for this config,
// in a fixed generation order (deterministic per seed).
std::vector<data::ObservationSet> default_observations(const ExperimentConfig& config);

// data -> networks -> estimator -> prediction -> metrics.
RunResult run_experiment(const ExperimentConfig& config);

struct GridConfig {
  ExperimentConfig base;  // seed ignored; per-cell seeds derive from master_seed
  std::vector<Method> methods;
  std::vector<double> steps;
  std::uint64_t master_seed = 0;
};

struct GridReport {
  GridConfig config;
  std::vector<std::vector<RunResult>> cells;  // [method][step]
};

// Runs every (method, step) cell with an independent derived seed. A cell's
// HMC Failure (or an aborted SGD run) is recorded and does not stop the grid.
GridReport run_grid(const GridConfig& config);

std::uint64_t cell_seed(std::uint64_t master_seed, Method m, double step);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
GridConfig grid_config_from_json(const nlohmann::json& j);

}  // namespace mbpinn::bench
