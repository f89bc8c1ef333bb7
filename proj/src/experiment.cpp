#include "mbpinn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

#include "mbpinn/posterior.hpp"

namespace mbpinn::bench {

using problems::Field;
using problems::PdeProblem;
using problems::ProblemId;

Method parse_method(const std::string& name) {
  if (name == "bpinn_hmc") return Method::kBpinnHmc;
  if (name == "bpinn_sgd") return Method::kBpinnSgd;
  if (name == "ff_mbpinn_hmc") return Method::kFfHmc;
  if (name == "ff_mbpinn_sgd") return Method::kFfSgd;
  if (name == "2ff_mbpinn_hmc") return Method::k2ffHmc;
  if (name == "2ff_mbpinn_sgd") return Method::k2ffSgd;
  throw std::invalid_argument("unknown method '" + name + "'");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::kBpinnHmc: return "bpinn_hmc";
    case Method::kBpinnSgd: return "bpinn_sgd";
    case Method::kFfHmc: return "ff_mbpinn_hmc";
    case Method::kFfSgd: return "ff_mbpinn_sgd";
    case Method::k2ffHmc: return "2ff_mbpinn_hmc";
    case Method::k2ffSgd: return "2ff_mbpinn_sgd";
  }
  return "?";
}

bool is_hmc(Method m) {
  return m == Method::kBpinnHmc || m == Method::kFfHmc || m == Method::k2ffHmc;
}

int pipeline_count(Method m) {
  switch (m) {
    case Method::kBpinnHmc:
    case Method::kBpinnSgd: return 0;
    case Method::kFfHmc:
    case Method::kFfSgd: return 1;
    case Method::k2ffHmc:
    case Method::k2ffSgd: return 2;
  }
  return 0;
}

namespace {

// Benchmark protocol defaults per problem.
struct ProblemDefaults {
  std::vector<Eigen::Index> hidden;
  ObsCounts obs;
  Eigen::Index grid_resolution;
  std::vector<double> xi_solution_1ff, xi_solution_2ff;
  std::vector<double> xi_coefficient_1ff, xi_coefficient_2ff;
};

ProblemDefaults defaults_for(ProblemId id) {
  ProblemDefaults d;
  switch (id) {
    case ProblemId::kMultiscale1d:
      d.hidden = {30, 30};
      d.obs = {98, 2, 0, 100, 0};
      d.grid_resolution = 1000;
      d.xi_solution_1ff = {5.0};
      d.xi_solution_2ff = {1.0, 5.0};
      break;
    case ProblemId::kNonlinearPoisson1d:
      d.hidden = {30, 30};
      d.obs = {48, 2, 0, 50, 25};
      d.grid_resolution = 1000;
      d.xi_solution_1ff = {5.0};
      d.xi_solution_2ff = {1.0, 5.0};
      d.xi_coefficient_1ff = {0.5};
      d.xi_coefficient_2ff = {0.1, 0.5};
      break;
    case ProblemId::kMultiscale2d:
      d.hidden = {40, 40};
      d.obs = {400, 0, 100, 500, 0};
      d.grid_resolution = 100;
      d.xi_solution_1ff = {5.0};
      d.xi_solution_2ff = {1.0, 5.0};
      break;
    case ProblemId::kPoisson2d:
      d.hidden = {40, 40};
      d.obs = {700, 0, 100, 800, 0};
      d.grid_resolution = 100;
      d.xi_solution_1ff = {1.0};
      d.xi_solution_2ff = {0.2, 1.0};
      break;
  }
  return d;
}

struct Resolved {
  PdeProblem problem;
  std::vector<Eigen::Index> hidden;
  ObsCounts obs;
  Eigen::Index grid_resolution;
  std::vector<double> xi_solution, xi_coefficient;
  int trajectories, keep_last;
  long epochs;
};

Resolved resolve(const ExperimentConfig& c) {
  Resolved r{PdeProblem::make(c.problem, c.epsilon), {}, {}, 0, {}, {},
             c.trajectories, c.keep_last, c.epochs};
  const ProblemDefaults d = defaults_for(c.problem);
  r.hidden = c.hidden.empty() ? d.hidden : c.hidden;
  r.obs = c.obs;
  if (r.obs.solution_interior < 0) r.obs.solution_interior = d.obs.solution_interior;
  if (r.obs.solution_boundary < 0) r.obs.solution_boundary = d.obs.solution_boundary;
  if (r.obs.boundary < 0) r.obs.boundary = d.obs.boundary;
  if (r.obs.force < 0) r.obs.force = d.obs.force;
  if (r.obs.coefficient < 0) r.obs.coefficient = d.obs.coefficient;
  r.grid_resolution = c.grid_resolution > 0 ? c.grid_resolution : d.grid_resolution;

  const int n_pipes = pipeline_count(c.method);
  if (n_pipes > 0) {
    r.xi_solution = !c.xi_solution.empty()
                        ? c.xi_solution
                        : (n_pipes == 1 ? d.xi_solution_1ff : d.xi_solution_2ff);
    if (static_cast<int>(r.xi_solution.size()) != n_pipes) {
      throw std::invalid_argument("config: xi_solution must list one std per pipeline");
    }
    if (r.problem.has_coefficient_field()) {
      r.xi_coefficient = !c.xi_coefficient.empty()
                             ? c.xi_coefficient
                             : (n_pipes == 1 ? d.xi_coefficient_1ff : d.xi_coefficient_2ff);
      if (static_cast<int>(r.xi_coefficient.size()) != n_pipes) {
        throw std::invalid_argument("config: xi_coefficient must list one std per pipeline");
      }
    }
  }

  if (c.desk_scale) {
    r.epochs = std::min(r.epochs, 5000L);
    r.trajectories = std::min(r.trajectories, 100);
    r.keep_last = std::min(r.keep_last, 75);
    if (r.problem.domain().dim() == 2) {
      r.obs.solution_interior = std::min<Eigen::Index>(r.obs.solution_interior, 400);
      r.obs.boundary = std::min<Eigen::Index>(r.obs.boundary, 100);
      r.obs.force = std::min<Eigen::Index>(r.obs.force, 500);
    }
  }
  return r;
}

double tau_for(std::optional<double> override_tau, double noise) {
  if (override_tau) return *override_tau;
  // known-noise setting; noiseless data still needs a positive likelihood std
  return noise > 0 ? noise : 1.0;
}

nets::NetworkSpec make_spec(Eigen::Index input_dim, const std::vector<Eigen::Index>& hidden,
                            const std::vector<double>& xi) {
  nets::NetworkSpec spec;
  spec.input_dim = input_dim;
  spec.hidden_widths = hidden;
  if (xi.empty()) {
    spec.kind = nets::Kind::kPlain;
  } else {
    spec.kind = nets::Kind::kFourier;
    for (double s : xi) {
      nets::FourierPipelineSpec p;
      p.lambda_std = s;
      spec.pipelines.push_back(std::move(p));
    }
  }
  return spec;
}

}  // namespace

std::vector<data::ObservationSet> default_observations(const ExperimentConfig& config) {
  const Resolved r = resolve(config);
  Rng rng(derive_seed(config.seed, "data"));
  std::vector<data::ObservationSet> sets;
  // fixed generation order: solution, boundary, force, coefficient
  sets.push_back(data::make_observations(r.problem, Field::kSolution, r.obs.solution_interior,
                                         r.obs.solution_boundary, config.noise,
                                         tau_for(config.tau_solution, config.noise), rng));
  if (r.problem.separate_boundary_set() && r.obs.boundary > 0) {
    sets.push_back(data::make_observations(r.problem, Field::kBoundary, 0, r.obs.boundary,
                                           config.noise,
                                           tau_for(config.tau_boundary, config.noise), rng));
  }
  sets.push_back(data::make_observations(r.problem, Field::kForce, r.obs.force, 0, config.noise,
                                         tau_for(config.tau_force, config.noise), rng));
  if (r.problem.has_coefficient_field() && r.obs.coefficient > 0) {
    sets.push_back(data::make_observations(r.problem, Field::kCoefficient, r.obs.coefficient, 0,
                                           config.noise,
                                           tau_for(config.tau_coefficient, config.noise), rng));
  }
  return sets;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const Resolved r = resolve(config);
  RunResult result;
  result.method = config.method;
  result.step_size = config.step_size;

  std::vector<data::ObservationSet> observations = default_observations(config);
  for (const data::ObservationSet& obs : observations) {
    result.snr.emplace_back(problems::field_name(obs.field),
                            data::snr_db(obs.clean, obs.noisy - obs.clean));
  }

  nets::Network u_net =
      nets::make_network(make_spec(r.problem.domain().dim(), r.hidden, r.xi_solution));
  std::optional<nets::Network> k_net;
  Rng init_rng(derive_seed(config.seed, "init"));
  Vector u_theta = nets::init_params(u_net, init_rng);
  std::vector<post::FieldNet> predictors{{Field::kSolution, &u_net}};
  Vector init = u_theta;
  if (r.problem.has_coefficient_field()) {
    k_net = nets::make_network(make_spec(r.problem.domain().dim(), r.hidden, r.xi_coefficient));
    Vector k_theta = nets::init_params(*k_net, init_rng);
    predictors.push_back({Field::kCoefficient, &*k_net});
    init.resize(u_theta.size() + k_theta.size());
    init << u_theta, k_theta;
  }

  post::PosteriorKernel kernel(r.problem, predictors, observations, config.prior_std);

  std::vector<Vector> samples;
  const auto t0 = std::chrono::steady_clock::now();
  if (is_hmc(config.method)) {
    infer::HmcConfig hc;
    hc.step_size = config.step_size;
    hc.leapfrog_steps = config.leapfrog_steps;
    hc.trajectories = r.trajectories;
    hc.keep_last = r.keep_last;
    hc.schedule = config.schedule;
    hc.seed = derive_seed(config.seed, "hmc");
    infer::Chain chain = infer::hmc_run(kernel, init, hc);
    result.accept_rate = chain.accept_rate();
    if (chain.status == infer::RunStatus::kFailure) {
      result.status = infer::RunStatus::kFailure;
      result.failed_trajectory = chain.failed_trajectory;
      result.failure_reason = chain.failure_reason;
      result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return result;
    }
    samples = std::move(chain.samples);
  } else {
    infer::AdamConfig ac;
    ac.learning_rate = config.step_size;
    ac.epochs = r.epochs;
    ac.schedule = config.schedule;
    infer::AdamResult adam = infer::adam_run(kernel, init, ac);
    samples.push_back(std::move(adam.theta));
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  result.grid = data::eval_grid(r.problem, r.grid_resolution, Field::kSolution);
  auto [mean, sd] = posterior_predict(samples, u_net, result.grid, kernel.segment(0).first);
  result.mean = std::move(mean);
  result.std = std::move(sd);
  result.rel_solution = rel(result.mean, result.grid.exact);
  result.abse_max = abse(result.mean, result.grid.exact).maxCoeff();

  if (k_net) {
    result.k_grid = data::eval_grid(r.problem, r.grid_resolution, Field::kCoefficient);
    auto [km, ks] = posterior_predict(samples, *k_net, result.k_grid, kernel.segment(1).first);
    result.k_mean = std::move(km);
    result.k_std = std::move(ks);
    result.rel_coefficient = rel(result.k_mean, result.k_grid.exact);
  }
  return result;
}

std::uint64_t cell_seed(std::uint64_t master_seed, Method m, double step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s/%.12g", method_name(m), step);
  return derive_seed(master_seed, buf);
}

GridReport run_grid(const GridConfig& config) {
  GridReport report;
  report.config = config;
  report.cells.resize(config.methods.size());
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    for (double step : config.steps) {
      ExperimentConfig cell = config.base;
      cell.method = config.methods[mi];
      cell.step_size = step;
      cell.seed = cell_seed(config.master_seed, cell.method, step);
      try {
        report.cells[mi].push_back(run_experiment(cell));
      } catch (const std::runtime_error& e) {
        // an aborted SGD run (non-finite loss) is recorded, not fatal to the grid
        RunResult failed;
        failed.method = cell.method;
        failed.step_size = step;
        failed.status = infer::RunStatus::kFailure;
        failed.failure_reason = e.what();
        report.cells[mi].push_back(std::move(failed));
      }
    }
  }
  return report;
}

namespace {

problems::ProblemId problem_from_string(const std::string& s) {
  if (s == "P1") return ProblemId::kMultiscale1d;
  if (s == "P2") return ProblemId::kNonlinearPoisson1d;
  if (s == "P3") return ProblemId::kMultiscale2d;
  if (s == "P4") return ProblemId::kPoisson2d;
  throw std::invalid_argument("config: unknown problem '" + s + "' (use P1..P4)");
}

infer::Schedule schedule_from_json(const nlohmann::json& j) {
  infer::Schedule s;
  const std::string kind = j.value("kind", "fixed");
  if (kind == "fixed") {
    s.kind = infer::Schedule::Kind::kFixed;
  } else if (kind == "decay") {
    s.kind = infer::Schedule::Kind::kDecay;
    s.factor = j.value("factor", 0.95);
    s.every_n = j.value("every_n", 100L);
  } else {
    throw std::invalid_argument("config: schedule kind must be 'fixed' or 'decay'");
  }
  return s;
}

void fill_common(ExperimentConfig& c, const nlohmann::json& j) {
  if (j.contains("problem")) c.problem = problem_from_string(j.at("problem").get<std::string>());
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("noise")) c.noise = j.at("noise").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("trajectories")) c.trajectories = j.at("trajectories").get<int>();
  if (j.contains("leapfrog_steps")) c.leapfrog_steps = j.at("leapfrog_steps").get<int>();
  if (j.contains("keep_last")) c.keep_last = j.at("keep_last").get<int>();
  if (j.contains("epochs")) c.epochs = j.at("epochs").get<long>();
  if (j.contains("schedule")) c.schedule = schedule_from_json(j.at("schedule"));
  if (j.contains("prior_std")) c.prior_std = j.at("prior_std").get<double>();
  if (j.contains("tau")) {
    const nlohmann::json& t = j.at("tau");
    if (t.contains("solution")) c.tau_solution = t.at("solution").get<double>();
    if (t.contains("force")) c.tau_force = t.at("force").get<double>();
    if (t.contains("boundary")) c.tau_boundary = t.at("boundary").get<double>();
    if (t.contains("coefficient")) c.tau_coefficient = t.at("coefficient").get<double>();
  }
  if (j.contains("obs")) {
    const nlohmann::json& o = j.at("obs");
    if (o.contains("solution_interior")) c.obs.solution_interior = o.at("solution_interior").get<Eigen::Index>();
    if (o.contains("solution_boundary")) c.obs.solution_boundary = o.at("solution_boundary").get<Eigen::Index>();
    if (o.contains("boundary")) c.obs.boundary = o.at("boundary").get<Eigen::Index>();
    if (o.contains("force")) c.obs.force = o.at("force").get<Eigen::Index>();
    if (o.contains("coefficient")) c.obs.coefficient = o.at("coefficient").get<Eigen::Index>();
  }
  if (j.contains("hidden")) {
    c.hidden.clear();
    for (const auto& w : j.at("hidden")) c.hidden.push_back(w.get<Eigen::Index>());
  }
  if (j.contains("xi_solution")) {
    c.xi_solution.clear();
    for (const auto& s : j.at("xi_solution")) c.xi_solution.push_back(s.get<double>());
  }
  if (j.contains("xi_coefficient")) {
    c.xi_coefficient.clear();
    for (const auto& s : j.at("xi_coefficient")) c.xi_coefficient.push_back(s.get<double>());
  }
  if (j.contains("grid_resolution")) c.grid_resolution = j.at("grid_resolution").get<Eigen::Index>();
  if (j.contains("desk_scale")) c.desk_scale = j.at("desk_scale").get<bool>();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  fill_common(c, j);
  c.method = parse_method(j.at("method").get<std::string>());
  if (j.contains("step_size")) {
    c.step_size = j.at("step_size").get<double>();
  } else if (j.contains("lr")) {
    c.step_size = j.at("lr").get<double>();
  } else {
    throw std::invalid_argument("config: missing step_size (or lr)");
  }
  return c;
}

GridConfig grid_config_from_json(const nlohmann::json& j) {
  GridConfig g;
  fill_common(g.base, j);
  if (!j.contains("methods") || !j.contains("step_sizes")) {
    throw std::invalid_argument("config: grid needs 'methods' and 'step_sizes'");
  }
  for (const auto& m : j.at("methods")) g.methods.push_back(parse_method(m.get<std::string>()));
  for (const auto& s : j.at("step_sizes")) g.steps.push_back(s.get<double>());
  if (g.methods.empty() || g.steps.empty()) {
    throw std::invalid_argument("config: grid methods/step_sizes must be non-empty");
  }
  g.master_seed = j.value("master_seed", std::uint64_t{0});
  return g;
}

}  // namespace mbpinn::bench
