#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbpinn/experiment.hpp"
#include "mbpinn/report.hpp"

namespace fs = std::filesystem;
using namespace mbpinn;

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  is >> j;
  return j;
}

bench::ExperimentConfig gen_config(const std::string& problem, double eps, double noise,
                                   std::uint64_t seed) {
  nlohmann::json j{{"problem", problem}, {"epsilon", eps}, {"noise", noise}, {"seed", seed},
                   {"method", "bpinn_hmc"}, {"step_size", 1e-5}};
  return bench::experiment_config_from_json(j);
}

void print_cell(const bench::RunResult& r) {
  std::cout << bench::method_name(r.method) << " @ " << bench::format_double(r.step_size) << ": ";
  if (r.status == infer::RunStatus::kFailure) {
    std::cout << "Failure";
    if (r.failed_trajectory >= 0) std::cout << " (trajectory " << r.failed_trajectory << ")";
    if (!r.failure_reason.empty()) std::cout << " [" << r.failure_reason << "]";
  } else {
    std::cout << "Success, rel_solution=" << bench::format_double(*r.rel_solution);
    if (r.rel_coefficient) {
      std::cout << ", rel_coefficient=" << bench::format_double(*r.rel_coefficient);
    }
    if (bench::is_hmc(r.method)) {
      std::cout << ", accept_rate=" << bench::format_double(r.accept_rate);
    }
  }
  std::cout << " (" << bench::format_double(r.wall_time) << " s)\n";
}

int cmd_gen(const std::string& problem, double eps, double noise, std::uint64_t seed,
            const std::string& out) {
  const bench::ExperimentConfig cfg = gen_config(problem, eps, noise, seed);
  fs::create_directories(out);
  for (const data::ObservationSet& obs : bench::default_observations(cfg)) {
    const fs::path path = fs::path(out) / (std::string(problems::field_name(obs.field)) + ".csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    bench::write_dataset_csv(obs, os);
    const auto db = data::snr_db(obs.clean, obs.noisy - obs.clean);
    std::cout << path.string() << ": " << obs.size() << " points, snr="
              << (db ? bench::format_double(*db) + " dB" : "inf") << '\n';
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out) {
  const bench::ExperimentConfig cfg =
      bench::experiment_config_from_json(load_json(config_path));
  bench::RunResult result = bench::run_experiment(cfg);
  // package the single run as a 1x1 grid so `report` works on its output too
  bench::GridReport report;
  report.config.base = cfg;
  report.config.methods = {cfg.method};
  report.config.steps = {cfg.step_size};
  report.config.master_seed = cfg.seed;
  report.cells.push_back({std::move(result)});
  bench::write_report(report, out);
  print_cell(report.cells[0][0]);
  return 0;
}

int cmd_grid(const std::string& config_path, const std::string& out) {
  const bench::GridConfig cfg = bench::grid_config_from_json(load_json(config_path));
  const bench::GridReport report = bench::run_grid(cfg);
  bench::write_report(report, out);
  for (const auto& row : report.cells) {
    for (const bench::RunResult& cell : row) print_cell(cell);
  }
  return 0;
}

int cmd_report(const std::string& in) {
  const fs::path csv = fs::path(in) / "grid.csv";
  std::ifstream is(csv);
  if (!is) throw std::runtime_error("cannot open " + csv.string());
  const std::string md = bench::render_markdown(bench::parse_grid_csv(is));
  const fs::path out = fs::path(in) / "grid.md";
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open for writing: " + out.string());
  os << md;
  std::cout << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian PINN benchmark runner"};
  app.require_subcommand(1);

  std::string problem = "P1", config_path, out_dir, in_dir;
  double eps = 0.1, noise = 0.01;
  std::uint64_t seed = 0;

  CLI::App* gen = app.add_subcommand("gen", "generate observation datasets as CSV");
  gen->add_option("--problem", problem, "P1..P4")->required();
  gen->add_option("--eps", eps, "scale parameter (P1/P3)");
  gen->add_option("--noise", noise, "observation noise std");
  gen->add_option("--seed", seed, "data seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  CLI::App* grid = app.add_subcommand("grid", "run a method x step-size grid");
  grid->add_option("--config", config_path, "grid config JSON")->required();
  grid->add_option("--out", out_dir, "output directory")->required();

  CLI::App* report = app.add_subcommand("report", "re-render grid.md from grid.csv");
  report->add_option("--in", in_dir, "directory containing grid.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(problem, eps, noise, seed, out_dir);
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (grid->parsed()) return cmd_grid(config_path, out_dir);
    if (report->parsed()) return cmd_report(in_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
