#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mbpinn/experiment.hpp"

namespace mbpinn::bench {

// Shortest decimal form that parses back to the same double, so CSV output is
// both readable and exactly round-trippable (and byte-deterministic).
std::string format_double(double v);

// Filename-safe step-size tag: '.' -> 'p', '-' -> 'm' (e.g. 5e-05 -> "5em05").
std::string sanitize_step(double step);

void write_grid_csv(const GridReport& report, std::ostream& os);

// Columns field,x1[,x2],clean,noisy; one file per observation set.
void write_dataset_csv(const data::ObservationSet& obs, std::ostream& os);

// Columns x1[,x2],exact,mean,std.
void write_profile_csv(const data::EvalGrid& grid, const Vector& mean, const Vector& sd,
                       std::ostream& os);

struct GridCsvRow {
  std::string method;
  double step_size = 0.0;
  std::string status;
  std::optional<double> rel_solution;
  std::optional<double> rel_coefficient;
  double wall_time = 0.0;
};

std::vector<GridCsvRow> parse_grid_csv(std::istream& is);

// Methods as rows, step sizes as columns; Failure cells rendered "---",
// inverse-problem cells as "solution / coefficient".
std::string render_markdown(const std::vector<GridCsvRow>& rows);

// Emits grid.csv, grid.md, per-success-cell profile_<method>_<step>.csv
// (plus _coeff profiles on the inverse problem), and snr.csv into out_dir.
void write_report(const GridReport& report, const std::string& out_dir);

}  // namespace mbpinn::bench
