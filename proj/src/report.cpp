#include "mbpinn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mbpinn::bench {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, end);
}

std::string sanitize_step(double step) {
  std::string s = format_double(step);
  for (char& c : s) {
    if (c == '.') c = 'p';
    else if (c == '-') c = 'm';
    else if (c == '+') c = 'q';
  }
  return s;
}

namespace {

const char* status_name(infer::RunStatus s) {
  return s == infer::RunStatus::kSuccess ? "Success" : "Failure";
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : "---";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(std::string("grid.csv: bad ") + what + " '" + s + "'");
  }
  return v;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  return os;
}

}  // namespace

void write_grid_csv(const GridReport& report, std::ostream& os) {
  os << "method,step_size,status,rel_solution,rel_coefficient,wall_time\n";
  for (const auto& row : report.cells) {
    for (const RunResult& cell : row) {
      os << method_name(cell.method) << ',' << format_double(cell.step_size) << ','
         << status_name(cell.status) << ',' << opt_field(cell.rel_solution) << ','
         << opt_field(cell.rel_coefficient) << ',' << format_double(cell.wall_time) << '\n';
    }
  }
}

void write_dataset_csv(const data::ObservationSet& obs, std::ostream& os) {
  const Eigen::Index d = obs.points.rows();
  os << "field," << (d == 1 ? "x1" : "x1,x2") << ",clean,noisy\n";
  const char* name = problems::field_name(obs.field);
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    os << name;
    for (Eigen::Index k = 0; k < d; ++k) os << ',' << format_double(obs.points(k, i));
    os << ',' << format_double(obs.clean[i]) << ',' << format_double(obs.noisy[i]) << '\n';
  }
}

void write_profile_csv(const data::EvalGrid& grid, const Vector& mean, const Vector& sd,
                       std::ostream& os) {
  const Eigen::Index d = grid.points.rows();
  os << (d == 1 ? "x1" : "x1,x2") << ",exact,mean,std\n";
  for (Eigen::Index i = 0; i < grid.exact.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) os << (k ? "," : "") << format_double(grid.points(k, i));
    os << ',' << format_double(grid.exact[i]) << ',' << format_double(mean[i]) << ','
       << format_double(sd[i]) << '\n';
  }
}

std::vector<GridCsvRow> parse_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("grid.csv: empty file");
  if (split_csv_line(line) !=
      std::vector<std::string>{"method", "step_size", "status", "rel_solution",
                               "rel_coefficient", "wall_time"}) {
    throw std::runtime_error("grid.csv: unexpected header '" + line + "'");
  }
  std::vector<GridCsvRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("grid.csv: bad row '" + line + "'");
    GridCsvRow r;
    r.method = f[0];
    r.step_size = parse_double(f[1], "step_size");
    r.status = f[2];
    if (r.status != "Success" && r.status != "Failure") {
      throw std::runtime_error("grid.csv: bad status '" + r.status + "'");
    }
    if (f[3] != "---") r.rel_solution = parse_double(f[3], "rel_solution");
    if (f[4] != "---") r.rel_coefficient = parse_double(f[4], "rel_coefficient");
    r.wall_time = parse_double(f[5], "wall_time");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_markdown(const std::vector<GridCsvRow>& rows) {
  // preserve first-appearance order of methods and steps
  std::vector<std::string> methods;
  std::vector<double> steps;
  std::map<std::pair<std::string, double>, const GridCsvRow*> by_cell;
  for (const GridCsvRow& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    if (std::find(steps.begin(), steps.end(), r.step_size) == steps.end()) {
      steps.push_back(r.step_size);
    }
    by_cell[{r.method, r.step_size}] = &r;
  }

  std::ostringstream md;
  md << "| method / step size (lr) |";
  for (double s : steps) md << ' ' << format_double(s) << " |";
  md << '\n' << "| --- |";
  for (std::size_t i = 0; i < steps.size(); ++i) md << " --- |";
  md << '\n';
  char buf[64];
  for (const std::string& m : methods) {
    md << "| " << m << " |";
    for (double s : steps) {
      const auto it = by_cell.find({m, s});
      if (it == by_cell.end()) {
        md << "  |";
        continue;
      }
      const GridCsvRow& r = *it->second;
      if (!r.rel_solution) {
        md << " --- |";
      } else if (r.rel_coefficient) {
        std::snprintf(buf, sizeof(buf), " %.4f / %.4f |", *r.rel_solution, *r.rel_coefficient);
        md << buf;
      } else {
        std::snprintf(buf, sizeof(buf), " %.4f |", *r.rel_solution);
        md << buf;
      }
    }
    md << '\n';
  }
  return md.str();
}

void write_report(const GridReport& report, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());

  {
    std::ofstream os = open_out(dir / "grid.csv");
    write_grid_csv(report, os);
  }
  {
    std::ostringstream csv;
    write_grid_csv(report, csv);
    std::istringstream back(csv.str());
    std::ofstream os = open_out(dir / "grid.md");
    os << render_markdown(parse_grid_csv(back));
  }
  {
    std::ofstream os = open_out(dir / "snr.csv");
    os << "method,step_size,field,snr_db\n";
    for (const auto& row : report.cells) {
      for (const RunResult& cell : row) {
        for (const auto& [field, db] : cell.snr) {
          os << method_name(cell.method) << ',' << format_double(cell.step_size) << ',' << field
             << ',' << (db ? format_double(*db) : "inf") << '\n';
        }
      }
    }
  }
  for (const auto& row : report.cells) {
    for (const RunResult& cell : row) {
      if (cell.status != infer::RunStatus::kSuccess) continue;
      const std::string tag =
          std::string(method_name(cell.method)) + "_" + sanitize_step(cell.step_size);
      {
        std::ofstream os = open_out(dir / ("profile_" + tag + ".csv"));
        write_profile_csv(cell.grid, cell.mean, cell.std, os);
      }
      if (cell.k_mean.size() > 0) {
        std::ofstream os = open_out(dir / ("profile_" + tag + "_coeff.csv"));
        write_profile_csv(cell.k_grid, cell.k_mean, cell.k_std, os);
      }
    }
  }
}

}  // namespace mbpinn::bench
