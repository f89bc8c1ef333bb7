#include "mbpinn/observations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mbpinn::data {

using problems::Box;
using problems::Field;
using problems::PdeProblem;

Matrix lhs_sample(Eigen::Index n, const Box& box, Rng& rng) {
  if (n < 1) throw std::invalid_argument("lhs_sample: n must be >= 1");
  const Eigen::Index d = box.dim();
  Matrix pts(d, n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::Index> strata(n);
  for (Eigen::Index axis = 0; axis < d; ++axis) {
    std::iota(strata.begin(), strata.end(), Eigen::Index{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    const double width = (box.hi[axis] - box.lo[axis]) / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      pts(axis, j) = box.lo[axis] + width * (static_cast<double>(strata[j]) + unif(rng));
    }
  }
  return pts;
}

Matrix boundary_sample(Eigen::Index n, const Box& box, Rng& rng) {
  if (n < 1) throw std::invalid_argument("boundary_sample: n must be >= 1");
  const Eigen::Index d = box.dim();
  Matrix pts(d, n);
  if (d == 1) {
    for (Eigen::Index j = 0; j < n; ++j) {
      pts(0, j) = (j % 2 == 0) ? box.lo[0] : box.hi[0];
    }
    return pts;
  }
  if (d != 2) throw std::invalid_argument("boundary_sample: only 1d and 2d domains");
  const double wx = box.hi[0] - box.lo[0];
  const double wy = box.hi[1] - box.lo[1];
  const double perimeter = 2.0 * (wx + wy);
  std::uniform_real_distribution<double> unif(0.0, perimeter);
  for (Eigen::Index j = 0; j < n; ++j) {
    double t = unif(rng);
    if (t < wx) {  // bottom edge
      pts(0, j) = box.lo[0] + t;
      pts(1, j) = box.lo[1];
    } else if (t < wx + wy) {  // right edge
      pts(0, j) = box.hi[0];
      pts(1, j) = box.lo[1] + (t - wx);
    } else if (t < 2.0 * wx + wy) {  // top edge
      pts(0, j) = box.lo[0] + (t - wx - wy);
      pts(1, j) = box.hi[1];
    } else {  // left edge
      pts(0, j) = box.lo[0];
      pts(1, j) = box.lo[1] + (t - 2.0 * wx - wy);
    }
  }
  return pts;
}

ObservationSet make_observations(const PdeProblem& problem, Field field,
                                 Eigen::Index n_interior, Eigen::Index n_boundary,
                                 double noise_level, double tau, Rng& rng) {
  if (noise_level < 0) throw std::invalid_argument("make_observations: negative noise level");
  if (tau <= 0) throw std::invalid_argument("make_observations: tau must be positive");
  if (n_boundary > 0 && field != Field::kSolution && field != Field::kBoundary) {
    throw std::invalid_argument("make_observations: boundary points make no sense for this field");
  }
  if (field == Field::kBoundary && n_interior > 0) {
    throw std::invalid_argument("make_observations: boundary field takes boundary points only");
  }
  const Eigen::Index n = n_interior + n_boundary;
  if (n < 1) throw std::invalid_argument("make_observations: empty set");

  ObservationSet obs;
  obs.field = field;
  obs.noise_level = noise_level;
  obs.tau = tau;
  obs.points.resize(problem.domain().dim(), n);
  if (n_interior > 0) {
    obs.points.leftCols(n_interior) = lhs_sample(n_interior, problem.domain(), rng);
  }
  if (n_boundary > 0) {
    obs.points.rightCols(n_boundary) = boundary_sample(n_boundary, problem.domain(), rng);
  }

  obs.clean.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector x = obs.points.col(j);
    switch (field) {
      case Field::kSolution:
        obs.clean[j] = problem.exact_solution(x);
        break;
      case Field::kForce:
        obs.clean[j] = problem.force(x);
        break;
      case Field::kBoundary:
        obs.clean[j] = problem.boundary_value(x);
        break;
      case Field::kCoefficient:
        obs.clean[j] = problem.coefficient(x);
        break;
    }
  }

  obs.noisy = obs.clean;
  if (noise_level > 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < n; ++j) obs.noisy[j] += noise_level * normal(rng);
  }
  return obs;
}

std::optional<double> snr_db(const Vector& clean, const Vector& noise) {
  if (clean.size() != noise.size() || clean.size() == 0) {
    throw std::invalid_argument("snr_db: size mismatch");
  }
  const double ps = clean.squaredNorm() / static_cast<double>(clean.size());
  const double pn = noise.squaredNorm() / static_cast<double>(noise.size());
  if (pn == 0.0) return std::nullopt;
  return 10.0 * std::log10(ps / pn);
}

EvalGrid eval_grid(const PdeProblem& problem, Eigen::Index resolution, Field field) {
  if (resolution < 2) throw std::invalid_argument("eval_grid: resolution must be >= 2");
  const Box& box = problem.domain();
  const Eigen::Index d = box.dim();
  EvalGrid grid;
  if (d == 1) {
    grid.points.resize(1, resolution);
    for (Eigen::Index i = 0; i < resolution; ++i) {
      grid.points(0, i) =
          box.lo[0] + (box.hi[0] - box.lo[0]) * static_cast<double>(i) /
                          static_cast<double>(resolution - 1);
    }
  } else {
    grid.points.resize(2, resolution * resolution);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < resolution; ++i) {
      const double x1 = box.lo[0] + (box.hi[0] - box.lo[0]) * static_cast<double>(i) /
                                        static_cast<double>(resolution - 1);
      for (Eigen::Index j = 0; j < resolution; ++j) {
        grid.points(0, at) = x1;
        grid.points(1, at) = box.lo[1] + (box.hi[1] - box.lo[1]) * static_cast<double>(j) /
                                             static_cast<double>(resolution - 1);
        ++at;
      }
    }
  }
  grid.exact.resize(grid.points.cols());
  for (Eigen::Index j = 0; j < grid.points.cols(); ++j) {
    const Vector x = grid.points.col(j);
    grid.exact[j] = (field == Field::kCoefficient) ? problem.coefficient(x)
                                                   : problem.exact_solution(x);
  }
  return grid;
}

}  // namespace mbpinn::data
