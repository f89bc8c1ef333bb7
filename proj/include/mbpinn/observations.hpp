#pragma once

#include <optional>

#include "mbpinn/problems.hpp"
#include "mbpinn/rng.hpp"

namespace mbpinn::data {

// Noisy point observations of one field. `clean` holds the exact field values
// and `noisy - clean` the recorded noise draws, so SNR and diagnostics can be
// computed without re-deriving anything.
struct ObservationSet {
  problems::Field field = problems::Field::kSolution;
  Matrix points;  // d x n
  Vector clean;
  Vector noisy;
  double noise_level = 0.0;
  double tau = 1.0;  // likelihood std for this field
  Eigen::Index size() const { return clean.size(); }
};

struct EvalGrid {
  Matrix points;  // d x n
  Vector exact;
};

// Standard Latin hypercube: one point per stratum per axis, random
// permutation across axes, uniform in-stratum jitter.
Matrix lhs_sample(Eigen::Index n, const problems::Box& box, Rng& rng);

// 1d: alternating endpoints; 2d: uniform over the perimeter, corner-inclusive.
Matrix boundary_sample(Eigen::Index n, const problems::Box& box, Rng& rng);

// Samples points (LHS interior + optional boundary points), evaluates the
// field's exact closed form, and adds noise_level * N(0,1) per observation.
// Boundary points are only meaningful for the solution and boundary fields.
ObservationSet make_observations(const problems::PdeProblem& problem, problems::Field field,
                                 Eigen::Index n_interior, Eigen::Index n_boundary,
                                 double noise_level, double tau, Rng& rng);

// 10*log10(mean(clean^2)/mean(noise^2)); nullopt flags zero noise power
// (infinite SNR).
std::optional<double> snr_db(const Vector& clean, const Vector& noise);

// Equidistant evaluation grid: `resolution` points in 1d, resolution^2 tensor
// grid in 2d, endpoints included. Exact values of the requested field.
EvalGrid eval_grid(const problems::PdeProblem& problem, Eigen::Index resolution,
                   problems::Field field = problems::Field::kSolution);

}  // namespace mbpinn::data
