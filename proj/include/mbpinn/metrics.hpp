#pragma once

#include <utility>
#include <vector>

#include "mbpinn/network.hpp"
#include "mbpinn/observations.hpp"

namespace mbpinn::bench {

// Pointwise absolute error |pred - exact|.
Vector abse(const Vector& pred, const Vector& exact);

// Relative L2 error sqrt(sum |pred-exact|^2 / sum |exact|^2).
double rel(const Vector& pred, const Vector& exact);

// Pointwise mean and population standard deviation of net(theta_s, x) over
// the given parameter samples, evaluated on the grid. `offset` selects the
// network's segment inside each (possibly combined) sample vector.
std::pair<Vector, Vector> posterior_predict(const std::vector<Vector>& samples,
                                            const nets::Network& net, const data::EvalGrid& grid,
                                            Eigen::Index offset = 0);

}  // namespace mbpinn::bench
