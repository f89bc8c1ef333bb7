#include "mbpinn/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "mbpinn/graph.hpp"

namespace mbpinn::bench {

Vector abse(const Vector& pred, const Vector& exact) {
  if (pred.size() != exact.size()) throw std::invalid_argument("abse: size mismatch");
  return (pred - exact).cwiseAbs();
}

double rel(const Vector& pred, const Vector& exact) {
  if (pred.size() != exact.size()) throw std::invalid_argument("rel: size mismatch");
  const double den = exact.squaredNorm();
  if (den == 0.0) throw std::invalid_argument("rel: exact values are identically zero");
  return std::sqrt((pred - exact).squaredNorm() / den);
}

std::pair<Vector, Vector> posterior_predict(const std::vector<Vector>& samples,
                                            const nets::Network& net, const data::EvalGrid& grid,
                                            Eigen::Index offset) {
  if (samples.empty()) throw std::invalid_argument("posterior_predict: no samples");
  const Eigen::Index n = grid.points.cols();
  ad::Graph g;
  std::vector<ad::Var> leaves = ad::make_leaves(g, net.layout);
  nets::BatchEval eval = nets::build_batch_eval(g, net, leaves, grid.points, /*with_jets=*/false);

  Vector acc = Vector::Zero(n);
  Vector acc2 = Vector::Zero(n);
  for (const Vector& s : samples) {
    if (s.size() < offset + net.layout.total_size()) {
      throw std::invalid_argument("posterior_predict: sample too short for segment");
    }
    g.set_params(s.segment(offset, net.layout.total_size()));
    g.forward();
    const Matrix& row = g.value(eval.value);
    acc += row.row(0).transpose();
    acc2 += row.row(0).transpose().cwiseAbs2();
  }
  const double count = static_cast<double>(samples.size());
  Vector mean = acc / count;
  Vector var = (acc2 / count - mean.cwiseAbs2()).cwiseMax(0.0);
  return {std::move(mean), var.cwiseSqrt()};
}

}  // namespace mbpinn::bench
