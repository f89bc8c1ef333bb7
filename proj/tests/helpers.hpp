#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mbpinn/network.hpp"
#include "mbpinn/problems.hpp"
#include "mbpinn/rng.hpp"

namespace testutil {

using mbpinn::Matrix;
using mbpinn::Rng;
using mbpinn::Vector;

inline double fd1(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double fd2(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// |got-want| scaled by max(1, |want|): relative for large values, absolute
// near zero.
inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Small architectures for derivative checks: pipes=0 plain, else that many
// Fourier pipelines.
inline mbpinn::nets::NetworkSpec small_spec(int pipes, Eigen::Index input_dim,
                                            std::vector<Eigen::Index> hidden,
                                            std::vector<double> xi = {}) {
  mbpinn::nets::NetworkSpec spec;
  spec.input_dim = input_dim;
  spec.hidden_widths = std::move(hidden);
  if (pipes == 0) {
    spec.kind = mbpinn::nets::Kind::kPlain;
  } else {
    spec.kind = mbpinn::nets::Kind::kFourier;
    for (int i = 0; i < pipes; ++i) {
      mbpinn::nets::FourierPipelineSpec p;
      p.lambda_std = xi.empty() ? 1.0 + 2.0 * i : xi.at(i);
      spec.pipelines.push_back(p);
    }
  }
  return spec;
}

inline Vector random_point(const mbpinn::problems::Box& box, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    x[i] = box.lo[i] + u(rng) * (box.hi[i] - box.lo[i]);
  }
  return x;
}

}  // namespace testutil
