#pragma once

#include <vector>

#include "mbpinn/graph.hpp"
#include "mbpinn/param_vector.hpp"
#include "mbpinn/rng.hpp"

namespace mbpinn::nets {

enum class Kind { kPlain, kFourier };

// One fixed random-feature embedding: x -> [Lin(x); cos(pi*Lambda*x); sin(pi*Lambda*x)].
// Lambda is drawn once at init (entries ~ N(0, lambda_std^2)) and never trained.
struct FourierPipelineSpec {
  double lambda_std = 1.0;
  Eigen::Index lambda_rows = 0;  // m; 0 means "first hidden width"
  Matrix lambda_matrix;          // m x d, fixed after init_params
};

struct NetworkSpec {
  Kind kind = Kind::kPlain;
  Eigen::Index input_dim = 1;
  std::vector<Eigen::Index> hidden_widths;
  std::vector<FourierPipelineSpec> pipelines;  // Fourier kind only
  Eigen::Index output_dim = 1;
};

void validate(const NetworkSpec& spec);

// Spec plus the derived parameter layout. Lambda matrices are not in the
// layout (non-trainable); everything else (W/b of every layer, the per-pipeline
// Lin maps, and the output layer) is.
struct Network {
  NetworkSpec spec;
  ParamLayout layout;
  std::vector<double> init_std;  // per layout block; 0 => zero-init (biases)
};

Network make_network(NetworkSpec spec);

// Draws Lambda ~ N(0, xi^2) into the spec, weights ~ N(0, 1/fan_in), biases 0.
// Deterministic per rng state.
Vector init_params(Network& net, Rng& rng);

// Straight-line evaluation at a single point.
double forward(const Network& net, const Vector& theta, const Vector& x);

// The embedding alone (length 3m), for tests and inspection.
Vector fourier_features(const Vector& x, const FourierPipelineSpec& pipeline,
                        const Matrix& w_lin, const Vector& b_lin);

// Network value with first and pure-second spatial derivatives per input
// coordinate. Mixed partials are out of scope (no residual operator in this
// artifact needs them).
struct JetValue {
  double value = 0.0;
  Vector d1;
  Vector d2;
  bool finite = true;
};

JetValue eval_with_spatial_derivs(const Network& net, const Vector& theta, const Vector& x);

// Tape nodes evaluating the network on a fixed batch of points X (d x n):
// value and, when requested, the per-coordinate derivative channels, each as
// a 1 x n row. The same leaves can feed several BatchEval builds (one per
// observation set), which is how the posterior shares one parameter vector.
struct BatchEval {
  ad::Var value;
  std::vector<ad::Var> d1;
  std::vector<ad::Var> d2;
};

BatchEval build_batch_eval(ad::Graph& g, const Network& net,
                           const std::vector<ad::Var>& leaves, const Matrix& points,
                           bool with_jets);

}  // namespace mbpinn::nets
