#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mbpinn/graph.hpp"
#include "mbpinn/network.hpp"
#include "mbpinn/observations.hpp"
#include "mbpinn/problems.hpp"

namespace mbpinn::post {

// Differentiable unnormalized log density over a flat parameter vector.
// eval() reports non-finite values/gradients by returning false; callers
// decide the failure semantics (HMC turns it into a Failure run, Adam aborts).
class LogDensity {
 public:
  virtual ~LogDensity() = default;
  virtual Eigen::Index dim() const = 0;
  virtual bool eval(const Vector& theta, double& value, Vector& grad) = 0;
  // value only; default falls back to eval()
  virtual bool eval_value(const Vector& theta, double& value);
};

// -|theta|^2 / (2 prior_std^2); normalization constants dropped throughout
// this module (they are constant in theta, so MAP points and HMC acceptance
// ratios are unchanged).
double log_prior(const Vector& theta, double prior_std);

// sum_i -(predict(x_i) - noisy_i)^2 / (2 tau^2). Sets *finite=false instead of
// throwing when predictions go non-finite.
double log_likelihood_field(const data::ObservationSet& obs,
                            const std::function<double(const Vector&)>& predict,
                            bool* finite = nullptr);

// Binds a network to the field it predicts directly (solution or coefficient).
struct FieldNet {
  problems::Field field;
  const nets::Network* net;
};

// The full Bayesian objective for one problem: Gaussian likelihood terms for
// every observation set (solution/coefficient via the bound networks, boundary
// via the solution network's trace, force via the PDE residual operator on the
// solution network's jets) plus the Gaussian prior over all parameters.
//
// The whole likelihood is one prebuilt tape evaluated per call; the prior and
// its gradient are added analytically.
class PosteriorKernel : public LogDensity {
 public:
  PosteriorKernel(const problems::PdeProblem& problem, std::vector<FieldNet> predictors,
                  std::vector<data::ObservationSet> observations, double prior_std);

  Eigen::Index dim() const override { return layout_.total_size(); }
  bool eval(const Vector& theta, double& value, Vector& grad) override;
  bool eval_value(const Vector& theta, double& value) override;

  // [offset, size) of predictor i's parameters inside the combined vector
  std::pair<Eigen::Index, Eigen::Index> segment(std::size_t i) const;
  const ParamLayout& layout() const { return layout_; }
  double prior_std() const { return prior_std_; }

 private:
  void build(const problems::PdeProblem& problem);

  std::vector<FieldNet> predictors_;
  std::vector<data::ObservationSet> observations_;
  double prior_std_;
  ParamLayout layout_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> segments_;
  ad::Graph graph_;
  ad::Var total_ll_;  // invalid when there are no observations
};

double log_posterior_kernel(PosteriorKernel& kernel, const Vector& theta);
double neg_log_posterior_loss(PosteriorKernel& kernel, const Vector& theta);

}  // namespace mbpinn::post
