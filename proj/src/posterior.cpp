#include "mbpinn/posterior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mbpinn::post {

using problems::Field;
using problems::PdeProblem;
using problems::ProblemId;

bool LogDensity::eval_value(const Vector& theta, double& value) {
  Vector scratch;
  return eval(theta, value, scratch);
}

double log_prior(const Vector& theta, double prior_std) {
  if (prior_std <= 0) throw std::invalid_argument("posterior: prior_std must be positive");
  return -theta.squaredNorm() / (2.0 * prior_std * prior_std);
}

double log_likelihood_field(const data::ObservationSet& obs,
                            const std::function<double(const Vector&)>& predict,
                            bool* finite) {
  if (obs.tau <= 0) throw std::invalid_argument("posterior: observation tau must be positive");
  double acc = 0.0;
  bool ok = true;
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    const double p = predict(obs.points.col(i));
    if (!std::isfinite(p)) ok = false;
    const double r = p - obs.noisy[i];
    acc -= r * r / (2.0 * obs.tau * obs.tau);
  }
  if (finite) *finite = ok && std::isfinite(acc);
  return acc;
}

PosteriorKernel::PosteriorKernel(const PdeProblem& problem, std::vector<FieldNet> predictors,
                                 std::vector<data::ObservationSet> observations,
                                 double prior_std)
    : predictors_(std::move(predictors)),
      observations_(std::move(observations)),
      prior_std_(prior_std) {
  if (prior_std_ <= 0) throw std::invalid_argument("posterior: prior_std must be positive");
  if (predictors_.empty()) throw std::invalid_argument("posterior: no predictors");
  for (const data::ObservationSet& obs : observations_) {
    if (obs.tau <= 0) throw std::invalid_argument("posterior: observation tau must be positive");
  }
  for (const FieldNet& fn : predictors_) {
    if (fn.field != Field::kSolution && fn.field != Field::kCoefficient) {
      throw std::invalid_argument("posterior: networks predict solution or coefficient fields");
    }
    segments_.emplace_back(layout_.total_size(), fn.net->layout.total_size());
    layout_.append(fn.net->layout, std::string(problems::field_name(fn.field)) + ".");
  }
  build(problem);
}

std::pair<Eigen::Index, Eigen::Index> PosteriorKernel::segment(std::size_t i) const {
  return segments_.at(i);
}

void PosteriorKernel::build(const PdeProblem& problem) {
  // leaves in combined-layout order: one run per predictor network
  std::vector<std::vector<ad::Var>> leaves;
  for (const FieldNet& fn : predictors_) {
    leaves.push_back(ad::make_leaves(graph_, fn.net->layout));
  }

  auto predictor_index = [&](Field f) -> std::size_t {
    for (std::size_t i = 0; i < predictors_.size(); ++i) {
      if (predictors_[i].field == f) return i;
    }
    throw std::invalid_argument(std::string("posterior: no network predicts the ") +
                                problems::field_name(f) + " field");
  };

  std::vector<ad::Var> terms;
  for (const data::ObservationSet& obs : observations_) {
    ad::Var pred;
    switch (obs.field) {
      case Field::kSolution:
      case Field::kBoundary: {
        const std::size_t ui = predictor_index(Field::kSolution);
        pred = nets::build_batch_eval(graph_, *predictors_[ui].net, leaves[ui], obs.points,
                                      /*with_jets=*/false)
                   .value;
        break;
      }
      case Field::kCoefficient: {
        const std::size_t ki = predictor_index(Field::kCoefficient);
        pred = nets::build_batch_eval(graph_, *predictors_[ki].net, leaves[ki], obs.points,
                                      /*with_jets=*/false)
                   .value;
        break;
      }
      case Field::kForce: {
        const std::size_t ui = predictor_index(Field::kSolution);
        nets::BatchEval u = nets::build_batch_eval(graph_, *predictors_[ui].net, leaves[ui],
                                                   obs.points, /*with_jets=*/true);
        const Eigen::Index n = obs.points.cols();
        switch (problem.id()) {
          case ProblemId::kMultiscale1d:
          case ProblemId::kMultiscale2d: {
            // -(grad A . grad u + A * laplace u), with A known analytically
            Matrix a(1, n);
            Matrix ag(problem.domain().dim(), n);
            for (Eigen::Index j = 0; j < n; ++j) {
              const Vector x = obs.points.col(j);
              a(0, j) = problem.coefficient(x);
              ag.col(j) = problem.coefficient_grad(x);
            }
            ad::Var lap = u.d2[0];
            for (Eigen::Index i = 1; i < problem.domain().dim(); ++i) {
              lap = graph_.add(lap, u.d2[i]);
            }
            ad::Var acc = graph_.hadamard(graph_.constant(a), lap);
            for (Eigen::Index i = 0; i < problem.domain().dim(); ++i) {
              acc = graph_.add(acc, graph_.hadamard(graph_.constant(ag.row(i)), u.d1[i]));
            }
            pred = graph_.scale(acc, -1.0);
            break;
          }
          case ProblemId::kNonlinearPoisson1d: {
            const std::size_t ki = predictor_index(Field::kCoefficient);
            ad::Var kvals = nets::build_batch_eval(graph_, *predictors_[ki].net, leaves[ki],
                                                   obs.points, /*with_jets=*/false)
                                .value;
            pred = graph_.add(graph_.scale(u.d2[0], 0.01), graph_.hadamard(kvals, u.value));
            break;
          }
          case ProblemId::kPoisson2d:
            pred = graph_.add(u.d2[0], u.d2[1]);
            break;
        }
        break;
      }
    }
    Matrix target(1, obs.size());
    target.row(0) = obs.noisy.transpose();
    ad::Var sq = graph_.sum(graph_.square(graph_.sub(pred, graph_.constant(std::move(target)))));
    terms.push_back(graph_.scale(sq, -1.0 / (2.0 * obs.tau * obs.tau)));
  }

  if (!terms.empty()) {
    ad::Var acc = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i) acc = graph_.add(acc, terms[i]);
    total_ll_ = acc;
  }
}

bool PosteriorKernel::eval(const Vector& theta, double& value, Vector& grad) {
  grad.resize(dim());
  double ll = 0.0;
  if (total_ll_.valid()) {
    graph_.set_params(theta);
    graph_.forward();
    ll = graph_.scalar(total_ll_);
    graph_.backward(total_ll_);
    graph_.param_grad(grad);
  } else {
    grad.setZero();
  }
  value = ll + log_prior(theta, prior_std_);
  grad -= theta / (prior_std_ * prior_std_);
  return std::isfinite(value) && grad.allFinite();
}

bool PosteriorKernel::eval_value(const Vector& theta, double& value) {
  double ll = 0.0;
  if (total_ll_.valid()) {
    graph_.set_params(theta);
    graph_.forward();
    ll = graph_.scalar(total_ll_);
  }
  value = ll + log_prior(theta, prior_std_);
  return std::isfinite(value);
}

double log_posterior_kernel(PosteriorKernel& kernel, const Vector& theta) {
  double v = 0.0;
  kernel.eval_value(theta, v);
  return v;  // non-finite values flow through as-is; callers check
}

double neg_log_posterior_loss(PosteriorKernel& kernel, const Vector& theta) {
  return -log_posterior_kernel(kernel, theta);
}

}  // namespace mbpinn::post
