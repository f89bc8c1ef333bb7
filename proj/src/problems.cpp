#include "mbpinn/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mbpinn::problems {

namespace {

constexpr double kPi = std::numbers::pi;

Box box1d(double lo, double hi) {
  Box b;
  b.lo = Vector::Constant(1, lo);
  b.hi = Vector::Constant(1, hi);
  return b;
}

Box box2d(double lo, double hi) {
  Box b;
  b.lo = Vector::Constant(2, lo);
  b.hi = Vector::Constant(2, hi);
  return b;
}

void check_dim(const Vector& x, Eigen::Index d) {
  if (x.size() != d) throw std::invalid_argument("problem: point has wrong dimension");
}

}  // namespace

const char* field_name(Field f) {
  switch (f) {
    case Field::kSolution: return "solution";
    case Field::kForce: return "force";
    case Field::kBoundary: return "boundary";
    case Field::kCoefficient: return "coefficient";
  }
  return "?";
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  }
  return true;
}

PdeProblem PdeProblem::make(ProblemId id, double epsilon) {
  PdeProblem p;
  p.id_ = id;
  p.epsilon_ = epsilon;
  switch (id) {
    case ProblemId::kMultiscale1d: {
      if (epsilon <= 0) throw std::invalid_argument("problem: epsilon must be positive");
      const double inv = 1.0 / epsilon;
      if (std::abs(inv - std::round(inv)) > 1e-9) {
        // the closed-form solution only satisfies u(0)=u(1)=0 when sin(2*pi/eps)=0
        throw std::invalid_argument("problem: 1/epsilon must be an integer for the 1d multiscale case");
      }
      p.domain_ = box1d(0.0, 1.0);
      break;
    }
    case ProblemId::kNonlinearPoisson1d:
      p.epsilon_ = 0.0;
      p.domain_ = box1d(0.0, 1.0);
      break;
    case ProblemId::kMultiscale2d:
      if (epsilon <= 0) throw std::invalid_argument("problem: epsilon must be positive");
      p.domain_ = box2d(0.0, 1.0);
      break;
    case ProblemId::kPoisson2d:
      p.epsilon_ = 0.0;
      p.domain_ = box2d(-1.0, 1.0);
      break;
  }
  return p;
}

std::vector<Field> PdeProblem::observed_fields() const {
  switch (id_) {
    case ProblemId::kMultiscale1d:
      return {Field::kSolution, Field::kForce};
    case ProblemId::kNonlinearPoisson1d:
      return {Field::kSolution, Field::kForce, Field::kCoefficient};
    case ProblemId::kMultiscale2d:
    case ProblemId::kPoisson2d:
      return {Field::kSolution, Field::kBoundary, Field::kForce};
  }
  return {};
}

bool PdeProblem::separate_boundary_set() const {
  return id_ == ProblemId::kMultiscale2d || id_ == ProblemId::kPoisson2d;
}

double PdeProblem::exact_solution(const Vector& x) const {
  check_dim(x, domain_.dim());
  switch (id_) {
    case ProblemId::kMultiscale1d: {
      const double t = x[0];
      const double w = 2.0 * kPi / epsilon_;
      const double e = epsilon_;
      return t - t * t +
             e * (std::sin(w * t) / (4.0 * kPi) - t * std::sin(w * t) / (2.0 * kPi) -
                  e * std::cos(w * t) / (4.0 * kPi * kPi) + e / (4.0 * kPi * kPi));
    }
    case ProblemId::kNonlinearPoisson1d: {
      const double t = x[0];
      return std::sin(2.0 * kPi * t) + 0.1 * std::cos(10.0 * kPi * t);
    }
    case ProblemId::kMultiscale2d: {
      const double s = x.squaredNorm();
      const double w = 2.0 * kPi / epsilon_;
      const double e = epsilon_;
      return 0.25 * s * s + e * s * std::sin(w * s) / (16.0 * kPi) +
             e * e * std::cos(w * s) / (32.0 * kPi * kPi);
    }
    case ProblemId::kPoisson2d:
      return std::exp(std::sin(kPi * x[0])) * std::exp(std::sin(kPi * x[1]));
  }
  return 0.0;
}

Vector PdeProblem::exact_solution_grad(const Vector& x) const {
  check_dim(x, domain_.dim());
  Vector g(domain_.dim());
  switch (id_) {
    case ProblemId::kMultiscale1d: {
      const double t = x[0];
      const double w = 2.0 * kPi / epsilon_;
      // simplifies to u' = (1-2x)(2+cos(wx))/2, so A u' = (1-2x)/2
      g[0] = 1.0 - 2.0 * t + (0.5 - t) * std::cos(w * t);
      break;
    }
    case ProblemId::kNonlinearPoisson1d: {
      const double t = x[0];
      g[0] = 2.0 * kPi * std::cos(2.0 * kPi * t) - kPi * std::sin(10.0 * kPi * t);
      break;
    }
    case ProblemId::kMultiscale2d: {
      const double s = x.squaredNorm();
      const double w = 2.0 * kPi / epsilon_;
      const double du_ds = 0.5 * s + 0.125 * s * std::cos(w * s);
      g = 2.0 * du_ds * x;
      break;
    }
    case ProblemId::kPoisson2d: {
      const double u = exact_solution(x);
      g[0] = kPi * std::cos(kPi * x[0]) * u;
      g[1] = kPi * std::cos(kPi * x[1]) * u;
      break;
    }
  }
  return g;
}

Vector PdeProblem::exact_solution_d2(const Vector& x) const {
  check_dim(x, domain_.dim());
  Vector g(domain_.dim());
  switch (id_) {
    case ProblemId::kMultiscale1d: {
      const double t = x[0];
      const double w = 2.0 * kPi / epsilon_;
      g[0] = -2.0 - std::cos(w * t) - w * (0.5 - t) * std::sin(w * t);
      break;
    }
    case ProblemId::kNonlinearPoisson1d: {
      const double t = x[0];
      g[0] = -4.0 * kPi * kPi * std::sin(2.0 * kPi * t) -
             10.0 * kPi * kPi * std::cos(10.0 * kPi * t);
      break;
    }
    case ProblemId::kMultiscale2d: {
      const double s = x.squaredNorm();
      const double w = 2.0 * kPi / epsilon_;
      const double du_ds = 0.5 * s + 0.125 * s * std::cos(w * s);
      const double d2u_ds2 = 0.5 + 0.125 * std::cos(w * s) - 0.125 * w * s * std::sin(w * s);
      g[0] = 4.0 * x[0] * x[0] * d2u_ds2 + 2.0 * du_ds;
      g[1] = 4.0 * x[1] * x[1] * d2u_ds2 + 2.0 * du_ds;
      break;
    }
    case ProblemId::kPoisson2d: {
      const double u = exact_solution(x);
      for (int i = 0; i < 2; ++i) {
        const double c = std::cos(kPi * x[i]);
        const double s = std::sin(kPi * x[i]);
        g[i] = kPi * kPi * (c * c - s) * u;
      }
      break;
    }
  }
  return g;
}

double PdeProblem::coefficient(const Vector& x) const {
  check_dim(x, domain_.dim());
  switch (id_) {
    case ProblemId::kMultiscale1d:
      return 1.0 / (2.0 + std::cos(2.0 * kPi * x[0] / epsilon_));
    case ProblemId::kNonlinearPoisson1d: {
      const double z = (x[0] - 0.5) / 0.15;
      return 0.1 + std::exp(-0.5 * z * z);
    }
    case ProblemId::kMultiscale2d:
      return 1.0 / (4.0 + std::cos(2.0 * kPi * x.squaredNorm() / epsilon_));
    case ProblemId::kPoisson2d:
      throw std::invalid_argument("problem: kPoisson2d has no coefficient field");
  }
  return 0.0;
}

Vector PdeProblem::coefficient_grad(const Vector& x) const {
  check_dim(x, domain_.dim());
  Vector g(domain_.dim());
  switch (id_) {
    case ProblemId::kMultiscale1d: {
      const double w = 2.0 * kPi / epsilon_;
      const double den = 2.0 + std::cos(w * x[0]);
      g[0] = w * std::sin(w * x[0]) / (den * den);
      break;
    }
    case ProblemId::kMultiscale2d: {
      const double w = 2.0 * kPi / epsilon_;
      const double s = x.squaredNorm();
      const double den = 4.0 + std::cos(w * s);
      const double da_ds = w * std::sin(w * s) / (den * den);
      g = 2.0 * da_ds * x;
      break;
    }
    default:
      throw std::invalid_argument("problem: analytic coefficient gradient only for known coefficients");
  }
  return g;
}

double PdeProblem::force(const Vector& x) const {
  check_dim(x, domain_.dim());
  switch (id_) {
    case ProblemId::kMultiscale1d:
      return 1.0;
    case ProblemId::kNonlinearPoisson1d: {
      const double t = x[0];
      return 0.01 * (-4.0 * kPi * kPi * std::sin(2.0 * kPi * t) -
                     10.0 * kPi * kPi * std::cos(10.0 * kPi * t)) +
             coefficient(x) * exact_solution(x);
    }
    case ProblemId::kMultiscale2d:
      return -x.squaredNorm();
    case ProblemId::kPoisson2d: {
      const double c1 = std::cos(kPi * x[0]), s1 = std::sin(kPi * x[0]);
      const double c2 = std::cos(kPi * x[1]), s2 = std::sin(kPi * x[1]);
      return kPi * kPi * std::exp(s1) * std::exp(s2) * (c1 * c1 - s1 + c2 * c2 - s2);
    }
  }
  return 0.0;
}

bool PdeProblem::on_boundary(const Vector& x, double tol) const {
  if (!domain_.contains(x, tol)) return false;
  for (Eigen::Index i = 0; i < domain_.dim(); ++i) {
    if (std::abs(x[i] - domain_.lo[i]) <= tol || std::abs(x[i] - domain_.hi[i]) <= tol) {
      return true;
    }
  }
  return false;
}

double PdeProblem::boundary_value(const Vector& x) const {
  if (!on_boundary(x, 1e-9)) throw std::invalid_argument("problem: point is not on the boundary");
  switch (id_) {
    case ProblemId::kMultiscale1d:
      return 0.0;
    case ProblemId::kNonlinearPoisson1d:
      return 0.1;
    case ProblemId::kMultiscale2d:
      // boundary data generated from the exact-solution trace so that the
      // dataset is self-consistent with the interior solution values
      return exact_solution(x);
    case ProblemId::kPoisson2d:
      return exact_solution(x);
  }
  return 0.0;
}

double PdeProblem::residual_from_jets(const nets::JetValue& u, const Vector& x,
                                      double k_value) const {
  switch (id_) {
    case ProblemId::kMultiscale1d:
      return -(coefficient_grad(x)[0] * u.d1[0] + coefficient(x) * u.d2[0]);
    case ProblemId::kNonlinearPoisson1d:
      return 0.01 * u.d2[0] + k_value * u.value;
    case ProblemId::kMultiscale2d: {
      const Vector ag = coefficient_grad(x);
      const double a = coefficient(x);
      return -(ag[0] * u.d1[0] + ag[1] * u.d1[1] + a * (u.d2[0] + u.d2[1]));
    }
    case ProblemId::kPoisson2d:
      return u.d2[0] + u.d2[1];
  }
  return 0.0;
}

double residual(const PdeProblem& p, const nets::Network& u_net, const Vector& u_theta,
                const Vector& x) {
  if (p.has_coefficient_field()) {
    throw std::invalid_argument("problem: residual needs the coefficient network here");
  }
  return p.residual_from_jets(nets::eval_with_spatial_derivs(u_net, u_theta, x), x);
}

double residual(const PdeProblem& p, const nets::Network& u_net, const Vector& u_theta,
                const nets::Network& k_net, const Vector& k_theta, const Vector& x) {
  const double k = nets::forward(k_net, k_theta, x);
  return p.residual_from_jets(nets::eval_with_spatial_derivs(u_net, u_theta, x), x, k);
}

}  // namespace mbpinn::problems
