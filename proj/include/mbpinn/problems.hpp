#pragma once

#include <vector>

#include "mbpinn/network.hpp"
#include "mbpinn/param_vector.hpp"

namespace mbpinn::problems {

enum class ProblemId { kMultiscale1d, kNonlinearPoisson1d, kMultiscale2d, kPoisson2d };
enum class Field { kSolution, kForce, kBoundary, kCoefficient };

const char* field_name(Field f);

struct Box {
  Vector lo, hi;
  Eigen::Index dim() const { return lo.size(); }
  bool contains(const Vector& x, double tol = 1e-12) const;
};

// One of the four benchmark problems, with closed-form coefficient, force,
// boundary data and exact solution (plus the analytic derivatives the
// residual operators and self-consistency checks need).
//
//   kMultiscale1d:       -(A^eps(x) u')' = 1            on [0,1], u(0)=u(1)=0
//   kNonlinearPoisson1d:  0.01 u'' + k(x) u = f          on [0,1], u(0)=u(1)=0.1
//   kMultiscale2d:       -div(A^eps grad u) = -(|x|^2)   on [0,1]^2
//   kPoisson2d:           laplace(u) = f                 on [-1,1]^2
class PdeProblem {
 public:
  static PdeProblem make(ProblemId id, double epsilon = 0.0);

  ProblemId id() const { return id_; }
  const Box& domain() const { return domain_; }
  double epsilon() const { return epsilon_; }
  // true when a field is inferred by a second network (P2's k) rather than known
  bool has_coefficient_field() const { return id_ == ProblemId::kNonlinearPoisson1d; }
  // fields with observation data in the benchmark protocol
  std::vector<Field> observed_fields() const;
  // P1/P2 fold their two boundary points into the solution set; P3/P4 carry a
  // separate boundary observation set
  bool separate_boundary_set() const;

  double exact_solution(const Vector& x) const;
  Vector exact_solution_grad(const Vector& x) const;
  Vector exact_solution_d2(const Vector& x) const;  // pure second derivatives

  double coefficient(const Vector& x) const;
  Vector coefficient_grad(const Vector& x) const;  // known coefficients only (P1, P3)

  double force(const Vector& x) const;
  double boundary_value(const Vector& x) const;  // hard error off the boundary
  bool on_boundary(const Vector& x, double tol = 1e-12) const;

  // The differential operator N[u] applied to a network jet; `k_value` is the
  // coefficient network's value at x (P2 only, ignored elsewhere).
  double residual_from_jets(const nets::JetValue& u, const Vector& x, double k_value = 0.0) const;

 private:
  ProblemId id_;
  Box domain_;
  double epsilon_ = 0.0;
};

// Residual operator evaluated through the network path.
double residual(const PdeProblem& p, const nets::Network& u_net, const Vector& u_theta,
                const Vector& x);
double residual(const PdeProblem& p, const nets::Network& u_net, const Vector& u_theta,
                const nets::Network& k_net, const Vector& k_theta, const Vector& x);

}  // namespace mbpinn::problems
