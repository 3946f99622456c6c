// Mass-action semantics on top of the structural model: rate vector, ODE
// right-hand side, analytic Jacobian and Hessians, in-class Newton
// equilibrium search, and the detailed-balance test.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "crnosc/network.hpp"

namespace crn {

struct RateAssignment {
  std::map<std::string, double> values;  // rate label -> kappa > 0
};

class MassActionSystem {
 public:
  MassActionSystem(ReactionNetwork net, const RateAssignment& rates);

  const ReactionNetwork& network() const { return net_; }
  int dim() const { return net_.num_species(); }
  double rate_constant(int reaction) const { return kappa_[reaction]; }
  const Eigen::MatrixXd& gamma() const { return gamma_; }

  // Per-reaction mass-action rates kappa_j * prod x_i^{a_ij}.
  Eigen::VectorXd rate_vector(const Eigen::VectorXd& x) const;
  Eigen::VectorXd rhs(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
  // Hessian of rhs component `comp` at x. Constant in x for bimolecular
  // networks (degree <= 2), where any positive x gives the same matrix.
  Eigen::MatrixXd hessian(int comp, const Eigen::VectorXd& x) const;

  // Gross per-species turnover sum_j v_j |gamma_j|; its max entry is the
  // natural scale for relative residuals.
  double flux_scale(const Eigen::VectorXd& x) const;
  double relative_residual(const Eigen::VectorXd& x) const;

  // Orthonormal basis of im Gamma (the stoichiometric subspace); column
  // count equals the exact rank.
  const Eigen::MatrixXd& class_basis() const { return class_basis_; }

 private:
  ReactionNetwork net_;
  std::vector<double> kappa_;
  Eigen::MatrixXd gamma_;
  std::vector<std::vector<std::pair<int, int>>> reactant_exponents_;
  Eigen::MatrixXd class_basis_;
};

struct EquilibriumOptions {
  double tol = 1e-11;  // relative residual target
  int max_iterations = 100;
};

struct EquilibriumResult {
  enum class Status { Converged, NonConvergence, SingularJacobian };
  Status status = Status::NonConvergence;
  Eigen::VectorXd point;
  double residual = 0.0;  // relative
  int iterations = 0;

  bool ok() const { return status == Status::Converged; }
};

// Damped Newton on the ODE right-hand side restricted to the stoichiometric
// class of `anchor`; iterates stay strictly positive.
EquilibriumResult find_equilibrium(const MassActionSystem& sys,
                                   const Eigen::VectorXd& anchor,
                                   const EquilibriumOptions& opts = {});

struct DetailedBalanceResult {
  bool balanced = false;
  Eigen::VectorXd witness;  // solves the pairwise forward=backward system
  double residual = 0.0;    // max log-equation defect
  std::vector<std::string> notes;
};

// Requires a reversible network; throws std::invalid_argument otherwise.
DetailedBalanceResult detailed_balance_check(const MassActionSystem& sys,
                                             double tol = 1e-10);

}  // namespace crn
