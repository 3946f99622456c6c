#include "crnosc/massaction.hpp"

#include <cmath>
#include <stdexcept>

namespace crn {

namespace {

double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

MassActionSystem::MassActionSystem(ReactionNetwork net, const RateAssignment& rates)
    : net_(std::move(net)) {
  net_.validate();
  kappa_.resize(net_.num_reactions());
  std::size_t used = 0;
  for (int j = 0; j < net_.num_reactions(); ++j) {
    auto it = rates.values.find(net_.reactions[j].rate_label);
    if (it == rates.values.end())
      throw std::invalid_argument("no rate value for label " + net_.reactions[j].rate_label);
    if (!(it->second > 0.0))
      throw std::invalid_argument("rate constant " + net_.reactions[j].rate_label +
                                  " must be positive");
    kappa_[j] = it->second;
    ++used;
  }
  if (used != rates.values.size())
    throw std::invalid_argument("rate assignment has labels not present in the network");

  gamma_ = stoichiometric_matrix(net_).cast<double>();
  reactant_exponents_.resize(net_.num_reactions());
  for (int j = 0; j < net_.num_reactions(); ++j)
    reactant_exponents_[j] = net_.complexes[net_.reactions[j].reactant].terms;

  // Orthonormal basis of im Gamma with exactly rank(Gamma) columns.
  int rank = network_rank(net_);
  if (rank > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gamma_, Eigen::ComputeThinU);
    class_basis_ = svd.matrixU().leftCols(rank);
  } else {
    class_basis_ = Eigen::MatrixXd::Zero(net_.num_species(), 0);
  }
}

Eigen::VectorXd MassActionSystem::rate_vector(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("state dimension mismatch");
  Eigen::VectorXd v(net_.num_reactions());
  for (int j = 0; j < net_.num_reactions(); ++j) {
    double m = kappa_[j];
    for (auto& [s, a] : reactant_exponents_[j]) m *= int_pow(x[s], a);
    v[j] = m;
  }
  return v;
}

Eigen::VectorXd MassActionSystem::rhs(const Eigen::VectorXd& x) const {
  return gamma_ * rate_vector(x);
}

Eigen::MatrixXd MassActionSystem::jacobian(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("state dimension mismatch");
  Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(net_.num_reactions(), dim());
  for (int j = 0; j < net_.num_reactions(); ++j) {
    for (auto& [i, ai] : reactant_exponents_[j]) {
      double d = kappa_[j] * ai * int_pow(x[i], ai - 1);
      for (auto& [k, ak] : reactant_exponents_[j])
        if (k != i) d *= int_pow(x[k], ak);
      dv(j, i) = d;
    }
  }
  return gamma_ * dv;
}

Eigen::MatrixXd MassActionSystem::hessian(int comp, const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("state dimension mismatch");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
  for (int j = 0; j < net_.num_reactions(); ++j) {
    double g = gamma_(comp, j);
    if (g == 0.0) continue;
    auto& exps = reactant_exponents_[j];
    for (std::size_t p = 0; p < exps.size(); ++p) {
      auto [i, ai] = exps[p];
      // diagonal term a_i (a_i - 1) x_i^{a_i-2} * rest
      if (ai >= 2) {
        double d = kappa_[j] * ai * (ai - 1) * int_pow(x[i], ai - 2);
        for (std::size_t q = 0; q < exps.size(); ++q)
          if (q != p) d *= int_pow(x[exps[q].first], exps[q].second);
        h(i, i) += g * d;
      }
      for (std::size_t q = p + 1; q < exps.size(); ++q) {
        auto [k, ak] = exps[q];
        double d = kappa_[j] * ai * ak * int_pow(x[i], ai - 1) * int_pow(x[k], ak - 1);
        for (std::size_t r = 0; r < exps.size(); ++r)
          if (r != p && r != q) d *= int_pow(x[exps[r].first], exps[r].second);
        h(i, k) += g * d;
        h(k, i) += g * d;
      }
    }
  }
  return h;
}

double MassActionSystem::flux_scale(const Eigen::VectorXd& x) const {
  Eigen::VectorXd v = rate_vector(x);
  double s = 0.0;
  for (int c = 0; c < dim(); ++c) {
    double t = 0.0;
    for (int j = 0; j < net_.num_reactions(); ++j) t += std::abs(gamma_(c, j)) * v[j];
    s = std::max(s, t);
  }
  return s;
}

double MassActionSystem::relative_residual(const Eigen::VectorXd& x) const {
  double scale = std::max(flux_scale(x), 1e-300);
  return rhs(x).lpNorm<Eigen::Infinity>() / scale;
}

EquilibriumResult find_equilibrium(const MassActionSystem& sys,
                                   const Eigen::VectorXd& anchor,
                                   const EquilibriumOptions& opts) {
  EquilibriumResult res;
  const Eigen::MatrixXd& b = sys.class_basis();
  Eigen::VectorXd x = anchor;
  if ((x.array() <= 0.0).any()) {
    res.status = EquilibriumResult::Status::NonConvergence;
    res.point = x;
    return res;
  }
  double fres = sys.relative_residual(x);
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it;
    if (fres <= opts.tol) {
      res.status = EquilibriumResult::Status::Converged;
      res.point = x;
      res.residual = fres;
      return res;
    }
    Eigen::MatrixXd jr = b.transpose() * sys.jacobian(x) * b;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jr);
    lu.setThreshold(1e-12);
    if (lu.rank() < jr.rows()) {
      res.status = EquilibriumResult::Status::SingularJacobian;
      res.point = x;
      res.residual = fres;
      return res;
    }
    Eigen::VectorXd du = lu.solve(-(b.transpose() * sys.rhs(x)));
    Eigen::VectorXd step = b * du;
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-12) {
      Eigen::VectorXd xn = x + alpha * step;
      if ((xn.array() > 0.0).all()) {
        double fn = sys.relative_residual(xn);
        if (fn < fres * (1.0 - 1e-4 * alpha) || fn <= opts.tol) {
          x = xn;
          fres = fn;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  if (fres <= opts.tol) {
    res.status = EquilibriumResult::Status::Converged;
  } else {
    res.status = EquilibriumResult::Status::NonConvergence;
  }
  res.point = x;
  res.residual = fres;
  return res;
}

DetailedBalanceResult detailed_balance_check(const MassActionSystem& sys, double tol) {
  const ReactionNetwork& net = sys.network();
  if (!is_reversible(net))
    throw std::invalid_argument("detailed balance requires a reversible network");

  // One log-linear equation per reversible pair:
  //   (a - b) . log x = log(kappa_bwd / kappa_fwd)
  std::vector<std::pair<int, int>> pairs;  // (forward idx, backward idx)
  for (int j = 0; j < net.num_reactions(); ++j) {
    const Reaction& rj = net.reactions[j];
    for (int k = 0; k < net.num_reactions(); ++k) {
      if (net.reactions[k].reactant == rj.product && net.reactions[k].product == rj.reactant) {
        if (rj.reactant < rj.product) pairs.emplace_back(j, k);
        break;
      }
    }
  }
  const int n = sys.dim();
  Eigen::MatrixXd m(pairs.size(), n);
  Eigen::VectorXd r(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [f, bidx] = pairs[p];
    Eigen::VectorXd gcol = sys.gamma().col(f);
    m.row(p) = -gcol.transpose();  // a - b
    r[p] = std::log(sys.rate_constant(bidx) / sys.rate_constant(f));
  }
  Eigen::VectorXd xi = m.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(r);
  DetailedBalanceResult out;
  out.residual = (m * xi - r).lpNorm<Eigen::Infinity>();
  out.balanced = out.residual <= tol;
  out.witness = xi.array().exp();
  if (undirected_collapse_is_forest(net))
    out.notes.push_back(
        "complex balance and detailed balance are equivalent for this network "
        "(its undirected collapse is a forest)");
  return out;
}

}  // namespace crn
