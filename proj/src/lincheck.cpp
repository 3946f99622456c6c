#include "crnosc/lincheck.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crn {

CubicCoefficients characteristic_cubic(const Eigen::Matrix3d& j) {
  CubicCoefficients c;
  c.a2 = -j.trace();
  c.a1 = (j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0)) +
         (j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0)) +
         (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1));
  c.a0 = -j.determinant();
  return c;
}

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::HopfBoundary: return "hopf";
    case StabilityClass::Unstable: return "unstable";
    case StabilityClass::Degenerate: return "degenerate";
  }
  return "?";
}

StabilityClass cubic_routh_hurwitz(const CubicCoefficients& c, double tol) {
  double band = tol * std::max(std::abs(c.a2 * c.a1), std::abs(c.a0));
  if (!(c.a0 > 0.0) || !(c.a2 > 0.0)) return StabilityClass::Degenerate;
  double gap = c.a2 * c.a1 - c.a0;
  if (std::abs(gap) <= band) return StabilityClass::HopfBoundary;
  return gap > 0.0 ? StabilityClass::Stable : StabilityClass::Unstable;
}

Eigen::Matrix3d reduced_jacobian(const MassActionSystem& sys, const Eigen::VectorXd& x,
                                 const ReductionOptions& opts) {
  const int n = sys.dim();
  if (n == 3) return sys.jacobian(x);
  if (n != 4)
    throw std::invalid_argument("reduced_jacobian handles only 3 or 4 species");
  auto d_opt = conservation_vector(sys.network());
  if (!d_opt)
    throw std::invalid_argument("4-species reduction needs a conservation vector");
  Eigen::Vector4d d;
  for (int i = 0; i < 4; ++i) d[i] = (*d_opt)[i].to_double();
  int e = opts.eliminate < 0 ? 3 : opts.eliminate;
  // With x_e = (c - sum_{i != e} d_i x_i) / d_e, column j of the reduced
  // Jacobian is dF_i/dx_j - (d_j/d_e) dF_i/dx_e over the kept species.
  Eigen::Matrix4d full = sys.jacobian(x);
  Eigen::Matrix3d out;
  int ri = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == e) continue;
    int rj = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == e) continue;
      out(ri, rj) = full(i, j) - (d[j] / d[e]) * full(i, e);
      ++rj;
    }
    ++ri;
  }
  return out;
}

Eigen::MatrixXd reduction_embedding(const MassActionSystem& sys,
                                    const ReductionOptions& opts,
                                    std::vector<int>* kept) {
  const int n = sys.dim();
  if (n == 3) {
    if (kept) *kept = {0, 1, 2};
    return Eigen::Matrix3d::Identity();
  }
  if (n != 4)
    throw std::invalid_argument("reduction handles only 3 or 4 species");
  auto d_opt = conservation_vector(sys.network());
  if (!d_opt)
    throw std::invalid_argument("4-species reduction needs a conservation vector");
  int e = opts.eliminate < 0 ? 3 : opts.eliminate;
  Eigen::MatrixXd embed = Eigen::MatrixXd::Zero(4, 3);
  if (kept) kept->clear();
  int col = 0;
  for (int j = 0; j < 4; ++j) {
    if (j == e) continue;
    embed(j, col) = 1.0;
    embed(e, col) = -(*d_opt)[j].to_double() / (*d_opt)[e].to_double();
    if (kept) kept->push_back(j);
    ++col;
  }
  return embed;
}

StabilityReport classify_equilibrium(const MassActionSystem& sys,
                                     const Eigen::VectorXd& x,
                                     const ClassifyOptions& opts) {
  double res = sys.relative_residual(x);
  if (res > opts.equilibrium_tol)
    throw std::invalid_argument("point is not an equilibrium (relative residual " +
                                std::to_string(res) + ")");
  StabilityReport rep;
  rep.reduced_jacobian = reduced_jacobian(sys, x, opts.reduction);
  rep.cubic = characteristic_cubic(rep.reduced_jacobian);
  rep.classification = cubic_routh_hurwitz(rep.cubic, opts.hopf_tol);

  // Companion matrix of the computed characteristic polynomial.
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  comp(0, 2) = -rep.cubic.a0;
  comp(1, 2) = -rep.cubic.a1;
  comp(2, 2) = -rep.cubic.a2;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
  std::array<std::complex<double>, 3> ev;
  for (int i = 0; i < 3; ++i) ev[i] = es.eigenvalues()[i];
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  rep.eigenvalues = ev;
  if (rep.classification == StabilityClass::HopfBoundary)
    rep.hopf = std::make_pair(std::sqrt(rep.cubic.a1), -rep.cubic.a2);
  return rep;
}

double CanonicalFrame::conjugation_defect(const Eigen::Matrix3d& j) const {
  Eigen::Matrix3d canon = Eigen::Matrix3d::Zero();
  canon(0, 1) = -omega;
  canon(1, 0) = omega;
  canon(2, 2) = rho;
  return (T * j * T.inverse() - canon).norm();
}

namespace {

// Unit kernel vector of a (numerically) rank-2 3x3 matrix, with the
// largest-magnitude entry made positive.
Eigen::Vector3d unit_kernel_vector(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullV);
  Eigen::Vector3d v = svd.matrixV().col(2);
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0) v = -v;
  return v.normalized();
}

}  // namespace

CanonicalFrame canonical_transform(const Eigen::Matrix3d& j,
                                   const CanonicalTransformOptions& opts) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(j);
  int real_idx = -1;
  double best_imag = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    scale = std::max(scale, std::abs(es.eigenvalues()[i]));
    if (std::abs(es.eigenvalues()[i].imag()) < best_imag) {
      best_imag = std::abs(es.eigenvalues()[i].imag());
      real_idx = i;
    }
  }
  double rho = es.eigenvalues()[real_idx].real();
  std::complex<double> pair;
  for (int i = 0; i < 3; ++i)
    if (i != real_idx && es.eigenvalues()[i].imag() > 0) pair = es.eigenvalues()[i];
  double omega = pair.imag();
  if (!(omega > 0.0) || std::abs(pair.real()) > opts.spectrum_tol * scale)
    throw std::domain_error("spectrum is not {i w, -i w, rho} within tolerance");
  if (std::abs(rho) < opts.min_abs_rho)
    throw std::domain_error("|rho| too small for the canonical frame");

  Eigen::Matrix3d jt = j.transpose();
  // (J^T)^2 + w^2 I is rank one; its kernel is the plane orthogonal to the
  // top singular direction. Intersecting that plane with a fixed coordinate
  // plane pins v1 deterministically (the arbitrary in-plane angle would
  // otherwise leak into the focal-value magnitude).
  Eigen::Matrix3d m = jt * jt + omega * omega * Eigen::Matrix3d::Identity();
  Eigen::JacobiSVD<Eigen::Matrix3d> msvd(m, Eigen::ComputeFullV);
  Eigen::Vector3d axis = msvd.matrixV().col(0);
  Eigen::Vector3d v1;
  for (int ref = 0; ref < 3; ++ref) {
    v1 = axis.cross(Eigen::Vector3d::Unit(ref));
    if (v1.norm() >= 0.1) break;
  }
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v1[i]) > std::abs(v1[imax])) imax = i;
  if (v1[imax] < 0) v1 = -v1;
  v1.normalize();
  Eigen::Vector3d v2 = -(jt * v1) / omega;
  Eigen::Vector3d v3 = unit_kernel_vector(jt - rho * Eigen::Matrix3d::Identity());

  CanonicalFrame frame;
  frame.omega = omega;
  frame.rho = rho;
  frame.T.row(0) = v1.transpose();
  frame.T.row(1) = v2.transpose();
  frame.T.row(2) = v3.transpose();
  return frame;
}

std::optional<SignPattern> competitive_pattern_search(
    const MassActionSystem& sys, const std::vector<Eigen::VectorXd>& samples) {
  if (sys.dim() != 3)
    throw std::invalid_argument("competitivity search is for three species");
  std::vector<Eigen::Matrix3d> jacs;
  jacs.reserve(samples.size());
  for (auto& x : samples) jacs.push_back(sys.jacobian(x));
  for (int mask = 0; mask < 8; ++mask) {
    std::array<int, 3> s{(mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1};
    bool good = true;
    for (auto& jm : jacs) {
      for (int i = 0; i < 3 && good; ++i)
        for (int k = 0; k < 3; ++k)
          if (i != k && s[i] * s[k] * jm(i, k) > 0.0) {
            good = false;
            break;
          }
      if (!good) break;
    }
    if (good) {
      int minus = (s[0] < 0) + (s[1] < 0) + (s[2] < 0);
      if (minus > 1)
        for (auto& e : s) e = -e;  // prefer the representative with fewer flips
      return SignPattern{s};
    }
  }
  return std::nullopt;
}

}  // namespace crn
