// Linear stability of equilibria: conservation-law reduction to three
// dimensions, the monic cubic characteristic polynomial, Routh-Hurwitz
// classification, spectra, the canonical-frame transformation used by the
// focal-value machinery, and the competitivity sign-pattern search.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>

#include "crnosc/massaction.hpp"

namespace crn {

struct CubicCoefficients {
  double a2 = 0, a1 = 0, a0 = 0;  // lambda^3 + a2 l^2 + a1 l + a0
};

// Exact cofactor expansion of det(lambda I - J) for a 3x3 matrix.
CubicCoefficients characteristic_cubic(const Eigen::Matrix3d& j);

enum class StabilityClass { Stable, HopfBoundary, Unstable, Degenerate };
std::string to_string(StabilityClass c);  // stable|hopf|unstable|degenerate

// Routh-Hurwitz trichotomy for the cubic; the Hopf boundary is detected
// with a relative tolerance on a2*a1 - a0.
StabilityClass cubic_routh_hurwitz(const CubicCoefficients& c, double tol = 1e-9);

struct ReductionOptions {
  // Species eliminated through the conservation law when n = 4; -1 means
  // the last-declared species.
  int eliminate = -1;
};

// For n = 3 the Jacobian itself; for n = 4 the Jacobian of the system with
// one species eliminated through a positive conservation law.
Eigen::Matrix3d reduced_jacobian(const MassActionSystem& sys, const Eigen::VectorXd& x,
                                 const ReductionOptions& opts = {});

// n x 3 matrix mapping reduced tangent vectors into the full tangent space
// (identity for n = 3, conservation-law completion for n = 4). `kept`
// receives the retained species indices when non-null.
Eigen::MatrixXd reduction_embedding(const MassActionSystem& sys,
                                    const ReductionOptions& opts = {},
                                    std::vector<int>* kept = nullptr);

struct StabilityReport {
  Eigen::Matrix3d reduced_jacobian;
  CubicCoefficients cubic;
  std::array<std::complex<double>, 3> eigenvalues;
  StabilityClass classification = StabilityClass::Degenerate;
  std::optional<std::pair<double, double>> hopf;  // (omega, rho) on the boundary
};

struct ClassifyOptions {
  double equilibrium_tol = 1e-8;  // relative residual allowed at x
  double hopf_tol = 1e-9;
  ReductionOptions reduction;
};

// Throws std::invalid_argument when x is not an equilibrium within tolerance.
StabilityReport classify_equilibrium(const MassActionSystem& sys,
                                     const Eigen::VectorXd& x,
                                     const ClassifyOptions& opts = {});

// Frame bringing J with spectrum {i w, -i w, rho} to canonical block form;
// rows of T are v1, v2, v3 with (J^T)^2 v1 = -w^2 v1, J^T v1 = -w v2,
// J^T v3 = rho v3.
struct CanonicalFrame {
  Eigen::Matrix3d T;
  double omega = 0;
  double rho = 0;

  double conjugation_defect(const Eigen::Matrix3d& j) const;
};

struct CanonicalTransformOptions {
  double spectrum_tol = 1e-6;  // |Re(pair)| <= tol * spectral scale
  double min_abs_rho = 1e-8;
};

// Throws std::domain_error when the spectrum is not of the required form.
CanonicalFrame canonical_transform(const Eigen::Matrix3d& j,
                                   const CanonicalTransformOptions& opts = {});

struct SignPattern {
  std::array<int, 3> flips{1, 1, 1};  // +-1 per species
};

// Searches the 8 coordinate reflections for one making every off-diagonal
// Jacobian entry nonpositive at every sample; the representative with the
// fewest flipped coordinates is returned.
std::optional<SignPattern> competitive_pattern_search(
    const MassActionSystem& sys, const std::vector<Eigen::VectorXd>& samples);

}  // namespace crn
