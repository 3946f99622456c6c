// Andronov-Hopf machinery: canonical Taylor coefficients of the reduced
// vector field, the quadratic center-manifold solve, the first focal value,
// and two-parameter Hopf scans with boundary refinement and degenerate
// (Bautin) point location.
#pragma once

#include <functional>
#include <vector>

#include "crnosc/models.hpp"

namespace crn {

// Taylor coefficients of the vector field in a canonical frame, following
// the (1/2) f_ijk / (1/6) f_ijk convention for quadratic / cubic terms.
// Mass-action right-hand sides are quadratic, so after the linear change
// of coordinates every cubic coefficient is exactly zero; the fields are
// kept because the focal-value formula consumes them.
struct CanonicalTaylorData {
  double omega = 0, rho = 0;
  double f200 = 0, f110 = 0, f020 = 0, f101 = 0, f011 = 0, f002 = 0;
  double g200 = 0, g110 = 0, g020 = 0, g101 = 0, g011 = 0, g002 = 0;
  double h200 = 0, h110 = 0, h020 = 0, h101 = 0, h011 = 0, h002 = 0;
  double f300 = 0, f120 = 0, g210 = 0, g030 = 0;
};

// Exact recentering of the (reduced) right-hand side at x_eq conjugated by
// the frame; coefficients come from the analytic Hessians.
CanonicalTaylorData taylor_coefficients(const MassActionSystem& sys,
                                        const Eigen::VectorXd& x_eq,
                                        const CanonicalFrame& frame,
                                        const ReductionOptions& red = {});

struct CenterManifoldQuad {
  double c20 = 0, c11 = 0, c02 = 0;
};

// Unique solution of the linear system matching the x^2, xy, y^2
// coefficients of the two expressions for zdot on the center manifold:
//   w c11 = (rho c20 + h200) / 2
//   w (c02 - c20) = rho c11 + h110
//   -w c11 = (rho c02 + h020) / 2
CenterManifoldQuad center_manifold_quadratic(double omega, double rho, double h200,
                                             double h110, double h020);

struct FocalValue {
  double L1 = 0;
  enum class Provenance { Pipeline, ClosedForm } provenance = Provenance::Pipeline;
};

// Literal evaluation of the three-dimensional first-focal-value formula.
// Throws std::domain_error when |rho| < 1e-8.
FocalValue first_focal_value(const CanonicalTaylorData& d);

// classify -> canonical frame -> Taylor data -> focal value. Throws when
// the equilibrium is not on the Hopf boundary.
FocalValue focal_value_at(const ModelInstance& m, const Eigen::VectorXd& equilibrium,
                          const ClassifyOptions& opts = {});

// Same pipeline but with a caller-supplied frame (e.g. a closed-form one).
FocalValue focal_value_with_frame(const MassActionSystem& sys,
                                  const Eigen::VectorXd& equilibrium,
                                  const CanonicalFrame& frame,
                                  const ReductionOptions& red = {});

struct ScanAxis {
  std::string name;
  double lo = 0, hi = 0;
  int count = 0;
};

struct HopfScanPoint {
  double p1 = 0, p2 = 0;
  StabilityClass cls = StabilityClass::Degenerate;
  double hval = 0;  // raw a2*a1 - a0 from the generic pipeline
};

struct HopfBoundaryPoint {
  double p1 = 0, p2 = 0;
  double hval = 0;
  double L1 = 0;
};

struct HopfScanResult {
  ScanAxis axis1, axis2;
  std::vector<HopfScanPoint> grid;  // row-major: index = i2 * axis1.count + i1
  std::vector<HopfBoundaryPoint> boundary;
  std::vector<std::pair<double, double>> degenerate_points;
};

struct HopfScanOptions {
  double boundary_tol = 1e-10;  // |hval| target for refined boundary points
  int bisection_max = 60;
  int threads = 0;  // 0: hardware concurrency
};

// Classifies a rectangular grid over two model parameters (the branch
// parameter "t" may serve as an axis for the homogenised models), refines
// the Hopf boundary by bisection, computes the focal value along it, and
// locates focal-value sign changes.
HopfScanResult hopf_scan(ModelId id, const std::map<std::string, double>& fixed,
                         const ScanAxis& axis1, const ScanAxis& axis2,
                         const HopfScanOptions& opts = {});

}  // namespace crn
