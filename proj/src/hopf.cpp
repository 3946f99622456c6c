#include "crnosc/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace crn {

CanonicalTaylorData taylor_coefficients(const MassActionSystem& sys,
                                        const Eigen::VectorXd& x_eq,
                                        const CanonicalFrame& frame,
                                        const ReductionOptions& red) {
  std::vector<int> kept;
  Eigen::MatrixXd embed = reduction_embedding(sys, red, &kept);

  // Hessians of the reduced components, then conjugation by T:
  // component i in frame coordinates has Hessian
  //   sum_k T(i,k) Ti^T H_k Ti   with Ti = T^{-1}.
  Eigen::Matrix3d tinv = frame.T.inverse();
  Eigen::MatrixXd back = embed * tinv;  // full-space direction of frame coords
  std::array<Eigen::Matrix3d, 3> hess;
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (int k = 0; k < 3; ++k) {
      Eigen::MatrixXd hk = sys.hessian(kept[k], x_eq);
      acc += frame.T(i, k) * (back.transpose() * hk * back);
    }
    hess[i] = acc;
  }

  CanonicalTaylorData d;
  d.omega = frame.omega;
  d.rho = frame.rho;
  d.f200 = hess[0](0, 0);
  d.f110 = hess[0](0, 1);
  d.f020 = hess[0](1, 1);
  d.f101 = hess[0](0, 2);
  d.f011 = hess[0](1, 2);
  d.f002 = hess[0](2, 2);
  d.g200 = hess[1](0, 0);
  d.g110 = hess[1](0, 1);
  d.g020 = hess[1](1, 1);
  d.g101 = hess[1](0, 2);
  d.g011 = hess[1](1, 2);
  d.g002 = hess[1](2, 2);
  d.h200 = hess[2](0, 0);
  d.h110 = hess[2](0, 1);
  d.h020 = hess[2](1, 1);
  d.h101 = hess[2](0, 2);
  d.h011 = hess[2](1, 2);
  d.h002 = hess[2](2, 2);
  return d;
}

CenterManifoldQuad center_manifold_quadratic(double omega, double rho, double h200,
                                             double h110, double h020) {
  Eigen::Matrix3d m;
  m << rho, -2.0 * omega, 0.0,
      -omega, -rho, omega,
      0.0, 2.0 * omega, rho;
  double det = -rho * (rho * rho + 4.0 * omega * omega);
  if (std::abs(det) < 1e-300)
    throw std::domain_error("center-manifold system is singular");
  Eigen::Vector3d rhsv(-h200, h110, -h020);
  Eigen::Vector3d c = m.fullPivLu().solve(rhsv);
  return {c[0], c[1], c[2]};
}

FocalValue first_focal_value(const CanonicalTaylorData& d) {
  const double w = d.omega, r = d.rho;
  if (std::abs(r) < 1e-8)
    throw std::domain_error("|rho| too small in the focal-value formula");
  const double r2 = r * r, w2 = w * w;
  const double denom = r * (r2 + 4.0 * w2);
  double l1 = d.f300 + d.f120 + d.g030 + d.g210;
  l1 += (d.f110 * (d.f200 + d.f020) - d.g110 * (d.g200 + d.g020) +
         d.f020 * d.g020 - d.f200 * d.g200) / w;
  l1 -= d.h200 / denom *
        ((3.0 * r2 + 8.0 * w2) * d.f101 - 2.0 * r * w * d.f011 -
         2.0 * r * w * d.g101 + (r2 + 8.0 * w2) * d.g011);
  l1 -= 2.0 * d.h110 / (r2 + 4.0 * w2) *
        (2.0 * w * d.f101 + r * d.f011 + r * d.g101 - 2.0 * w * d.g011);
  l1 -= d.h020 / denom *
        ((r2 + 8.0 * w2) * d.f101 + 2.0 * r * w * d.f011 + 2.0 * r * w * d.g101 +
         (3.0 * r2 + 8.0 * w2) * d.g011);
  return {l1, FocalValue::Provenance::Pipeline};
}

FocalValue focal_value_with_frame(const MassActionSystem& sys,
                                  const Eigen::VectorXd& equilibrium,
                                  const CanonicalFrame& frame,
                                  const ReductionOptions& red) {
  return first_focal_value(taylor_coefficients(sys, equilibrium, frame, red));
}

FocalValue focal_value_at(const ModelInstance& m, const Eigen::VectorXd& equilibrium,
                          const ClassifyOptions& opts) {
  StabilityReport rep = classify_equilibrium(m.system, equilibrium, opts);
  if (rep.classification != StabilityClass::HopfBoundary)
    throw std::invalid_argument("equilibrium is not on the Hopf boundary (class " +
                                to_string(rep.classification) + ")");
  CanonicalFrame frame = canonical_transform(rep.reduced_jacobian);
  return focal_value_with_frame(m.system, equilibrium, frame, opts.reduction);
}

namespace {

struct PointEval {
  StabilityClass cls = StabilityClass::Degenerate;
  double hval = std::numeric_limits<double>::quiet_NaN();
};

class ScanEvaluator {
 public:
  ScanEvaluator(ModelId id, std::map<std::string, double> fixed, std::string n1,
                std::string n2)
      : id_(id), fixed_(std::move(fixed)), n1_(std::move(n1)), n2_(std::move(n2)) {}

  PointEval eval(double v1, double v2) const {
    PointEval out;
    try {
      auto params = fixed_;
      params[n1_] = v1;
      params[n2_] = v2;
      double t = 1.0;
      if (auto it = params.find("t"); it != params.end()) {
        t = it->second;
        params.erase(it);
      }
      ModelInstance inst = builtin_model(id_, params);
      Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
      StabilityReport rep = classify_equilibrium(inst.system, eq);
      out.cls = rep.classification;
      out.hval = rep.cubic.a2 * rep.cubic.a1 - rep.cubic.a0;
    } catch (const std::exception&) {
      // out stays Degenerate/NaN
    }
    return out;
  }

  double focal(double v1, double v2) const {
    auto params = fixed_;
    params[n1_] = v1;
    params[n2_] = v2;
    double t = 1.0;
    if (auto it = params.find("t"); it != params.end()) {
      t = it->second;
      params.erase(it);
    }
    ModelInstance inst = builtin_model(id_, params);
    Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
    return focal_value_at(inst, eq).L1;
  }

 private:
  ModelId id_;
  std::map<std::string, double> fixed_;
  std::string n1_, n2_;
};

double axis_value(const ScanAxis& a, int i) {
  if (a.count == 1) return a.lo;
  return a.lo + (a.hi - a.lo) * static_cast<double>(i) / (a.count - 1);
}

}  // namespace

HopfScanResult hopf_scan(ModelId id, const std::map<std::string, double>& fixed,
                         const ScanAxis& axis1, const ScanAxis& axis2,
                         const HopfScanOptions& opts) {
  if (axis1.count < 2 || axis2.count < 2 || !(axis1.hi > axis1.lo) ||
      !(axis2.hi > axis2.lo))
    throw std::invalid_argument("scan grid must span a positive area");

  HopfScanResult result;
  result.axis1 = axis1;
  result.axis2 = axis2;
  result.grid.resize(static_cast<std::size_t>(axis1.count) * axis2.count);

  ScanEvaluator ev(id, fixed, axis1.name, axis2.name);

  int nthreads = opts.threads > 0
                     ? opts.threads
                     : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<int>(nthreads, axis2.count);
  auto worker = [&](int tid) {
    for (int i2 = tid; i2 < axis2.count; i2 += nthreads) {
      double v2 = axis_value(axis2, i2);
      for (int i1 = 0; i1 < axis1.count; ++i1) {
        double v1 = axis_value(axis1, i1);
        PointEval pe = ev.eval(v1, v2);
        result.grid[static_cast<std::size_t>(i2) * axis1.count + i1] =
            HopfScanPoint{v1, v2, pe.cls, pe.hval};
      }
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  // Bisection along grid edges where the raw Routh-Hurwitz gap changes
  // sign. A point is kept only once the gap is below the absolute target
  // AND the relative Hopf band accepts it, so the focal pipeline applies.
  auto refine = [&](double v1a, double v2a, double ha, double v1b, double v2b) {
    for (int it = 0; it < opts.bisection_max; ++it) {
      double v1m = 0.5 * (v1a + v1b), v2m = 0.5 * (v2a + v2b);
      PointEval pm = ev.eval(v1m, v2m);
      if (!std::isfinite(pm.hval)) return;
      if (std::abs(pm.hval) <= opts.boundary_tol &&
          pm.cls == StabilityClass::HopfBoundary) {
        double l1;
        try {
          l1 = ev.focal(v1m, v2m);
        } catch (const std::exception&) {
          return;
        }
        result.boundary.push_back({v1m, v2m, pm.hval, l1});
        return;
      }
      if ((pm.hval > 0) == (ha > 0)) {
        v1a = v1m;
        v2a = v2m;
        ha = pm.hval;
      } else {
        v1b = v1m;
        v2b = v2m;
      }
    }
  };

  auto at = [&](int i1, int i2) -> const HopfScanPoint& {
    return result.grid[static_cast<std::size_t>(i2) * axis1.count + i1];
  };
  for (int i2 = 0; i2 < axis2.count; ++i2)
    for (int i1 = 0; i1 + 1 < axis1.count; ++i1) {
      const auto &a = at(i1, i2), &b = at(i1 + 1, i2);
      if (std::isfinite(a.hval) && std::isfinite(b.hval) && (a.hval > 0) != (b.hval > 0))
        refine(a.p1, a.p2, a.hval, b.p1, b.p2);
    }
  for (int i1 = 0; i1 < axis1.count; ++i1)
    for (int i2 = 0; i2 + 1 < axis2.count; ++i2) {
      const auto &a = at(i1, i2), &b = at(i1, i2 + 1);
      if (std::isfinite(a.hval) && std::isfinite(b.hval) && (a.hval > 0) != (b.hval > 0))
        refine(a.p1, a.p2, a.hval, b.p1, b.p2);
    }

  std::sort(result.boundary.begin(), result.boundary.end(),
            [](const HopfBoundaryPoint& a, const HopfBoundaryPoint& b) {
              if (a.p1 != b.p1) return a.p1 < b.p1;
              return a.p2 < b.p2;
            });

  // Focal-value sign changes along the refined curve: secant in the first
  // axis on L1(v1) evaluated at the boundary (h = 0 re-solved in axis 2).
  auto boundary_p2 = [&](double v1, double p2a, double p2b) -> std::optional<double> {
    double ha = ev.eval(v1, p2a).hval, hb = ev.eval(v1, p2b).hval;
    if (!std::isfinite(ha) || !std::isfinite(hb) || (ha > 0) == (hb > 0))
      return std::nullopt;
    for (int it = 0; it < opts.bisection_max; ++it) {
      double mid = 0.5 * (p2a + p2b);
      PointEval pm = ev.eval(v1, mid);
      if (!std::isfinite(pm.hval)) return std::nullopt;
      if (std::abs(pm.hval) <= opts.boundary_tol &&
          pm.cls == StabilityClass::HopfBoundary)
        return mid;
      if ((pm.hval > 0) == (ha > 0)) {
        p2a = mid;
        ha = pm.hval;
      } else {
        p2b = mid;
        hb = pm.hval;
      }
    }
    return 0.5 * (p2a + p2b);
  };
  for (std::size_t i = 0; i + 1 < result.boundary.size(); ++i) {
    const auto &a = result.boundary[i], &b = result.boundary[i + 1];
    if ((a.L1 > 0) == (b.L1 > 0)) continue;
    double span2 = std::abs(b.p2 - a.p2) + 1e-3 * (axis2.hi - axis2.lo);
    double lo2 = std::min(a.p2, b.p2) - span2, hi2 = std::max(a.p2, b.p2) + span2;
    double xa = a.p1, xb = b.p1, fa = a.L1, fb = b.L1;
    double xm = xa;
    for (int it = 0; it < 40 && std::abs(xb - xa) > 1e-12 * (1 + std::abs(xa)); ++it) {
      xm = xb - fb * (xb - xa) / (fb - fa);  // secant, safeguarded to the bracket
      if (!(xm > std::min(xa, xb) && xm < std::max(xa, xb)))
        xm = 0.5 * (xa + xb);
      auto p2m = boundary_p2(xm, lo2, hi2);
      if (!p2m) break;
      double fm;
      try {
        fm = ev.focal(xm, *p2m);
      } catch (const std::exception&) {
        break;
      }
      if ((fm > 0) == (fa > 0)) {
        xa = xm;
        fa = fm;
      } else {
        xb = xm;
        fb = fm;
      }
      if (std::abs(fm) < 1e-12) break;
    }
    auto p2m = boundary_p2(xm, lo2, hi2);
    if (p2m) result.degenerate_points.emplace_back(xm, *p2m);
  }
  return result;
}

}  // namespace crn
