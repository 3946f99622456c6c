#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnosc/hopf.hpp"
#include "crnosc/netdsl.hpp"
#include "oracles.hpp"

using namespace crn;
using crn::testing::center_manifold_route_L1;
using crn::testing::fd_second;
using crn::testing::reduced_rhs_fn;

namespace {

const double kSqrt7 = std::sqrt(7.0);
const double kSqrt2 = std::sqrt(2.0);

CanonicalTaylorData random_taylor(Rng& rng, bool with_cubics) {
  CanonicalTaylorData d;
  d.omega = rng.log_uniform(0.3, 4.0);
  d.rho = (rng.uniform() < 0.5 ? -1 : 1) * rng.log_uniform(0.1, 4.0);
  for (double* coeff : {&d.f200, &d.f110, &d.f020, &d.f101, &d.f011, &d.g200, &d.g110,
                        &d.g020, &d.g101, &d.g011, &d.h200, &d.h110, &d.h020})
    *coeff = rng.uniform(-2, 2);
  if (with_cubics)
    for (double* coeff : {&d.f300, &d.f120, &d.g210, &d.g030})
      *coeff = rng.uniform(-2, 2);
  return d;
}

}  // namespace

TEST_CASE("center manifold quadratic solves the worked instance") {
  auto c = center_manifold_quadratic(1.0, -1.0, 1.0, 0.0, 0.0);
  CHECK(c.c20 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.c11 == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(c.c02 == doctest::Approx(0.4).epsilon(1e-14));
  auto zero = center_manifold_quadratic(1.7, -0.4, 0.0, 0.0, 0.0);
  CHECK(zero.c20 == 0.0);
  CHECK(zero.c11 == 0.0);
  CHECK(zero.c02 == 0.0);
}

TEST_CASE("center manifold solution satisfies its defining equations") {
  Rng rng(24001);
  for (int trial = 0; trial < 200; ++trial) {
    double w = rng.log_uniform(0.2, 5.0);
    double r = (rng.uniform() < 0.5 ? -1 : 1) * rng.log_uniform(0.05, 5.0);
    double h200 = rng.uniform(-3, 3), h110 = rng.uniform(-3, 3), h020 = rng.uniform(-3, 3);
    auto c = center_manifold_quadratic(w, r, h200, h110, h020);
    CHECK(std::abs(w * c.c11 - 0.5 * (r * c.c20 + h200)) <= 1e-12 * (1 + std::abs(h200)));
    CHECK(std::abs(w * (c.c02 - c.c20) - (r * c.c11 + h110)) <= 1e-12 * (1 + std::abs(h110)));
    CHECK(std::abs(-w * c.c11 - 0.5 * (r * c.c02 + h020)) <= 1e-12 * (1 + std::abs(h020)));
  }
}

TEST_CASE("focal value formula on degenerate inputs") {
  CanonicalTaylorData zero;
  zero.omega = 1.0;
  zero.rho = -1.0;
  CHECK(first_focal_value(zero).L1 == 0.0);
  CanonicalTaylorData cubic = zero;
  cubic.f300 = -6.0;
  CHECK(first_focal_value(cubic).L1 == -6.0);
  CanonicalTaylorData bad = zero;
  bad.rho = 1e-9;
  CHECK_THROWS_AS(first_focal_value(bad), std::domain_error);
}

TEST_CASE("focal value agrees with the center-manifold reduction route") {
  Rng rng(771);
  for (int trial = 0; trial < 300; ++trial) {
    CanonicalTaylorData d = random_taylor(rng, trial % 2 == 0);
    double direct = first_focal_value(d).L1;
    double via_manifold = center_manifold_route_L1(d);
    CHECK(direct == doctest::Approx(via_manifold).epsilon(1e-10));
  }
}

TEST_CASE("cubic taylor coefficients vanish for quadratic fields") {
  auto inst = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
  double t = (3 - kSqrt7) / 2;
  Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
  auto frame = canonical_transform(reduced_jacobian(inst.system, eq));
  auto d = taylor_coefficients(inst.system, eq, frame);
  CHECK(d.f300 == 0.0);
  CHECK(d.f120 == 0.0);
  CHECK(d.g210 == 0.0);
  CHECK(d.g030 == 0.0);
}

TEST_CASE("taylor coefficients match finite differences of the conjugated field") {
  for (bool reduced : {false, true}) {
    ModelInstance inst =
        reduced ? builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}})
                : builtin_model(ModelId::W, w_params_from_pqr(6.0, 1.0, 1.0));
    double t = reduced ? (3 - kSqrt7) / 2 : 1.0;
    Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
    Eigen::Matrix3d jr = reduced_jacobian(inst.system, eq);
    auto frame = canonical_transform(jr);
    auto d = taylor_coefficients(inst.system, eq, frame);

    auto f_red = reduced_rhs_fn(inst.system, eq);
    Eigen::Vector3d y_eq = reduced ? Eigen::Vector3d(eq[0], eq[1], eq[2])
                                   : Eigen::Vector3d(eq[0], eq[1], eq[2]);
    Eigen::Matrix3d tinv = frame.T.inverse();
    auto g = [&](const Eigen::VectorXd& eta) -> Eigen::VectorXd {
      return frame.T * f_red(y_eq + tinv * eta);
    };
    Eigen::Vector3d zero3 = Eigen::Vector3d::Zero();
    struct Item {
      double value;
      int comp, a, b;
    };
    const Item items[] = {
        {d.f200, 0, 0, 0}, {d.f110, 0, 0, 1}, {d.f020, 0, 1, 1}, {d.f101, 0, 0, 2},
        {d.f011, 0, 1, 2}, {d.g200, 1, 0, 0}, {d.g110, 1, 0, 1}, {d.g020, 1, 1, 1},
        {d.g101, 1, 0, 2}, {d.g011, 1, 1, 2}, {d.h200, 2, 0, 0}, {d.h110, 2, 0, 1},
        {d.h020, 2, 1, 1},
    };
    for (auto& item : items) {
      double fd = fd_second(g, zero3, item.comp, item.a, item.b);
      CHECK(std::abs(item.value - fd) <= 1e-6 * (1.0 + std::abs(item.value)));
    }
  }
}

TEST_CASE("closed-form frame reproduces the reference focal value exactly") {
  auto inst = builtin_model(ModelId::W, w_params_from_pqr(6.0, 1.0, 1.0));
  Eigen::VectorXd eq = closed_form_equilibrium(inst);
  auto frame = closed_form_frame(inst);
  REQUIRE(frame.has_value());
  auto lv = focal_value_with_frame(inst.system, eq, *frame);
  CHECK(lv.L1 == doctest::Approx(-47.0 / 1300.0).epsilon(1e-10));

  Rng rng(8812);
  for (int trial = 0; trial < 20; ++trial) {
    double q = rng.log_uniform(0.3, 3.0), r = rng.log_uniform(0.3, 3.0);
    double p = 2 * q * (q + 2);
    auto w = builtin_model(ModelId::W, w_params_from_pqr(p, q, r));
    Eigen::VectorXd e = closed_form_equilibrium(w);
    auto fr = closed_form_frame(w);
    REQUIRE(fr.has_value());
    double pipeline = focal_value_with_frame(w.system, e, *fr).L1;
    double closed = closed_form_L1(ModelId::W, {{"q", q}, {"r", r}});
    CHECK(pipeline == doctest::Approx(closed).epsilon(1e-8));
    CHECK(pipeline < 0.0);
    // The generic frame changes the magnitude, never the sign.
    CHECK(focal_value_at(w, e).L1 < 0.0);
  }
}

TEST_CASE("focal value signs along the wh-h locus slice") {
  auto make = [&](double p) {
    return builtin_model(ModelId::WH_H, {{"p", p}, {"q", 1}, {"r", 2}, {"s", 1}});
  };
  auto inst = make(8.0);
  double t_minus = (3 - kSqrt7) / 2, t_plus = (3 + kSqrt7) / 2;
  CHECK(focal_value_at(inst, closed_form_equilibrium(inst, t_minus)).L1 < 0.0);
  CHECK(focal_value_at(inst, closed_form_equilibrium(inst, t_plus)).L1 > 0.0);

  auto bautin = make(3.0 * (1.0 + kSqrt2));
  double t_star = 1.0 + kSqrt2;
  CHECK(std::abs(focal_value_at(bautin, closed_form_equilibrium(bautin, t_star)).L1) <= 1e-8);

  CHECK_THROWS_AS(focal_value_at(make(8.0), closed_form_equilibrium(inst, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("pipeline and closed-form focal values share a sign on the locus") {
  Rng rng(99321);
  int checked = 0;
  while (checked < 30) {
    double q = rng.log_uniform(0.3, 3.0), r = rng.log_uniform(0.3, 3.0),
           s = rng.log_uniform(0.3, 3.0);
    double threshold = (q + s) * (q + s) + 2 * std::sqrt(s * q * (q + s) * (q + r + s));
    double p = threshold / (r * s) * rng.uniform(1.05, 3.0);
    auto roots = whh_locus_roots(p, q, r, s);
    if (roots.size() != 2) continue;
    auto inst = builtin_model(ModelId::WH_H, {{"p", p}, {"q", q}, {"r", r}, {"s", s}});
    for (double t : roots) {
      double closed = closed_form_L1(ModelId::WH_H, {{"q", q}, {"r", r}, {"s", s}, {"t", t}});
      double pipe = focal_value_at(inst, closed_form_equilibrium(inst, t)).L1;
      if (std::abs(closed) < 1e-8) continue;
      CHECK(pipe * closed > 0.0);
    }
    // The smaller root is always supercritical.
    CHECK(focal_value_at(inst, closed_form_equilibrium(inst, roots[0])).L1 < 0.0);
    ++checked;
  }
}

TEST_CASE("w-h focal value is negative on its locus") {
  Rng rng(1441);
  for (int trial = 0; trial < 25; ++trial) {
    double r = rng.uniform(1.1, 3.0);
    double q = rng.uniform(0.05, 0.95) * r * (r - 1.0);
    double pc = 2 * q * (q + 2) * (r * r + (q + 2) * r + q) / (r * (r - 1) - q);
    auto inst = builtin_model(ModelId::W_H, {{"p", pc}, {"q", q}, {"r", r}});
    Eigen::VectorXd eq = closed_form_equilibrium(inst, 1.0);
    CHECK(focal_value_at(inst, eq).L1 < 0.0);
    auto frame = closed_form_frame(inst, 1.0);
    REQUIRE(frame.has_value());
    CHECK(focal_value_with_frame(inst.system, eq, *frame, {}).L1 < 0.0);
  }
}

TEST_CASE("closed-form locus functions") {
  CHECK(hopf_locus_eval(ModelId::FB, {{"k6", 0.187}, {"k8", 0.0052}}) > 0.0);
  CHECK(hopf_locus_eval(ModelId::FB, {{"k6", 0.1}, {"k8", 0.1}}) < 0.0);

  auto roots = whh_locus_roots(8, 1, 2, 1);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx((3 - kSqrt7) / 2).epsilon(1e-14));
  CHECK(roots[1] == doctest::Approx((3 + kSqrt7) / 2).epsilon(1e-14));

  CHECK(hopf_locus_eval(ModelId::W, {{"k2", 0.5}, {"k3", 3.0}, {"k4", 0.25}}) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(hopf_locus_eval(ModelId::WH,
                        {{"k1", 2}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}}) > 0);
  CHECK(hopf_locus_eval(ModelId::WH,
                        {{"k1", 3.5}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}}) < 0);
  CHECK(hopf_locus_eval(ModelId::W_H, {{"p", 100}, {"q", 1}, {"r", 2}}) < 0);
  CHECK(hopf_locus_eval(ModelId::W_H, {{"p", 30}, {"q", 1}, {"r", 2}}) > 0);
  CHECK(std::isinf(hopf_locus_eval(ModelId::W_H, {{"p", 30}, {"q", 1}, {"r", 0.9}})));
  CHECK_THROWS_AS(hopf_locus_eval(ModelId::FB_H, {}), std::invalid_argument);
}

TEST_CASE("closed-form focal values") {
  CHECK(closed_form_L1(ModelId::W, {{"q", 1}, {"r", 1}}) ==
        doctest::Approx(-47.0 / 1300.0).epsilon(1e-15));
  double t_minus = (3 - kSqrt7) / 2;
  CHECK(closed_form_L1(ModelId::WH_H, {{"q", 1}, {"r", 2}, {"s", 1}, {"t", t_minus}}) < 0);
  CHECK_THROWS_AS(closed_form_L1(ModelId::FB, {}), std::invalid_argument);
}

TEST_CASE("locus root counting follows the discriminant trichotomy") {
  CHECK(hopf_root_count(8, 1, 2, 1) == 2);
  CHECK(hopf_root_count(1, 1, 1, 1) == 0);
  double q = 1, r = 1, s = 1;
  double p_eq = ((q + s) * (q + s) + 2 * std::sqrt(s * q * (q + s) * (q + r + s))) / (r * s);
  CHECK(hopf_root_count(p_eq, q, r, s) == 1);
}

TEST_CASE("focal value scales inversely with the squared frame scale") {
  auto inst = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
  double t = (3 + kSqrt7) / 2;
  Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
  Eigen::Matrix3d j = reduced_jacobian(inst.system, eq);
  CanonicalFrame frame = canonical_transform(j);
  double base = focal_value_with_frame(inst.system, eq, frame).L1;

  Rng rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    double s = rng.log_uniform(0.2, 5.0);
    CanonicalFrame scaled = frame;
    scaled.T.row(0) *= s;
    scaled.T.row(1) *= s;  // v2 = -J^T v1 / omega scales with v1
    double rescaled = focal_value_with_frame(inst.system, eq, scaled).L1;
    CHECK(rescaled * base > 0.0);
    CHECK(rescaled * s * s == doctest::Approx(base).epsilon(1e-8));
  }
  // Re-deriving the frame restores the canonical normalization bit for bit.
  CanonicalFrame again = canonical_transform(j);
  CHECK(focal_value_with_frame(inst.system, eq, again).L1 == base);
}

TEST_CASE("w-h classification and focal sign are invariant along the ray") {
  Rng rng(62);
  double q = 0.8, r = 2.0;
  double pc = 2 * q * (q + 2) * (r * r + (q + 2) * r + q) / (r * (r - 1) - q);
  auto inst = builtin_model(ModelId::W_H, {{"p", pc}, {"q", q}, {"r", r}});
  Eigen::VectorXd eq1 = closed_form_equilibrium(inst, 1.0);
  auto rep1 = classify_equilibrium(inst.system, eq1);
  double sign1 = focal_value_at(inst, eq1).L1;
  for (int trial = 0; trial < 20; ++trial) {
    double scale = rng.log_uniform(0.1, 10.0);
    Eigen::VectorXd eqs = closed_form_equilibrium(inst, scale);
    auto reps = classify_equilibrium(inst.system, eqs);
    CHECK(reps.classification == rep1.classification);
    CHECK(focal_value_at(inst, eqs).L1 * sign1 > 0.0);
  }
}

TEST_CASE("two-parameter scan of the reversible oscillator slice") {
  ScanAxis a1{"k6", 0.01, 0.4, 36};
  ScanAxis a2{"k8", 0.01, 0.6, 36};
  HopfScanResult scan = hopf_scan(ModelId::FB, {}, a1, a2);
  CHECK(scan.grid.size() == 36 * 36);
  REQUIRE(scan.boundary.size() >= 10);
  for (auto& b : scan.boundary) CHECK(std::abs(b.hval) <= 1e-10);
  // Supercritical near the k8 axis endpoint, subcritical near the k6 one.
  CHECK(scan.boundary.front().L1 < 0.0);
  CHECK(scan.boundary.back().L1 > 0.0);
  int stable = 0, unstable = 0;
  for (auto& g : scan.grid) {
    stable += g.cls == StabilityClass::Stable;
    unstable += g.cls == StabilityClass::Unstable;
  }
  CHECK(stable > 0);
  CHECK(unstable > 0);
}

TEST_CASE("scan finds the degenerate point of the homogenised slice") {
  ScanAxis a1{"t", 0.05, 4.0, 48};
  ScanAxis a2{"p", 4.0, 12.0, 48};
  HopfScanResult scan =
      hopf_scan(ModelId::WH_H, {{"q", 1}, {"r", 2}, {"s", 1}}, a1, a2);
  REQUIRE(!scan.boundary.empty());
  REQUIRE(scan.degenerate_points.size() == 1);
  double t_star = 1.0 + kSqrt2, p_star = 3.0 * (1.0 + kSqrt2);
  CHECK(scan.degenerate_points[0].first == doctest::Approx(t_star).epsilon(1e-4));
  CHECK(scan.degenerate_points[0].second == doctest::Approx(p_star).epsilon(1e-4));
}

TEST_CASE("scan results are independent of the worker count") {
  ScanAxis a1{"k6", 0.05, 0.35, 18};
  ScanAxis a2{"k8", 0.05, 0.5, 18};
  HopfScanOptions one, four;
  one.threads = 1;
  four.threads = 4;
  HopfScanResult s1 = hopf_scan(ModelId::FB, {}, a1, a2, one);
  HopfScanResult s4 = hopf_scan(ModelId::FB, {}, a1, a2, four);
  REQUIRE(s1.grid.size() == s4.grid.size());
  for (std::size_t i = 0; i < s1.grid.size(); ++i) {
    CHECK(s1.grid[i].hval == s4.grid[i].hval);
    CHECK(s1.grid[i].cls == s4.grid[i].cls);
  }
  REQUIRE(s1.boundary.size() == s4.boundary.size());
  for (std::size_t i = 0; i < s1.boundary.size(); ++i)
    CHECK(s1.boundary[i].L1 == s4.boundary[i].L1);
}

TEST_CASE("a scan strictly inside the stable region finds no boundary") {
  HopfScanResult scan =
      hopf_scan(ModelId::FB, {}, {"k6", 0.3, 0.4, 8}, {"k8", 0.3, 0.6, 8});
  CHECK(scan.boundary.empty());
  CHECK(scan.degenerate_points.empty());
  for (auto& g : scan.grid) CHECK(g.cls == StabilityClass::Stable);
}

TEST_CASE("degenerate scan specs are rejected") {
  CHECK_THROWS_AS(hopf_scan(ModelId::FB, {}, {"k6", 0.2, 0.2, 10}, {"k8", 0.1, 0.3, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hopf_scan(ModelId::FB, {}, {"k6", 0.1, 0.3, 1}, {"k8", 0.1, 0.3, 10}),
                  std::invalid_argument);
}
