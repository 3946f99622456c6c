#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crnosc/massaction.hpp"
#include "crnosc/models.hpp"
#include "crnosc/netdsl.hpp"
#include "oracles.hpp"

using namespace crn;
using crn::testing::fd_jacobian;

namespace {

RateAssignment ones(const ReactionNetwork& net) {
  RateAssignment r;
  for (auto& rx : net.reactions) r.values[rx.rate_label] = 1.0;
  return r;
}

Eigen::VectorXd random_positive(Rng& rng, int n, double lo = 0.2, double hi = 3.0) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

// Random rates for a model's free parameters.
std::map<std::string, double> random_params(ModelId id, Rng& rng) {
  std::map<std::string, double> p;
  for (auto& name : model_param_names(id)) p[name] = rng.log_uniform(0.3, 3.0);
  if (id == ModelId::WH) p["k1"] = p["k4"] + rng.log_uniform(0.2, 2.0);
  return p;
}

}  // namespace

TEST_CASE("equilibrium residuals vanish at the closed-form points") {
  MassActionSystem fb(builtin_network(ModelId::FB), ones(builtin_network(ModelId::FB)));
  CHECK(fb.rhs(Eigen::Vector3d(1, 1, 1)).lpNorm<Eigen::Infinity>() == 0.0);

  auto wh = builtin_model(ModelId::WH, {{"k1", 2}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}});
  Eigen::VectorXd eq = closed_form_equilibrium(wh);
  CHECK(eq.isApprox(Eigen::Vector3d(1, 1, 1)));
  CHECK(wh.system.rhs(eq).lpNorm<Eigen::Infinity>() == 0.0);

  auto w = builtin_model(ModelId::W);
  CHECK(w.system.rhs(Eigen::Vector3d::Zero()).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("jacobian at the interior equilibrium matches the eliminated-rate form") {
  // Under k3 = k4 and k1 - k2 = k5 - k6 = k7 - k8 the equilibrium is
  // (1,1,1) and the Jacobian there takes a three-parameter closed form.
  Rng rng(7011);
  for (int trial = 0; trial < 25; ++trial) {
    double k1 = rng.log_uniform(0.3, 3), k2 = rng.log_uniform(0.3, 3);
    double k4 = rng.log_uniform(0.3, 3), k6 = rng.log_uniform(0.3, 3);
    double k8 = rng.log_uniform(0.3, 3);
    double gap = k1 - k2;
    if (k6 + gap <= 1e-6 || k8 + gap <= 1e-6) continue;
    RateAssignment r;
    r.values = {{"k1", k1}, {"k2", k2},       {"k3", k4},       {"k4", k4},
                {"k5", k6 + gap}, {"k6", k6}, {"k7", k8 + gap}, {"k8", k8}};
    MassActionSystem sys(builtin_network(ModelId::FB), r);
    Eigen::Vector3d eq(1, 1, 1);
    CHECK(sys.relative_residual(eq) < 1e-14);
    Eigen::Matrix3d expected;
    expected << -k2 - k4 - k6, -k1, k2 + k4,
                -k1, -k1 - k8, k1 + k8,
                k1 + k4, k1 + k8, -k1 - k4 - k8;
    CHECK((sys.jacobian(eq) - expected).norm() < 1e-12 * expected.norm());
  }
}

TEST_CASE("analytic jacobian agrees with central differences on all models") {
  Rng rng(90121);
  for (ModelId id : all_models()) {
    CAPTURE(to_string(id));
    auto inst = builtin_model(id, random_params(id, rng));
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x = random_positive(rng, inst.system.dim());
      Eigen::MatrixXd ja = inst.system.jacobian(x);
      Eigen::MatrixXd jf = fd_jacobian(
          [&](const Eigen::VectorXd& y) { return inst.system.rhs(y); }, x);
      CHECK((ja - jf).lpNorm<Eigen::Infinity>() <=
            1e-6 * (1.0 + ja.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("linear conversion has a constant jacobian") {
  auto parsed = parse_network({"A -> B ; k"});
  MassActionSystem sys(*parsed.network, RateAssignment{{{"k", 0.7}}});
  Eigen::Matrix2d expected;
  expected << -0.7, 0, 0.7, 0;
  CHECK(sys.jacobian(Eigen::Vector2d(2.0, 5.0)) == expected);
  CHECK(sys.jacobian(Eigen::Vector2d(0.3, 0.1)) == expected);
}

TEST_CASE("fb parameter slice binds the documented rates") {
  auto inst = builtin_model(ModelId::FB, {{"k6", 1.0}, {"k8", 1.0}});
  const double expected[] = {1.0, 0.2, 0.2, 0.2, 1.8, 1.0, 1.8, 1.0};
  for (int j = 0; j < 8; ++j) CHECK(inst.system.rate_constant(j) == doctest::Approx(expected[j]).epsilon(1e-15));
}

TEST_CASE("wh-h binding reproduces the four-variable polynomial field") {
  double p = 8, q = 1, r = 2, s = 1;
  auto inst = builtin_model(ModelId::WH_H, {{"p", p}, {"q", q}, {"r", r}, {"s", s}});
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v = random_positive(rng, 4);
    double x = v[0], y = v[1], z = v[2], w = v[3];
    Eigen::Vector4d expected(x * w - r * x - p * x * y,
                             s * z - q * y,
                             r * x - s * z,
                             p * x * y + q * y - x * w);
    CHECK((inst.system.rhs(v) - expected).lpNorm<Eigen::Infinity>() < 1e-13);
  }
}

TEST_CASE("closed-form equilibria evaluate the branch formulas") {
  auto fbh = builtin_model(ModelId::FB_H);
  CHECK(closed_form_equilibrium(fbh, 2.0).isApprox(Eigen::Vector4d(2, 2, 2, 2)));

  auto whh = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
  CHECK(closed_form_equilibrium(whh, 1.0).isApprox(Eigen::Vector4d(1, 2, 2, 18)));

  auto w = builtin_model(ModelId::W, {{"k1", 1}, {"k2", 0.5}, {"k3", 1}, {"k4", 0.25}});
  CHECK(closed_form_equilibrium(w).isApprox(Eigen::Vector3d(1, 1, 1)));

  CHECK_THROWS_AS(closed_form_equilibrium(whh, -1.0), std::domain_error);
  auto wh_bad = builtin_model(ModelId::WH, {{"k1", 1}, {"k2", 1}, {"k3", 1}, {"k4", 2}, {"k5", 1}});
  CHECK_THROWS_AS(closed_form_equilibrium(wh_bad), std::domain_error);
}

TEST_CASE("closed-form branches zero the field at random parameter draws") {
  Rng rng(555);
  for (ModelId id : all_models()) {
    CAPTURE(to_string(id));
    for (int trial = 0; trial < 30; ++trial) {
      auto inst = builtin_model(id, random_params(id, rng));
      double t = rng.log_uniform(0.3, 3.0);
      Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
      CHECK((eq.array() > 0).all());
      CHECK(inst.system.relative_residual(eq) <= 1e-12);
    }
  }
}

TEST_CASE("newton reproduces closed forms from perturbed anchors") {
  Rng rng(777);
  for (ModelId id : all_models()) {
    CAPTURE(to_string(id));
    for (int trial = 0; trial < 10; ++trial) {
      auto inst = builtin_model(id, random_params(id, rng));
      double t = rng.log_uniform(0.5, 2.0);
      Eigen::VectorXd eq = closed_form_equilibrium(inst, t);
      const Eigen::MatrixXd& basis = inst.system.class_basis();
      Eigen::VectorXd u = random_positive(rng, basis.cols(), -1.0, 1.0);
      Eigen::VectorXd anchor = eq + 0.05 * eq.norm() * (basis * u).normalized();
      if ((anchor.array() <= 0).any()) continue;
      auto res = find_equilibrium(inst.system, anchor);
      REQUIRE(res.ok());
      CHECK((res.point - eq).norm() <= 1e-8 * (1.0 + eq.norm()));
    }
  }
}

TEST_CASE("newton stays in the stoichiometric class") {
  auto whh = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
  Eigen::Vector4d eq(1, 2, 2, 18);  // class level c = 23
  Eigen::Vector4d anchor(2, 3, 1, 17);
  CHECK(anchor.sum() == 23.0);
  auto res = find_equilibrium(whh.system, anchor);
  REQUIRE(res.ok());
  CHECK(std::abs(res.point.sum() - 23.0) < 1e-9);
  CHECK((res.point - eq).norm() < 1e-8);

  auto parsed = parse_network({"A <-> B ; k1, k2"});
  MassActionSystem ab(*parsed.network, RateAssignment{{{"k1", 1.0}, {"k2", 1.0}}});
  auto res2 = find_equilibrium(ab, Eigen::Vector2d(3, 1));
  REQUIRE(res2.ok());
  CHECK((res2.point - Eigen::Vector2d(2, 2)).norm() < 1e-9);
}

TEST_CASE("newton reports failure modes instead of looping") {
  // A -> B has no positive equilibrium in a generic class.
  auto parsed = parse_network({"A -> B ; k"});
  MassActionSystem sys(*parsed.network, RateAssignment{{{"k", 1.0}}});
  auto res = find_equilibrium(sys, Eigen::Vector2d(1, 1));
  CHECK(!res.ok());
}

TEST_CASE("fb equilibrium is unique across newton starts") {
  Rng rng(4242);
  ReactionNetwork net = builtin_network(ModelId::FB);
  for (int draw = 0; draw < 10; ++draw) {
    RateAssignment r;
    for (auto& rx : net.reactions) r.values[rx.rate_label] = rng.log_uniform(0.3, 3.0);
    MassActionSystem sys(net, r);
    std::optional<Eigen::VectorXd> first;
    int hits = 0;
    for (int start = 0; start < 8; ++start) {
      auto res = find_equilibrium(sys, random_positive(rng, 3, 0.2, 5.0));
      if (!res.ok()) continue;
      ++hits;
      if (!first)
        first = res.point;
      else
        CHECK((res.point - *first).norm() < 1e-7 * (1.0 + first->norm()));
    }
    CHECK(hits >= 4);
  }
}

TEST_CASE("detailed balance on the reversible models") {
  ReactionNetwork fb = builtin_network(ModelId::FB);
  MassActionSystem all_ones(fb, ones(fb));
  auto db = detailed_balance_check(all_ones);
  CHECK(db.balanced);
  CHECK((db.witness - Eigen::Vector3d(1, 1, 1)).norm() < 1e-12);
  CHECK(!db.notes.empty());  // tree-shaped reversible network

  RateAssignment r = ones(fb);
  r.values["k1"] = 2.0;  // breaks k1 k5 k7 = k2 k6 k8
  auto db2 = detailed_balance_check(MassActionSystem(fb, r));
  CHECK(!db2.balanced);

  auto wh = builtin_model(ModelId::WH);
  CHECK_THROWS_AS(detailed_balance_check(wh.system), std::invalid_argument);
}

TEST_CASE("detailed balance iff the homogenised branch is linear in t") {
  Rng rng(606060);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::string, double> p;
    for (auto& name : model_param_names(ModelId::FB_H))
      p[name] = rng.log_uniform(0.3, 3.0);
    bool force_balanced = trial % 2 == 0;
    if (force_balanced)
      p["k7"] = p["k8"] * p["k2"] * p["k6"] / (p["k1"] * p["k5"]);
    auto inst = builtin_model(ModelId::FB_H, p);
    auto db = detailed_balance_check(inst.system);
    double ratio = p["k1"] * p["k5"] * p["k7"] / (p["k2"] * p["k6"] * p["k8"]);
    CHECK(db.balanced == (std::abs(ratio - 1.0) < 1e-12));
    // y*(t)/t and w*(t)/t are affine-over-affine in t; they are constant
    // (branch linear in t) exactly in the balanced case.
    double y1 = closed_form_equilibrium(inst, 1.0)[1];
    double y3 = closed_form_equilibrium(inst, 3.0)[1] / 3.0;
    double w1 = closed_form_equilibrium(inst, 1.0)[3];
    double w3 = closed_form_equilibrium(inst, 3.0)[3] / 3.0;
    bool linear = std::abs(y3 - y1) < 1e-10 * std::abs(y1) &&
                  std::abs(w3 - w1) < 1e-10 * std::abs(w1);
    CHECK(linear == db.balanced);
  }
}

TEST_CASE("conserved mass is orthogonal to the field everywhere") {
  Rng rng(11);
  for (ModelId id : {ModelId::FB_H, ModelId::WH_H, ModelId::W_H}) {
    auto inst = builtin_model(id, random_params(id, rng));
    Eigen::Vector4d d(1, 1, 1, 1);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x = random_positive(rng, 4, 0.01, 10.0);
      double flux = inst.system.flux_scale(x);
      CHECK(std::abs(d.dot(inst.system.rhs(x))) <= 1e-14 * (1.0 + flux));
    }
  }
}

TEST_CASE("the field points inward on the boundary") {
  Rng rng(2323);
  for (ModelId id : all_models()) {
    auto inst = builtin_model(id, random_params(id, rng));
    for (int trial = 0; trial < 30; ++trial) {
      Eigen::VectorXd x = random_positive(rng, inst.system.dim(), 0.0, 2.0);
      int face = static_cast<int>(rng.uniform(0, inst.system.dim()));
      x[face] = 0.0;
      CHECK(inst.system.rhs(x)[face] >= 0.0);
    }
  }
}

TEST_CASE("rate assignment validation") {
  ReactionNetwork net = builtin_network(ModelId::W);
  RateAssignment missing;
  missing.values = {{"k1", 1.0}};
  CHECK_THROWS_AS(MassActionSystem(net, missing), std::invalid_argument);
  RateAssignment extra = ones(net);
  extra.values["bogus"] = 1.0;
  CHECK_THROWS_AS(MassActionSystem(net, extra), std::invalid_argument);
  RateAssignment nonpos = ones(net);
  nonpos.values["k1"] = 0.0;
  CHECK_THROWS_AS(MassActionSystem(net, nonpos), std::invalid_argument);
  CHECK_THROWS_AS(builtin_model(ModelId::WH_H, {{"p", -1.0}}), std::domain_error);
  CHECK_THROWS_AS(builtin_model(ModelId::W, {{"nope", 1.0}}), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  auto inst = builtin_model(ModelId::W);
  CHECK_THROWS_AS(inst.system.rhs(Eigen::Vector2d(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(inst.system.jacobian(Eigen::Vector4d(1, 1, 1, 1)), std::invalid_argument);
}
