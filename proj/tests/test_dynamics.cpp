#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnosc/dynamics.hpp"
#include "crnosc/models.hpp"
#include "crnosc/netdsl.hpp"
#include "crnosc/report_io.hpp"

using namespace crn;

namespace {

MassActionSystem decay_system(double kappa = 1.0) {
  auto parsed = parse_network({"A -> 0 ; k"});
  return MassActionSystem(*parsed.network, RateAssignment{{{"k", kappa}}});
}

}  // namespace

TEST_CASE("linear decay reaches exp(-1) within tolerance") {
  MassActionSystem sys = decay_system();
  Eigen::VectorXd x0(1);
  x0[0] = 1.0;
  Trajectory traj = integrate(sys, x0, 1.0);
  CHECK(traj.times.back() == 1.0);
  CHECK(std::abs(traj.states.back()[0] - std::exp(-1.0)) <= 1e-9);
}

TEST_CASE("global error shrinks roughly in proportion to the tolerance") {
  MassActionSystem sys = decay_system();
  Eigen::VectorXd x0(1);
  x0[0] = 1.0;
  std::vector<double> tols{1e-6, 1e-8, 1e-10, 1e-12};
  std::vector<double> errs;
  for (double tol : tols) {
    IntegratorOptions opts;
    opts.abs_tol = opts.rel_tol = tol;
    Trajectory traj = integrate(sys, x0, 1.0, opts);
    errs.push_back(std::abs(traj.states.back()[0] - std::exp(-1.0)));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(errs[i + 1] <= errs[i]);
  double slope = std::log(errs.front() / errs.back()) /
                 std::log(tols.front() / tols.back());
  CHECK(slope > 0.6);
  CHECK(slope < 1.4);
}

TEST_CASE("conserved mass drifts below 1e-8 relative over t = 1000") {
  Rng rng(321);
  for (ModelId id : {ModelId::FB_H, ModelId::WH_H, ModelId::W_H}) {
    CAPTURE(to_string(id));
    std::map<std::string, double> p;
    for (auto& name : model_param_names(id)) p[name] = rng.log_uniform(0.5, 2.0);
    auto inst = builtin_model(id, p);
    Eigen::VectorXd x0(4);
    for (int i = 0; i < 4; ++i) x0[i] = rng.uniform(0.5, 2.0);
    Trajectory traj = integrate(inst.system, x0, 1000.0);
    Eigen::VectorXd d = Eigen::VectorXd::Ones(4);
    CHECK(traj.conservation_drift(d) <= 1e-8 * d.dot(x0));
  }
}

TEST_CASE("states remain nonnegative under boundary-grazing dynamics") {
  // 2A -> 0 pushes A toward zero fast; the integrator must not go negative.
  auto parsed = parse_network({"2A -> 0 ; k"});
  MassActionSystem sys(*parsed.network, RateAssignment{{{"k", 50.0}}});
  Eigen::VectorXd x0(1);
  x0[0] = 5.0;
  Trajectory traj = integrate(sys, x0, 50.0);
  for (auto& x : traj.states) CHECK(x[0] >= 0.0);
}

TEST_CASE("sampled integration lands on the uniform grid") {
  MassActionSystem sys = decay_system();
  Eigen::VectorXd x0(1);
  x0[0] = 2.0;
  Trajectory traj = integrate_sampled(sys, x0, 2.0, 21);
  REQUIRE(traj.times.size() == 21);
  CHECK(traj.times[10] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(traj.states[10][0] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("invalid integrations are rejected") {
  MassActionSystem sys = decay_system();
  Eigen::VectorXd x0(1);
  x0[0] = 1.0;
  CHECK_THROWS_AS(integrate(sys, x0, -1.0), std::invalid_argument);
  Eigen::VectorXd neg(1);
  neg[0] = -0.5;
  CHECK_THROWS_AS(integrate(sys, neg, 1.0), std::invalid_argument);
}

TEST_CASE("the default section is a unit class-tangent plane through the equilibrium") {
  auto inst = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
  Eigen::VectorXd eq = closed_form_equilibrium(inst, 2.84);
  SectionSpec section = default_section(inst.system, eq);
  CHECK(section.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(section.normal.sum()) < 1e-9);  // tangent to x+y+z+w = c
  Eigen::MatrixXd frame = section_frame(inst.system, section);
  CHECK(frame.cols() == 2);
  CHECK((frame.transpose() * section.normal).norm() < 1e-9);
}

TEST_CASE("globally stable parameters capture every trajectory") {
  auto inst = builtin_model(ModelId::WH,
                            {{"k1", 2}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}});
  Eigen::VectorXd eq = closed_form_equilibrium(inst);
  SectionSpec section = default_section(inst.system, eq);
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x0(3);
    for (int i = 0; i < 3; ++i) x0[i] = rng.log_uniform(0.2, 5.0);
    CycleSearchOptions opts;
    opts.t_transient = 100.0;
    opts.t_max = 3000.0;
    LimitCycleReport rep = find_limit_cycle(inst.system, x0, section, opts);
    CHECK(rep.outcome == CycleOutcome::EquilibriumCapture);
  }
  Trajectory traj = integrate(inst.system, Eigen::Vector3d(0.3, 4.0, 0.7).eval(), 300.0);
  CHECK((traj.states.back() - eq).norm() < 1e-6);
}

TEST_CASE("past the bifurcation threshold a stable cycle appears") {
  auto inst = builtin_model(ModelId::WH,
                            {{"k1", 3.5}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}});
  Eigen::VectorXd eq = closed_form_equilibrium(inst);
  CHECK(classify_equilibrium(inst.system, eq).classification == StabilityClass::Unstable);
  SectionSpec section = default_section(inst.system, eq);
  Eigen::VectorXd seed = eq + 0.3 * section.normal;
  LimitCycleReport rep = find_limit_cycle(inst.system, seed, section);
  REQUIRE(rep.outcome == CycleOutcome::Cycle);
  CHECK(rep.period > 0.0);
  CHECK(rep.spectral_radius < 1.0);
  CHECK(rep.stability == CycleStability::Stable);
  CHECK(rep.residual <= 1e-6 * rep.section_fixed_point.norm());
  REQUIRE(!rep.cycle_points.empty());
  for (auto& x : rep.cycle_points) CHECK((x.array() > 0).all());

  SUBCASE("newton refinement is consistent with forward detection") {
    LimitCycleReport refined =
        refine_cycle_newton(inst.system, section, rep.section_fixed_point, rep.period);
    REQUIRE(refined.outcome == CycleOutcome::Cycle);
    CHECK(refined.residual <= 1e-9 * (1.0 + refined.section_fixed_point.norm()));
    CHECK(refined.period == doctest::Approx(rep.period).epsilon(1e-5));
    CHECK((refined.section_fixed_point - rep.section_fixed_point).norm() <
          1e-4 * rep.section_fixed_point.norm());
    CHECK(refined.stability == CycleStability::Stable);
  }
}

TEST_CASE("the cubic oscillator sheds a stable cycle past its locus") {
  // kappa3* = 4 (kappa4 + sqrt(2 kappa2 kappa4)) = 3 at kappa2 = 1/2, kappa4 = 1/4.
  auto inst = builtin_model(ModelId::W,
                            {{"k1", 1}, {"k2", 0.5}, {"k3", 3.3}, {"k4", 0.25}});
  Eigen::VectorXd eq = closed_form_equilibrium(inst);
  CHECK(classify_equilibrium(inst.system, eq).classification == StabilityClass::Unstable);
  SectionSpec section = default_section(inst.system, eq);
  CycleSearchOptions opts;
  opts.t_transient = 800.0;
  LimitCycleReport rep =
      find_limit_cycle(inst.system, (eq + 0.05 * section.normal).eval(), section, opts);
  REQUIRE(rep.outcome == CycleOutcome::Cycle);
  CHECK(rep.stability == CycleStability::Stable);
  CHECK(rep.spectral_radius < 1.0);
}

TEST_CASE("bistability probe demands a stable equilibrium") {
  auto inst = builtin_model(ModelId::WH,
                            {{"k1", 3.5}, {"k2", 1}, {"k3", 1}, {"k4", 1}, {"k5", 1}});
  CHECK_THROWS_AS(bistability_probe(inst.system, closed_form_equilibrium(inst)),
                  std::invalid_argument);
}

TEST_CASE("permanence probes") {
  SUBCASE("random-rate reversible system keeps a positive floor") {
    Rng rng(2025);
    ReactionNetwork net = builtin_network(ModelId::FB);
    RateAssignment r;
    for (auto& rx : net.reactions) r.values[rx.rate_label] = rng.log_uniform(0.5, 2.0);
    MassActionSystem sys(net, r);
    auto eq = find_equilibrium(sys, Eigen::Vector3d(1, 1, 1));
    REQUIRE(eq.ok());
    PermanenceReport rep = permanence_probe(sys, eq.point, 6, 300.0, 200.0, 777);
    CHECK(rep.floor > 1e-4);
    CHECK(rep.floors.size() == 6);
    CHECK(rep.seed == 777);
  }
  SUBCASE("homogenised class above the threshold keeps a positive floor") {
    auto inst = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
    Eigen::VectorXd anchor = closed_form_equilibrium(inst, 2.84);  // c = 61.64 > r
    PermanenceReport rep = permanence_probe(inst.system, anchor, 6, 300.0, 200.0, 41);
    CHECK(rep.floor > 1e-4);
  }
  SUBCASE("below the threshold the first coordinate collapses") {
    auto inst = builtin_model(ModelId::WH_H, {{"p", 8}, {"q", 1}, {"r", 2}, {"s", 1}});
    Eigen::VectorXd anchor = Eigen::Vector4d::Constant(0.4);  // c = 1.6 < r = 2
    PermanenceReport rep = permanence_probe(inst.system, anchor, 4, 150.0, 100.0, 42);
    CHECK(rep.floor < 1e-6);
  }
}

TEST_CASE("permanence probe streams are reproducible") {
  auto inst = builtin_model(ModelId::FB_H);
  Eigen::VectorXd anchor = closed_form_equilibrium(inst, 1.0);
  PermanenceReport a = permanence_probe(inst.system, anchor, 4, 50.0, 50.0, 9);
  PermanenceReport b = permanence_probe(inst.system, anchor, 4, 50.0, 50.0, 9);
  REQUIRE(a.floors.size() == b.floors.size());
  for (std::size_t i = 0; i < a.floors.size(); ++i) CHECK(a.floors[i] == b.floors[i]);
}

TEST_CASE("trajectory csv round-trips through the loader") {
  auto inst = builtin_model(ModelId::W);
  Eigen::VectorXd x0 = Eigen::Vector3d(1.0, 0.5, 0.25);
  Trajectory traj = integrate_sampled(inst.system, x0, 5.0, 50);
  std::string csv = trajectory_csv(traj, inst.system.network().species);
  Trajectory back = trajectory_from_csv(csv);
  REQUIRE(back.times.size() == traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(back.times[i] == traj.times[i]);
    CHECK((back.states[i] - traj.states[i]).norm() == 0.0);
  }
  CHECK(trajectory_csv(back, inst.system.network().species) == csv);
}
