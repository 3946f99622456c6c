// Numerical dynamics: an adaptive embedded Runge-Kutta 5(4) integrator with
// dense output, Poincare-section machinery, limit-cycle detection by forward
// integration, Newton shooting refinement (reaches unstable cycles),
// bistability and permanence probes.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crnosc/lincheck.hpp"
#include "crnosc/massaction.hpp"

namespace crn {

struct IntegratorOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double initial_step = 0.0;  // 0: automatic
  double max_step = 0.0;      // 0: unbounded
  long max_steps = 100000000;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, double h)
      : std::runtime_error(what + " (t=" + std::to_string(t) +
                           ", h=" + std::to_string(h) + ")"),
        t(t),
        h(h) {}
  double t, h;
};

// Streaming Dormand-Prince 5(4) stepper for autonomous systems. States are
// kept nonnegative by step rejection plus clipping of entries above -1e-12.
class Dopri5 {
 public:
  using RhsFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  Dopri5(RhsFn f, double t0, Eigen::VectorXd x0, IntegratorOptions opts = {});

  // Advances one accepted step, at most to t_limit. Returns false once
  // time() == t_limit.
  bool advance(double t_limit);

  double prev_time() const { return t_prev_; }
  double time() const { return t_; }
  const Eigen::VectorXd& prev_state() const { return x_prev_; }
  const Eigen::VectorXd& state() const { return x_; }
  long steps() const { return accepted_; }

  // 4th-order interpolant on the last accepted step, theta in [0, 1].
  Eigen::VectorXd dense(double theta) const;

 private:
  void compute_dense_coefficients();

  RhsFn f_;
  IntegratorOptions opts_;
  double t_prev_, t_;
  Eigen::VectorXd x_prev_, x_;
  Eigen::VectorXd k1_;  // FSAL derivative at x_
  double h_next_;
  long accepted_ = 0;
  std::array<Eigen::VectorXd, 5> dense_c_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;

  // Largest |d.x(t) - d.x(0)| over the stored nodes.
  double conservation_drift(const Eigen::VectorXd& d) const;
};

Trajectory integrate(const MassActionSystem& sys, const Eigen::VectorXd& x0,
                     double t_end, const IntegratorOptions& opts = {});
// Uniformly sampled via dense output (count >= 2 nodes including endpoints).
Trajectory integrate_sampled(const MassActionSystem& sys, const Eigen::VectorXd& x0,
                             double t_end, int count,
                             const IntegratorOptions& opts = {});

struct SectionSpec {
  Eigen::VectorXd anchor;
  Eigen::VectorXd normal;  // unit, tangent to the stoichiometric class
  int direction = +1;      // sign of d/dt[(x - anchor).normal] at crossings
};

// Plane through the equilibrium whose normal follows the real part of the
// complex eigenvector pair of the (reduced) Jacobian; falls back to the
// first coordinate axis projected onto the class.
SectionSpec default_section(const MassActionSystem& sys, const Eigen::VectorXd& equilibrium,
                            const ReductionOptions& red = {});

// Orthonormal basis of the section plane inside the class tangent space.
Eigen::MatrixXd section_frame(const MassActionSystem& sys, const SectionSpec& section);

enum class CycleOutcome { Cycle, EquilibriumCapture, Inconclusive };
enum class CycleStability { Stable, Unstable, Inconclusive };

struct LimitCycleReport {
  CycleOutcome outcome = CycleOutcome::Inconclusive;
  double period = 0;
  Eigen::VectorXd section_fixed_point;
  std::vector<double> cycle_times;
  std::vector<Eigen::VectorXd> cycle_points;
  Eigen::MatrixXd return_map_jacobian;  // on-section coordinates
  std::vector<std::complex<double>> multipliers;
  double spectral_radius = 0;
  CycleStability stability = CycleStability::Inconclusive;
  double residual = 0;  // |flow_period(x) - x|
  std::string note;
};

struct CycleSearchOptions {
  double t_transient = 500.0;
  double t_max = 1e4;
  double crossing_tol = 1e-7;        // successive-crossing convergence
  double capture_radius_rel = 1e-6;  // equilibrium capture threshold
  int max_crossings = 2000;
  int cycle_samples = 256;
  double multiplier_band = 1e-3;
  IntegratorOptions integrator{};
  IntegratorOptions refine_integrator{1e-11, 1e-11};
};

LimitCycleReport find_limit_cycle(const MassActionSystem& sys, const Eigen::VectorXd& seed,
                                  const SectionSpec& section,
                                  const CycleSearchOptions& opts = {});

// Newton shooting on the on-section displacement map; converges to stable
// or unstable cycles from a nearby guess.
LimitCycleReport refine_cycle_newton(const MassActionSystem& sys, const SectionSpec& section,
                                     const Eigen::VectorXd& guess, double period_guess,
                                     const CycleSearchOptions& opts = {});

enum class Fate { Equilibrium, Cycle, Inconclusive };
std::string to_string(Fate f);

struct BistabilityReport {
  std::vector<double> radii;
  std::vector<Fate> fates;
  Fate inner_fate = Fate::Inconclusive;
  Fate outer_fate = Fate::Inconclusive;
  std::optional<LimitCycleReport> stable_cycle;
  std::optional<LimitCycleReport> unstable_cycle;
  bool separatrix_evidence = false;
};

struct BistabilityOptions {
  std::vector<double> radii{1e-3, 1e-2, 1e-1, 0.5, 1.0};  // times |equilibrium|
  int bracket_bisections = 22;
  CycleSearchOptions cycles{};
};

// Launches trajectories at increasing radial perturbations from a stable
// equilibrium, classifies their fates, and when an equilibrium/cycle pair
// is seen, brackets the separatrix and shoots for the unstable cycle
// between them. Throws std::invalid_argument when the equilibrium is not
// classified Stable.
BistabilityReport bistability_probe(const MassActionSystem& sys,
                                    const Eigen::VectorXd& equilibrium,
                                    const BistabilityOptions& opts = {});

struct PermanenceReport {
  std::vector<double> floors;  // per start: min coordinate after transient
  double floor = 0;            // min over starts
  std::uint64_t seed = 0;
};

// Integrates from random positive starts in the class of `anchor`
// (including near-boundary starts at distance 1e-6), discards the
// transient, and reports the minimum coordinate seen in the window.
PermanenceReport permanence_probe(const MassActionSystem& sys, const Eigen::VectorXd& anchor,
                                  int num_samples, double t_transient, double t_window,
                                  std::uint64_t seed,
                                  const IntegratorOptions& opts = {});

// Deterministic uniform doubles from a 64-bit generator; identical streams
// across platforms for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double log_uniform(double lo, double hi);

 private:
  std::uint64_t next();
  std::uint64_t state_;
};

}  // namespace crn
