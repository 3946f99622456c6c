#include "crnosc/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace crn {

namespace {

constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

constexpr double kNegClip = -1e-12;

}  // namespace

Dopri5::Dopri5(RhsFn f, double t0, Eigen::VectorXd x0, IntegratorOptions opts)
    : f_(std::move(f)), opts_(opts), t_prev_(t0), t_(t0), x_prev_(x0), x_(std::move(x0)) {
  k1_ = f_(x_);
  // Classic starting-step heuristic from the derivative magnitudes.
  double d0 = x_.norm(), d1 = k1_.norm();
  double h0 = (d1 > 1e-10) ? 0.01 * std::max(d0, 1.0) / d1 : 1e-6;
  Eigen::VectorXd x1 = x_ + h0 * k1_;
  Eigen::VectorXd f1 = f_(x1);
  double d2 = (f1 - k1_).norm() / h0;
  double h1 = (std::max(d1, d2) > 1e-15)
                  ? std::pow(0.01 / std::max(d1, d2), 0.2)
                  : 1e-3;
  h_next_ = std::min(100.0 * h0, h1);
  if (opts_.initial_step > 0) h_next_ = opts_.initial_step;
  if (opts_.max_step > 0) h_next_ = std::min(h_next_, opts_.max_step);
  for (auto& c : dense_c_) c = Eigen::VectorXd::Zero(x_.size());
}

bool Dopri5::advance(double t_limit) {
  if (t_ >= t_limit) return false;
  const int n = static_cast<int>(x_.size());
  double h = std::min(h_next_, t_limit - t_);
  if (opts_.max_step > 0) h = std::min(h, opts_.max_step);
  double facmax = 5.0;
  while (true) {
    if (h < 1e-14 * std::max(1.0, std::abs(t_)))
      throw IntegrationError("step size underflow (stiffness suspected)", t_, h);
    if (accepted_ >= opts_.max_steps)
      throw IntegrationError("step budget exhausted", t_, h);

    Eigen::VectorXd k2 = f_(x_ + h * (kA21 * k1_));
    Eigen::VectorXd k3 = f_(x_ + h * (kA31 * k1_ + kA32 * k2));
    Eigen::VectorXd k4 = f_(x_ + h * (kA41 * k1_ + kA42 * k2 + kA43 * k3));
    Eigen::VectorXd k5 = f_(x_ + h * (kA51 * k1_ + kA52 * k2 + kA53 * k3 + kA54 * k4));
    Eigen::VectorXd k6 =
        f_(x_ + h * (kA61 * k1_ + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    Eigen::VectorXd y_new =
        x_ + h * (kB1 * k1_ + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    Eigen::VectorXd k7 = f_(y_new);
    Eigen::VectorXd err_vec =
        h * (kE1 * k1_ + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(x_[i]), std::abs(y_new[i]));
      double e = err_vec[i] / sc;
      err += e * e;
    }
    err = std::sqrt(err / n);

    bool negative = (y_new.array() < kNegClip).any();
    if (err <= 1.0 && !negative) {
      bool clipped = false;
      for (int i = 0; i < n; ++i)
        if (y_new[i] < 0.0) {
          y_new[i] = 0.0;
          clipped = true;
        }
      if (clipped) k7 = f_(y_new);

      t_prev_ = t_;
      x_prev_ = x_;
      double dt = h;
      t_ = (t_ + h >= t_limit - 1e-30 && h == t_limit - t_prev_) ? t_limit : t_ + h;
      ++accepted_;

      // Dense-output coefficients for this step.
      Eigen::VectorXd ydiff = y_new - x_prev_;
      Eigen::VectorXd bspl = dt * k1_ - ydiff;
      dense_c_[0] = x_prev_;
      dense_c_[1] = ydiff;
      dense_c_[2] = bspl;
      dense_c_[3] = ydiff - dt * k7 - bspl;
      dense_c_[4] = dt * (kD1 * k1_ + kD3 * k3 + kD4 * k4 + kD5 * k5 + kD6 * k6 + kD7 * k7);

      x_ = std::move(y_new);
      k1_ = std::move(k7);  // FSAL

      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h_next_ = h * std::min(facmax, std::max(0.2, fac));
      return true;
    }
    if (negative && err <= 1.0) {
      h *= 0.5;
    } else {
      double fac = 0.9 * std::pow(err, -0.2);
      h *= std::max(0.2, std::min(1.0, fac));
    }
    facmax = 1.0;
  }
}

Eigen::VectorXd Dopri5::dense(double theta) const {
  const double t1 = 1.0 - theta;
  return dense_c_[0] +
         theta * (dense_c_[1] + t1 * (dense_c_[2] + theta * (dense_c_[3] + t1 * dense_c_[4])));
}

double Trajectory::conservation_drift(const Eigen::VectorXd& d) const {
  if (states.empty()) return 0.0;
  double base = d.dot(states.front());
  double drift = 0.0;
  for (auto& x : states) drift = std::max(drift, std::abs(d.dot(x) - base));
  return drift;
}

namespace {

Dopri5 make_stepper(const MassActionSystem& sys, const Eigen::VectorXd& x0,
                    const IntegratorOptions& opts) {
  if (x0.size() != sys.dim())
    throw std::invalid_argument("initial state dimension mismatch");
  if ((x0.array() < 0.0).any())
    throw std::invalid_argument("initial state must be nonnegative");
  return Dopri5([&sys](const Eigen::VectorXd& x) { return sys.rhs(x); }, 0.0, x0, opts);
}

}  // namespace

Trajectory integrate(const MassActionSystem& sys, const Eigen::VectorXd& x0,
                     double t_end, const IntegratorOptions& opts) {
  if (!(t_end > 0)) throw std::invalid_argument("t_end must be positive");
  Dopri5 stepper = make_stepper(sys, x0, opts);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  while (stepper.advance(t_end)) {
    traj.times.push_back(stepper.time());
    traj.states.push_back(stepper.state());
  }
  return traj;
}

Trajectory integrate_sampled(const MassActionSystem& sys, const Eigen::VectorXd& x0,
                             double t_end, int count, const IntegratorOptions& opts) {
  if (!(t_end > 0) || count < 2)
    throw std::invalid_argument("sampled trajectory needs t_end > 0 and count >= 2");
  Dopri5 stepper = make_stepper(sys, x0, opts);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  int next = 1;
  while (next < count && stepper.advance(t_end)) {
    while (next < count) {
      double target = t_end * next / (count - 1);
      if (target > stepper.time() + 1e-300) break;
      double span = stepper.time() - stepper.prev_time();
      double theta = span > 0 ? (target - stepper.prev_time()) / span : 1.0;
      traj.times.push_back(target);
      traj.states.push_back(stepper.dense(std::clamp(theta, 0.0, 1.0)));
      ++next;
    }
  }
  return traj;
}

SectionSpec default_section(const MassActionSystem& sys, const Eigen::VectorXd& equilibrium,
                            const ReductionOptions& red) {
  SectionSpec spec;
  spec.anchor = equilibrium;
  spec.direction = +1;
  const Eigen::MatrixXd& basis = sys.class_basis();
  Eigen::VectorXd normal;
  if (sys.dim() == 3 || sys.dim() == 4) {
    Eigen::Matrix3d jr = reduced_jacobian(sys, equilibrium, red);
    Eigen::EigenSolver<Eigen::Matrix3d> es(jr);
    double scale = 1e-12;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
    for (int i = 0; i < 3; ++i) {
      if (es.eigenvalues()[i].imag() > 1e-9 * scale) {
        Eigen::Vector3d re = es.eigenvectors().col(i).real();
        normal = reduction_embedding(sys, red) * re;
        break;
      }
    }
  }
  if (normal.size() == 0 || normal.norm() < 1e-12) {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(sys.dim());
    e1[0] = 1.0;
    normal = basis * (basis.transpose() * e1);
  }
  spec.normal = normal.normalized();
  return spec;
}

Eigen::MatrixXd section_frame(const MassActionSystem& sys, const SectionSpec& section) {
  const Eigen::MatrixXd& basis = sys.class_basis();
  Eigen::MatrixXd m = basis - section.normal * (section.normal.transpose() * basis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  int k = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-9) ++k;
  return svd.matrixU().leftCols(k);
}

namespace {

struct CrossingEvent {
  double t = 0;
  Eigen::VectorXd x;
};

// Direction-filtered section-crossing detector over accepted steps.
class SectionObserver {
 public:
  SectionObserver(const SectionSpec& s, double escape_eps)
      : s_(s), escape_eps_(escape_eps) {}

  void reset(const Eigen::VectorXd& x0) {
    sigma_prev_ = sigma(x0);
    escaped_ = std::abs(sigma_prev_) > escape_eps_;
  }

  double sigma(const Eigen::VectorXd& x) const {
    return s_.direction * s_.normal.dot(x - s_.anchor);
  }

  // Call after each accepted step.
  std::optional<CrossingEvent> check(const Dopri5& st) {
    double sig = sigma(st.state());
    std::optional<CrossingEvent> hit;
    if (escaped_ && sigma_prev_ < 0.0 && sig >= 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
        double mid = 0.5 * (lo + hi);
        if (sigma(st.dense(mid)) < 0.0)
          lo = mid;
        else
          hi = mid;
      }
      CrossingEvent ev;
      ev.t = st.prev_time() + hi * (st.time() - st.prev_time());
      ev.x = st.dense(hi);
      hit = std::move(ev);
    }
    if (std::abs(sig) > escape_eps_) escaped_ = true;
    sigma_prev_ = sig;
    return hit;
  }

 private:
  const SectionSpec& s_;
  double escape_eps_;
  double sigma_prev_ = 0;
  bool escaped_ = false;
};

std::optional<CrossingEvent> return_to_section(const MassActionSystem& sys,
                                               const SectionSpec& section,
                                               const Eigen::VectorXd& x0, double t_max,
                                               const IntegratorOptions& opts) {
  Dopri5 st = make_stepper(sys, x0, opts);
  double escape = 1e-9 * (1.0 + section.anchor.norm());
  SectionObserver obs(section, escape);
  obs.reset(x0);
  while (st.advance(t_max)) {
    if (auto ev = obs.check(st)) return ev;
  }
  return std::nullopt;
}

// Flow map over a fixed time, optionally collecting uniform dense samples.
Eigen::VectorXd flow_for(const MassActionSystem& sys, const Eigen::VectorXd& x0,
                         double t_span, const IntegratorOptions& opts,
                         int samples = 0, std::vector<double>* times = nullptr,
                         std::vector<Eigen::VectorXd>* states = nullptr) {
  Dopri5 st = make_stepper(sys, x0, opts);
  int next = 0;
  while (st.advance(t_span)) {
    if (samples > 0) {
      while (next < samples) {
        double target = t_span * next / samples;
        if (target > st.time() + 1e-300) break;
        double span = st.time() - st.prev_time();
        double theta = span > 0 ? (target - st.prev_time()) / span : 1.0;
        times->push_back(target);
        states->push_back(st.dense(std::clamp(theta, 0.0, 1.0)));
        ++next;
      }
    }
  }
  return st.state();
}

// Return-map Jacobian in on-section coordinates by one-sided differences.
void return_map_jacobian(const MassActionSystem& sys, const SectionSpec& section,
                         const Eigen::VectorXd& fixed_point, double period,
                         const CycleSearchOptions& opts, LimitCycleReport& rep) {
  Eigen::MatrixXd u = section_frame(sys, section);
  const int k = static_cast<int>(u.cols());
  double t_ret = std::max(10.0 * period, 50.0);
  auto p0 = return_to_section(sys, section, fixed_point, t_ret, opts.refine_integrator);
  if (!p0) return;
  double eps = 1e-6 * (1.0 + fixed_point.norm());
  Eigen::MatrixXd dp(k, k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd xj = fixed_point + eps * u.col(j);
    auto pj = return_to_section(sys, section, xj, t_ret, opts.refine_integrator);
    if (!pj) return;
    dp.col(j) = u.transpose() * (pj->x - p0->x) / eps;
  }
  rep.return_map_jacobian = dp;
  Eigen::EigenSolver<Eigen::MatrixXd> es(dp);
  rep.multipliers.clear();
  double radius = 0.0;
  for (int i = 0; i < k; ++i) {
    rep.multipliers.push_back(es.eigenvalues()[i]);
    radius = std::max(radius, std::abs(es.eigenvalues()[i]));
  }
  rep.spectral_radius = radius;
  if (radius < 1.0 - opts.multiplier_band)
    rep.stability = CycleStability::Stable;
  else if (radius > 1.0 + opts.multiplier_band)
    rep.stability = CycleStability::Unstable;
  else
    rep.stability = CycleStability::Inconclusive;
}

void finish_cycle_report(const MassActionSystem& sys, const SectionSpec& section,
                         const Eigen::VectorXd& fixed_point, double period,
                         const CycleSearchOptions& opts, LimitCycleReport& rep) {
  rep.outcome = CycleOutcome::Cycle;
  rep.section_fixed_point = fixed_point;
  rep.period = period;
  Eigen::VectorXd back = flow_for(sys, fixed_point, period, opts.refine_integrator,
                                  opts.cycle_samples, &rep.cycle_times, &rep.cycle_points);
  rep.residual = (back - fixed_point).norm();
  return_map_jacobian(sys, section, fixed_point, period, opts, rep);
}

LimitCycleReport detect_cycle(const MassActionSystem& sys, const Eigen::VectorXd& seed,
                              const SectionSpec& section, const CycleSearchOptions& opts,
                              bool full_report) {
  LimitCycleReport rep;
  Dopri5 st = make_stepper(sys, seed, opts.integrator);
  double anchor_scale = 1.0 + section.anchor.norm();
  double capture = opts.capture_radius_rel * anchor_scale;
  SectionObserver obs(section, 1e-9 * anchor_scale);
  obs.reset(seed);

  std::optional<CrossingEvent> prev;
  int crossings = 0;
  while (st.advance(opts.t_max)) {
    if ((st.state() - section.anchor).norm() < capture) {
      rep.outcome = CycleOutcome::EquilibriumCapture;
      rep.note = "trajectory entered the equilibrium capture ball";
      return rep;
    }
    auto ev = obs.check(st);
    if (!ev || st.time() < opts.t_transient) continue;
    ++crossings;
    if (prev) {
      double delta = (ev->x - prev->x).norm();
      if (delta <= opts.crossing_tol) {
        double radius = (ev->x - section.anchor).norm();
        if (radius < 1e-4 * anchor_scale) {
          rep.outcome = CycleOutcome::EquilibriumCapture;
          rep.note = "section crossings collapsed onto the equilibrium";
          return rep;
        }
        double period = ev->t - prev->t;
        if (full_report) {
          // Newton shooting sharpens the crossing-converged point; weakly
          // attracting cycles otherwise inherit the crossing tolerance
          // inflated by 1/(1 - multiplier).
          LimitCycleReport polished =
              refine_cycle_newton(sys, section, ev->x, period, opts);
          if (polished.outcome == CycleOutcome::Cycle) return polished;
          finish_cycle_report(sys, section, ev->x, period, opts, rep);
        } else {
          rep.outcome = CycleOutcome::Cycle;
          rep.section_fixed_point = ev->x;
          rep.period = period;
        }
        return rep;
      }
    }
    prev = ev;
    if (crossings >= opts.max_crossings) break;
  }
  rep.outcome = CycleOutcome::Inconclusive;
  rep.note = "crossings did not converge within the time budget";
  if (prev) rep.section_fixed_point = prev->x;
  return rep;
}

}  // namespace

LimitCycleReport find_limit_cycle(const MassActionSystem& sys, const Eigen::VectorXd& seed,
                                  const SectionSpec& section, const CycleSearchOptions& opts) {
  return detect_cycle(sys, seed, section, opts, true);
}

LimitCycleReport refine_cycle_newton(const MassActionSystem& sys, const SectionSpec& section,
                                     const Eigen::VectorXd& guess, double period_guess,
                                     const CycleSearchOptions& opts) {
  LimitCycleReport rep;
  Eigen::MatrixXd u = section_frame(sys, section);
  const int k = static_cast<int>(u.cols());
  Eigen::VectorXd base =
      guess - section.normal * section.normal.dot(guess - section.anchor);
  if ((base.array() <= 0.0).any()) {
    rep.note = "guess projects outside the positive orthant";
    return rep;
  }
  double t_ret = std::max(10.0 * std::max(period_guess, 1.0), 100.0);
  double scale = 1.0 + base.norm();

  auto displacement = [&](const Eigen::VectorXd& uu,
                          double& full_res) -> std::optional<Eigen::VectorXd> {
    Eigen::VectorXd xt = base + u * uu;
    if ((xt.array() <= 0.0).any()) return std::nullopt;
    auto ret = return_to_section(sys, section, xt, t_ret, opts.refine_integrator);
    if (!ret) return std::nullopt;
    full_res = (ret->x - xt).norm();
    return u.transpose() * (ret->x - xt);
  };

  Eigen::VectorXd uu = Eigen::VectorXd::Zero(k);
  double full_res = 0.0;
  auto f0 = displacement(uu, full_res);
  if (!f0) {
    rep.note = "return map undefined at the guess";
    return rep;
  }
  Eigen::VectorXd fval = *f0;
  const double eps = 1e-7 * scale;
  for (int it = 0; it < 30; ++it) {
    if (full_res <= 1e-9 * scale) break;
    Eigen::MatrixXd jac(k, k);
    for (int j = 0; j < k; ++j) {
      double dummy;
      auto fj = displacement(uu + eps * Eigen::VectorXd::Unit(k, j), dummy);
      if (!fj) {
        rep.note = "return map undefined during differencing";
        return rep;
      }
      jac.col(j) = (*fj - fval) / eps;
    }
    Eigen::VectorXd du = jac.fullPivLu().solve(-fval);
    bool accepted = false;
    for (double alpha : {1.0, 0.5, 0.25, 0.125}) {
      double res_try;
      auto ft = displacement(uu + alpha * du, res_try);
      if (ft && (res_try < full_res || res_try <= 1e-9 * scale)) {
        uu += alpha * du;
        fval = *ft;
        full_res = res_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.note = "newton step failed to reduce the residual";
      return rep;
    }
    if (uu.norm() > 1e3 * scale) {
      rep.note = "newton iterates diverged";
      return rep;
    }
  }
  if (full_res > 1e-9 * scale) {
    rep.note = "newton did not reach the shooting tolerance";
    return rep;
  }
  Eigen::VectorXd fixed_point = base + u * uu;
  auto ret = return_to_section(sys, section, fixed_point, t_ret, opts.refine_integrator);
  if (!ret) {
    rep.note = "return map undefined at the solution";
    return rep;
  }
  finish_cycle_report(sys, section, fixed_point, ret->t, opts, rep);
  rep.residual = full_res;
  return rep;
}

std::string to_string(Fate f) {
  switch (f) {
    case Fate::Equilibrium: return "equilibrium";
    case Fate::Cycle: return "cycle";
    case Fate::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

Fate fate_of(CycleOutcome o) {
  switch (o) {
    case CycleOutcome::Cycle: return Fate::Cycle;
    case CycleOutcome::EquilibriumCapture: return Fate::Equilibrium;
    default: return Fate::Inconclusive;
  }
}

}  // namespace

BistabilityReport bistability_probe(const MassActionSystem& sys,
                                    const Eigen::VectorXd& equilibrium,
                                    const BistabilityOptions& opts) {
  StabilityReport stab = classify_equilibrium(sys, equilibrium);
  if (stab.classification != StabilityClass::Stable)
    throw std::invalid_argument(
        "bistability probe requires a stable equilibrium (got " +
        to_string(stab.classification) + ")");

  SectionSpec section = default_section(sys, equilibrium);
  Eigen::VectorXd dir = section.normal;
  double scale = equilibrium.norm();
  // Largest multiple of dir keeping the start strictly positive.
  double r_cap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < equilibrium.size(); ++i)
    if (dir[i] < 0.0) r_cap = std::min(r_cap, -equilibrium[i] / dir[i]);

  BistabilityReport rep;
  auto start_at = [&](double radius) { return (equilibrium + radius * dir).eval(); };
  auto fate_at = [&](double radius) {
    return fate_of(detect_cycle(sys, start_at(radius), section, opts.cycles, false).outcome);
  };

  for (double rr : opts.radii) {
    double radius = std::min(rr * scale, 0.9 * r_cap);
    rep.radii.push_back(radius);
    rep.fates.push_back(fate_at(radius));
  }
  rep.inner_fate = rep.fates.front();
  rep.outer_fate = rep.fates.back();
  rep.separatrix_evidence =
      rep.inner_fate == Fate::Equilibrium && rep.outer_fate == Fate::Cycle;

  if (rep.outer_fate == Fate::Cycle)
    rep.stable_cycle =
        find_limit_cycle(sys, start_at(rep.radii.back()), section, opts.cycles);

  if (rep.separatrix_evidence) {
    // Bracket the separatrix radius between the last equilibrium fate and
    // the first cycle fate, then shoot for the unstable cycle from the
    // lingering mid-bracket trajectory.
    double r_eq = rep.radii.front(), r_cy = rep.radii.back();
    for (std::size_t i = 0; i + 1 < rep.radii.size(); ++i)
      if (rep.fates[i] == Fate::Equilibrium && rep.fates[i + 1] == Fate::Cycle) {
        r_eq = rep.radii[i];
        r_cy = rep.radii[i + 1];
        break;
      }
    for (int it = 0; it < opts.bracket_bisections; ++it) {
      double mid = 0.5 * (r_eq + r_cy);
      Fate f = fate_at(mid);
      if (f == Fate::Equilibrium)
        r_eq = mid;
      else if (f == Fate::Cycle)
        r_cy = mid;
      else
        break;
    }
    // Crossings of the near-separatrix trajectory approximate the unstable
    // cycle; try a few of them as Newton seeds.
    Eigen::VectorXd x0 = start_at(0.5 * (r_eq + r_cy));
    Dopri5 st = make_stepper(sys, x0, opts.cycles.integrator);
    SectionObserver obs(section, 1e-9 * (1.0 + equilibrium.norm()));
    obs.reset(x0);
    std::vector<CrossingEvent> crossings;
    while (st.advance(opts.cycles.t_max) && crossings.size() < 6) {
      if (auto ev = obs.check(st)) crossings.push_back(*ev);
    }
    for (std::size_t i = 1; i + 1 < crossings.size() && !rep.unstable_cycle; ++i) {
      double period_guess = crossings[i + 1].t - crossings[i].t;
      LimitCycleReport attempt = refine_cycle_newton(sys, section, crossings[i].x,
                                                     period_guess, opts.cycles);
      if (attempt.outcome == CycleOutcome::Cycle) rep.unstable_cycle = attempt;
    }
  }
  return rep;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::log_uniform(double lo, double hi) {
  return lo * std::exp(uniform() * std::log(hi / lo));
}

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

PermanenceReport permanence_probe(const MassActionSystem& sys, const Eigen::VectorXd& anchor,
                                  int num_samples, double t_transient, double t_window,
                                  std::uint64_t seed, const IntegratorOptions& opts) {
  if ((anchor.array() <= 0.0).any())
    throw std::invalid_argument("permanence probe needs a strictly positive anchor");
  const int n = sys.dim();
  Rng rng(seed);
  auto d_opt = conservation_vector(sys.network());
  Eigen::VectorXd d;
  double level = 0.0;
  if (d_opt) {
    d.resize(n);
    for (int i = 0; i < n; ++i) d[i] = (*d_opt)[i].to_double();
    level = d.dot(anchor);
  }

  auto draw_start = [&](int index) {
    Eigen::VectorXd x(n);
    int boundary_coord = index < n ? index : -1;  // first n starts hug a face
    if (d.size()) {
      for (int i = 0; i < n; ++i) x[i] = -std::log(1.0 - rng.uniform());
      if (boundary_coord >= 0) {
        double rest = level - d[boundary_coord] * 1e-6;
        double mass = 0.0;
        for (int i = 0; i < n; ++i)
          if (i != boundary_coord) mass += d[i] * x[i];
        for (int i = 0; i < n; ++i)
          if (i != boundary_coord) x[i] *= rest / mass;
        x[boundary_coord] = 1e-6;
      } else {
        double mass = d.dot(x);
        x *= level / mass;
      }
    } else {
      for (int i = 0; i < n; ++i) x[i] = anchor[i] * rng.log_uniform(0.1, 10.0);
      if (boundary_coord >= 0) x[boundary_coord] = 1e-6;
    }
    return x;
  };

  PermanenceReport rep;
  rep.seed = seed;
  double total = t_transient + t_window;
  for (int s = 0; s < num_samples; ++s) {
    Eigen::VectorXd x0 = draw_start(s);
    Dopri5 st = make_stepper(sys, x0, opts);
    double floor = std::numeric_limits<double>::infinity();
    while (st.advance(total)) {
      if (st.time() >= t_transient)
        floor = std::min(floor, st.state().minCoeff());
    }
    rep.floors.push_back(floor);
  }
  rep.floor = *std::min_element(rep.floors.begin(), rep.floors.end());
  return rep;
}

}  // namespace crn
