#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "dsw/array_ops.hpp"
#include "dsw/energy.hpp"
#include "dsw/equations.hpp"
#include "dsw/grid.hpp"

namespace dsw {

/// Time stepping policy. The admissible step at time t is
///   dt = min(dt_max, cfl * h / wave_speed(t)),
/// so it grows like e^{t/2} in coordinate time until dt_max caps it.
struct StepControl {
  double cfl = 0.5;
  double dt_max = 0.01;
  double t_start = 0.0; // -2 for tau-frame runs
  double t_end = 1.0;
  int snapshot_stride = 0;        // 0: first/last only
  double amplitude_cap = 1e6;     // |phi| or |phi_t| beyond this is blow-up

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("control.cfl: must be in (0, 1]");
    if (!(dt_max > 0.0)) throw ConfigError("control.dt_max: must be > 0");
    if (!(t_end > t_start)) throw ConfigError("control.t_end: must exceed t_start");
    if (snapshot_stride < 0) throw ConfigError("control.snapshot_stride: must be >= 0");
    if (!(amplitude_cap > 0.0)) throw ConfigError("control.amplitude_cap: must be > 0");
  }
};

struct MonitorSet {
  bool energy = true;
  DerivIndexCap cap;
};

enum class RunStatus { Completed, BlowUp, StepFailure };

enum class BlowUpCriterion {
  DenominatorDegenerate,
  TimelikeViolation,
  AmplitudeThreshold,
  NonFinite
};

inline const char* criterion_name(BlowUpCriterion c) {
  switch (c) {
    case BlowUpCriterion::DenominatorDegenerate: return "denominator_degenerate";
    case BlowUpCriterion::TimelikeViolation: return "timelike_violation";
    case BlowUpCriterion::AmplitudeThreshold: return "amplitude_threshold";
    case BlowUpCriterion::NonFinite: return "non_finite";
  }
  return "?";
}

struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  std::optional<BlowUpCriterion> criterion;
  double t_detect = 0.0;     // first detection time (estimate of the lifespan)
  double t_certified = 0.0;  // last accepted state known good
  double final_time = 0.0;
  std::size_t steps = 0;
  Field final_state;
  std::vector<StateSnapshot> trajectory;
  std::vector<EnergyReport> energy_series;

  bool blew_up() const { return status == RunStatus::BlowUp; }
};

inline constexpr double kDtMin = 1e-13;

/// One classical Runge-Kutta step of the first-order system
/// (phi, phi_t)' = (phi_t, acceleration). Degeneracy errors from stage
/// evaluations propagate with the stage time attached.
inline Field rk4_step(const Field& field, double t, double dt, const EquationKind& eq) {
  if (!(dt > 0.0)) throw ContractError("rk4_step: dt must be > 0");
  const std::vector<double>& k1p = field.phi_t;
  auto k1v = acceleration(field, t, eq);

  Field stage(field.grid);
  stage.phi = add_scaled(field.phi, 0.5 * dt, k1p);
  stage.phi_t = add_scaled(field.phi_t, 0.5 * dt, k1v);
  auto k2p = stage.phi_t;
  auto k2v = acceleration(stage, t + 0.5 * dt, eq);

  stage.phi = add_scaled(field.phi, 0.5 * dt, k2p);
  stage.phi_t = add_scaled(field.phi_t, 0.5 * dt, k2v);
  auto k3p = stage.phi_t;
  auto k3v = acceleration(stage, t + 0.5 * dt, eq);

  stage.phi = add_scaled(field.phi, dt, k3p);
  stage.phi_t = add_scaled(field.phi_t, dt, k3v);
  auto k4p = stage.phi_t;
  auto k4v = acceleration(stage, t + dt, eq);

  Field next(field.grid);
  const double w = dt / 6.0;
  next.phi = field.phi;
  next.phi_t = field.phi_t;
  for (std::size_t i = 0; i < next.phi.size(); ++i) {
    next.phi[i] += w * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
    next.phi_t[i] += w * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
  }
  return next;
}

namespace detail {

struct Detection {
  bool fired = false;
  BlowUpCriterion criterion = BlowUpCriterion::NonFinite;
};

/// Post-step checks on an accepted state, cheapest first.
inline Detection detect_event(const Field& field, double t, const EquationKind& eq,
                              const StepControl& ctrl) {
  if (!field.is_finite()) return {true, BlowUpCriterion::NonFinite};
  if (max_abs(field.phi) > ctrl.amplitude_cap || max_abs(field.phi_t) > ctrl.amplitude_cap)
    return {true, BlowUpCriterion::AmplitudeThreshold};
  switch (eq.variant) {
    case Variant::GeneralizedExtremal: {
      auto status = timelike_status(field, t, eq.alpha);
      if (status.min_denominator <= kDegeneracyThreshold)
        return {true, BlowUpCriterion::DenominatorDegenerate};
      break;
    }
    case Variant::ExtremalSurface: {
      auto status = timelike_status(field, t, 1.0);
      if (status.min_determinant_factor <= kDegeneracyThreshold)
        return {true, BlowUpCriterion::TimelikeViolation};
      break;
    }
    case Variant::BornInfeldTau: {
      auto px = gradient_axis(field.phi, field.grid, 0);
      for (std::size_t i = 0; i < px.size(); ++i) {
        double arg = 1.0 + px[i] * px[i] - field.phi_t[i] * field.phi_t[i];
        if (arg <= kDegeneracyThreshold) return {true, BlowUpCriterion::TimelikeViolation};
      }
      break;
    }
    default: break;
  }
  return {};
}

inline BlowUpCriterion criterion_of(const DegeneracyError& err) {
  return err.kind() == DegeneracyError::Kind::DenominatorDegenerate
             ? BlowUpCriterion::DenominatorDegenerate
             : BlowUpCriterion::TimelikeViolation;
}

} // namespace detail

/// Method-of-lines evolution from t_start to t_end or the first detection
/// event. Snapshots are stored every snapshot_stride accepted steps (always
/// including the initial and final states); when the energy monitor is on,
/// an energy sample is taken at every accepted step. A stage-level
/// degeneracy aborts the step and is retried once with dt/2 before the event
/// is declared.
inline RunOutcome evolve(const Field& init, const EquationKind& eq,
                         const StepControl& ctrl, const MonitorSet& monitors = {}) {
  eq.validate();
  ctrl.validate();
  init.grid.validate();
  if (eq.is_tau_frame() && init.grid.dims != 1)
    throw ConfigError("equation: tau-frame runs require a 1D grid");

  const double h = init.grid.spacing();
  const bool sample_energy = monitors.energy && !eq.is_tau_frame();

  RunOutcome outcome;
  outcome.final_state = init;
  double t = ctrl.t_start;

  auto push_snapshot = [&](const Field& f, double time) {
    outcome.trajectory.push_back({time, f.phi, f.phi_t});
  };
  auto push_energy = [&](const Field& f, double time) {
    if (!sample_energy) return;
    outcome.energy_series.push_back(energy_sample(f, time, eq, monitors.cap));
  };

  push_snapshot(init, t);
  auto initial_event = detail::detect_event(init, t, eq, ctrl);
  if (initial_event.fired) {
    outcome.status = RunStatus::BlowUp;
    outcome.criterion = initial_event.criterion;
    outcome.t_detect = t;
    outcome.t_certified = t;
    outcome.final_time = t;
    return outcome;
  }
  push_energy(init, t);

  Field field = init;
  while (t < ctrl.t_end - 1e-12 * std::max(1.0, std::abs(ctrl.t_end))) {
    double dt = std::min(ctrl.dt_max, ctrl.cfl * h / wave_speed(eq, t));
    dt = std::min(dt, ctrl.t_end - t);
    if (dt < kDtMin) {
      outcome.status = RunStatus::StepFailure;
      outcome.final_time = t;
      outcome.t_certified = t;
      outcome.final_state = field;
      return outcome;
    }

    Field next(field.grid);
    double dt_used = dt;
    try {
      next = rk4_step(field, t, dt, eq);
    } catch (const DegeneracyError&) {
      // transient stage overshoot? one retry at half step
      dt_used = 0.5 * dt;
      try {
        next = rk4_step(field, t, dt_used, eq);
      } catch (const DegeneracyError& err) {
        outcome.status = RunStatus::BlowUp;
        outcome.criterion = detail::criterion_of(err);
        outcome.t_detect = err.time();
        outcome.t_certified = t;
        outcome.final_time = t;
        outcome.final_state = field;
        return outcome;
      }
    }

    double t_next = t + dt_used;
    ++outcome.steps;

    auto event = detail::detect_event(next, t_next, eq, ctrl);
    if (event.fired) {
      outcome.status = RunStatus::BlowUp;
      outcome.criterion = event.criterion;
      outcome.t_detect = t_next;
      outcome.t_certified = t;
      outcome.final_time = t;
      outcome.final_state = field;
      if (next.is_finite()) push_snapshot(next, t_next);
      return outcome;
    }

    field = std::move(next);
    t = t_next;
    push_energy(field, t);
    if (ctrl.snapshot_stride > 0 &&
        outcome.steps % static_cast<std::size_t>(ctrl.snapshot_stride) == 0)
      push_snapshot(field, t);
  }

  if (outcome.trajectory.empty() || outcome.trajectory.back().t != t)
    push_snapshot(field, t);
  outcome.status = RunStatus::Completed;
  outcome.final_time = t;
  outcome.t_certified = t;
  outcome.t_detect = t;
  outcome.final_state = std::move(field);
  return outcome;
}

} // namespace dsw
