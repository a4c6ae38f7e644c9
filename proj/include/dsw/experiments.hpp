#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dsw/bump.hpp"
#include "dsw/integrator.hpp"
#include "dsw/oracles.hpp"

namespace dsw {

// Theorem-level experiments: lifespan sweeps over the data size, the
// t-frame vs tau-frame cross-check of the extremal surface equation, grid
// convergence studies, and the first-variation probe of the area functional.

/// One row of a lifespan sweep. A censored record reached t_end without any
/// detection event, so its lifespan estimate is only a lower bound.
struct SweepRecord {
  double eps = 0.0;
  double alpha = 1.0;
  double lifespan_estimate = 0.0;
  bool censored = false;
  std::optional<BlowUpCriterion> criterion;
  double h = 0.0;
  double dt_max = 0.0;
};

/// Least-squares slope of log T against log eps over uncensored records.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  int records_used = 0;
};

struct SweepSetup {
  GridSpec grid;
  BumpProfile profile_f;
  BumpProfile profile_g;
  double margin = 0.5;
  StepControl control;
  int n = 1;
};

struct SweepOutcome {
  std::vector<SweepRecord> records;
  std::optional<FitResult> fit; // absent when fewer than 3 uncensored records
};

/// Fit log T = slope * log eps + intercept over the uncensored records only.
inline std::optional<FitResult> fit_lifespan(const std::vector<SweepRecord>& records) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.censored || !(r.eps > 0.0) || !(r.lifespan_estimate > 0.0)) continue;
    x.push_back(std::log(r.eps));
    y.push_back(std::log(r.lifespan_estimate));
  }
  if (x.size() < 3) return std::nullopt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double m = static_cast<double>(x.size());
  double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return std::nullopt;
  FitResult fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.records_used = static_cast<int>(x.size());
  return fit;
}

/// One evolution per eps with the generalized equation at the given alpha.
inline SweepOutcome lifespan_sweep(double alpha, const std::vector<double>& eps_list,
                                   const SweepSetup& setup) {
  EquationKind eq{Variant::GeneralizedExtremal, setup.n, alpha};
  eq.validate();
  SweepOutcome out;
  MonitorSet monitors;
  monitors.energy = false; // sweeps only need the detection machinery
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw ConfigError("sweep: eps values must be > 0");
    Field data = make_initial_data(setup.profile_f, setup.profile_g, eps, setup.grid,
                                   setup.margin);
    auto run = evolve(data, eq, setup.control, monitors);
    SweepRecord record;
    record.eps = eps;
    record.alpha = alpha;
    record.censored = !run.blew_up();
    record.lifespan_estimate = run.blew_up() ? run.t_detect : setup.control.t_end;
    record.criterion = run.criterion;
    record.h = setup.grid.spacing();
    record.dt_max = setup.control.dt_max;
    out.records.push_back(record);
  }
  out.fit = fit_lifespan(out.records);
  return out;
}

struct CrosscheckSetup {
  GridSpec grid; // 1D
  BumpProfile profile_f;
  BumpProfile profile_g;
  double eps = 0.01;
  double margin = 0.5;
  double t_final = 4.0;
  double cfl = 0.5;
  double dt_max = 1.0; // generous: let CFL govern so refinement scales dt
  int checkpoints = 4;
};

struct CrosscheckReport {
  std::vector<double> check_times;        // coordinate times
  std::vector<double> discrepancies;      // max-norm |phi_t-frame - phi_tau-frame|
  double max_discrepancy = 0.0;
};

/// Evolve the extremal surface equation in coordinate time and its
/// Born-Infeld form in tau = -2 e^{-t/2} from identical data (phi_tau equals
/// phi_t at tau = -2), and compare phi at matched times. Two independent
/// discretizations of one equation: the gap measures discretization error.
inline CrosscheckReport coordinate_crosscheck(const CrosscheckSetup& setup) {
  if (setup.grid.dims != 1)
    throw ConfigError("crosscheck: requires a 1D grid");
  Field data = make_initial_data(setup.profile_f, setup.profile_g, setup.eps, setup.grid,
                                 setup.margin);
  EquationKind eq_t{Variant::ExtremalSurface, 1, 1.0};
  EquationKind eq_tau{Variant::BornInfeldTau, 1, 1.0};
  MonitorSet monitors;
  monitors.energy = false;

  CrosscheckReport report;
  Field state_t = data;
  Field state_tau = data; // phi_tau(tau=-2) = phi_t(t=0)
  double t_prev = 0.0;
  for (int k = 1; k <= setup.checkpoints; ++k) {
    double t_k = setup.t_final * static_cast<double>(k) /
                 static_cast<double>(setup.checkpoints);
    StepControl ctrl_t;
    ctrl_t.cfl = setup.cfl;
    ctrl_t.dt_max = setup.dt_max;
    ctrl_t.t_start = t_prev;
    ctrl_t.t_end = t_k;
    auto run_t = evolve(state_t, eq_t, ctrl_t, monitors);
    if (run_t.status != RunStatus::Completed)
      throw DegeneracyError(DegeneracyError::Kind::TimelikeViolation, 0, 0.0,
                            run_t.t_detect);

    StepControl ctrl_tau;
    ctrl_tau.cfl = setup.cfl;
    ctrl_tau.dt_max = setup.dt_max;
    ctrl_tau.t_start = -2.0 * std::exp(-0.5 * t_prev);
    ctrl_tau.t_end = -2.0 * std::exp(-0.5 * t_k);
    auto run_tau = evolve(state_tau, eq_tau, ctrl_tau, monitors);
    if (run_tau.status != RunStatus::Completed)
      throw DegeneracyError(DegeneracyError::Kind::TimelikeViolation, 0, 0.0,
                            run_tau.t_detect);

    state_t = run_t.final_state;
    state_tau = run_tau.final_state;
    double diff = max_abs_diff(state_t.phi, state_tau.phi);
    report.check_times.push_back(t_k);
    report.discrepancies.push_back(diff);
    report.max_discrepancy = std::max(report.max_discrepancy, diff);
    t_prev = t_k;
  }
  return report;
}

struct ConvergenceSetup {
  EquationKind eq;
  GridSpec grid; // coarsest level
  BumpProfile profile_f;
  BumpProfile profile_g;
  double eps = 0.01;
  double margin = 0.5;
  StepControl control; // dt_max is rescaled with h per level
  int levels = 3;
};

struct ConvergenceReport {
  std::vector<double> diffs;  // rms of u_l - u_{l+1} on the coarsest lattice
  std::vector<double> orders; // log2(diffs[k]/diffs[k+1])
  bool degenerate = false;    // identically zero differences (e.g. zero data)
};

/// Richardson-style order measurement: evolve on nested lattices
/// (points-1 doubling per level, dt_max halving), restrict to the coarsest
/// lattice and compare final states in the rms norm (the max norm is noisy
/// where the bump's high derivatives concentrate). Refuses runs that did
/// not complete.
inline ConvergenceReport convergence_study(const ConvergenceSetup& setup) {
  if (setup.levels < 3) throw ConfigError("converge.levels: must be >= 3");
  MonitorSet monitors;
  monitors.energy = false;

  std::vector<std::vector<double>> finals; // restricted to the coarsest lattice
  const std::size_t coarse_total = setup.grid.size();
  for (int level = 0; level < setup.levels; ++level) {
    GridSpec grid = setup.grid;
    grid.points = (setup.grid.points - 1) * (1 << level) + 1;
    StepControl ctrl = setup.control;
    ctrl.dt_max = setup.control.dt_max / static_cast<double>(1 << level);
    Field data = make_initial_data(setup.profile_f, setup.profile_g, setup.eps, grid,
                                   setup.margin);
    auto run = evolve(data, setup.eq, ctrl, monitors);
    if (run.status != RunStatus::Completed)
      throw ConfigError("converge: level " + std::to_string(level) +
                        " did not complete (event at t=" + std::to_string(run.t_detect) +
                        "); refine past blow-up is not meaningful");

    const int stride = 1 << level;
    std::vector<double> restricted(coarse_total);
    for (std::size_t i = 0; i < coarse_total; ++i) {
      auto c = setup.grid.unflatten(i);
      std::array<int, 3> fine_c{c[0] * stride, c[1] * stride, c[2] * stride};
      restricted[i] = run.final_state.phi[grid.flatten(fine_c)];
    }
    finals.push_back(std::move(restricted));
  }

  ConvergenceReport report;
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < coarse_total; ++i) {
      double d = finals[k][i] - finals[k + 1][i];
      sum += d * d;
    }
    report.diffs.push_back(std::sqrt(sum / static_cast<double>(coarse_total)));
  }
  report.degenerate =
      std::all_of(report.diffs.begin(), report.diffs.end(), [](double d) { return d == 0.0; });
  if (!report.degenerate)
    for (std::size_t k = 0; k + 1 < report.diffs.size(); ++k)
      report.orders.push_back(std::log2(report.diffs[k] / report.diffs[k + 1]));
  return report;
}

/// Smooth spacetime perturbation eta(t, x) = bump(t - t_center) * bump(|x|),
/// compactly supported inside an evolution slab.
struct SlabPerturbation {
  BumpProfile time_profile;
  double time_center = 0.0;
  BumpProfile space_profile;

  double value(double t, double r) const {
    return time_profile.value(t - time_center) * space_profile.value(r);
  }
  double time_derivative(double t, double r) const {
    return time_profile.radial_derivative(t - time_center) * space_profile.value(r);
  }
};

/// Central estimate of the first variation of the area functional along eta:
///   (I[phi + s eta] - I[phi - s eta]) / (2s).
/// Near zero (O(h^2) + O(s^2)) at a solution of the extremal surface
/// equation, O(1) at a generic non-solution.
inline double area_first_variation(const std::vector<StateSnapshot>& trajectory,
                                   const GridSpec& grid, const SlabPerturbation& eta,
                                   double s) {
  auto perturbed = [&](double sign) {
    std::vector<StateSnapshot> shifted = trajectory;
    for (auto& snap : shifted) {
      for (std::size_t i = 0; i < snap.phi.size(); ++i) {
        double r = grid.radius(i);
        snap.phi[i] += sign * s * eta.value(snap.t, r);
        snap.phi_t[i] += sign * s * eta.time_derivative(snap.t, r);
      }
    }
    return area_functional(shifted, grid);
  };
  return (perturbed(1.0) - perturbed(-1.0)) / (2.0 * s);
}

} // namespace dsw
