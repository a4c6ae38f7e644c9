#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dsw/array_ops.hpp"
#include "dsw/equations.hpp"
#include "dsw/grid.hpp"
#include "dsw/stencils.hpp"

namespace dsw {

// Slice energies of derivatives of the state, with the slice volume form
// e^{nt/2} dx:
//   E0 = 1/2 int (d_t v)^2 dVol,   E1 = 1/2 int e^{-t} |grad v|^2 dVol,
// for v = d_t^{i0} D^I phi. The weighted energy is f = E e^{(2-n)t/2}; the
// flat (Lebesgue) energies obey e0 = E0 e^{-nt/2} and e1 = E1 e^{-(n-2)t/2}.
//
// The gradient inside E1 is the forward difference, the summation-by-parts
// partner of the evolved 3-point Laplacian. With that pairing the zeroth
// order balance of the linear equation,
//   dE/dt = -((n+4)/2) E0 + ((n-2)/2) E1,
// holds exactly for the semidiscrete flow (compact support or periodic),
// so monitored residuals isolate time sampling and integration error.

/// Which derivatives to track: all multi-indices with |I| + i0 <= max_total,
/// i0 up to max_time_order. Stencil noise grows quickly with order, so the
/// cap is held at <= 3.
struct DerivIndexCap {
  int max_total = 2;
  int max_time_order = 1; // 0 or 1

  void validate() const {
    if (max_total < 0 || max_total > 3)
      throw ConfigError("monitors.cap: max_total must be in [0, 3]");
    if (max_time_order < 0 || max_time_order > 1)
      throw ConfigError("monitors.cap: max_time_order must be 0 or 1");
  }
};

/// Energies aggregated over all spatial multi-indices of one order.
struct EnergyEntry {
  int order = 0;      // |I|
  int time_order = 0; // i0
  double E0 = 0.0, E1 = 0.0, E = 0.0;
  double f = 0.0;
  double e0 = 0.0, e1 = 0.0;
};

struct EnergyReport {
  double t = 0.0;
  std::vector<EnergyEntry> entries;
  double F = 0.0; // sum of f over tracked entries
  double identity_residual = std::numeric_limits<double>::quiet_NaN();
  double sup_phi_t = 0.0;
  double sup_grad = 0.0;
  double min_denominator = 0.0;
  double min_determinant_factor = 0.0;

  const EnergyEntry& entry(int order, int time_order) const {
    for (const auto& e : entries)
      if (e.order == order && e.time_order == time_order) return e;
    throw ContractError("EnergyReport: entry (" + std::to_string(order) + "," +
                        std::to_string(time_order) + ") not tracked");
  }
};

namespace detail {

/// D^I arrays for all |I| <= max_order, keyed by the sorted axis sequence.
using DerivTable = std::map<std::vector<int>, std::vector<double>>;

inline DerivTable spatial_derivatives(const std::vector<double>& base,
                                      const GridSpec& grid, int max_order) {
  DerivTable table;
  table[{}] = base;
  std::vector<std::vector<int>> frontier{{}};
  for (int k = 1; k <= max_order; ++k) {
    std::vector<std::vector<int>> next;
    for (const auto& idx : frontier) {
      int start = idx.empty() ? 0 : idx.back(); // sorted sequences only
      for (int axis = start; axis < grid.dims; ++axis) {
        std::vector<int> child = idx;
        child.push_back(axis);
        table[child] = gradient_axis(table[idx], grid, axis);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  return table;
}

inline double weighted_square_sum(const std::vector<double>& v, const GridSpec& grid) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double w = quadrature_weight(grid, i);
    sum += w * v[i] * v[i];
  }
  return sum;
}

} // namespace detail

/// One energy sample of the state. Time derivatives of tracked quantities are
/// obtained by substitution: d_t D^I phi = D^I phi_t, and d_t D^I phi_t =
/// D^I applied to the equation's acceleration, never by differencing stored
/// history.
inline EnergyReport energy_sample(const Field& field, double t, const EquationKind& eq,
                                  const DerivIndexCap& cap) {
  cap.validate();
  const GridSpec& grid = field.grid;
  const int n = eq.n;
  const double cell = std::pow(grid.spacing(), grid.dims);
  const double vol_factor = std::exp(0.5 * n * t);
  const double decay = std::exp(-t);

  auto d_phi = detail::spatial_derivatives(field.phi, grid, cap.max_total);
  auto d_phi_t = detail::spatial_derivatives(field.phi_t, grid, cap.max_total);
  detail::DerivTable d_acc;
  if (cap.max_time_order >= 1)
    d_acc = detail::spatial_derivatives(acceleration(field, t, eq), grid,
                                        std::max(0, cap.max_total - 1));

  EnergyReport report;
  report.t = t;
  for (int i0 = 0; i0 <= cap.max_time_order; ++i0) {
    for (int order = 0; order + i0 <= cap.max_total; ++order) {
      EnergyEntry entry;
      entry.order = order;
      entry.time_order = i0;
      for (const auto& [idx, dphi] : d_phi) {
        if (static_cast<int>(idx.size()) != order) continue;
        const std::vector<double>& v = (i0 == 0) ? dphi : d_phi_t.at(idx);
        const std::vector<double>& v_t = (i0 == 0) ? d_phi_t.at(idx) : d_acc.at(idx);
        entry.E0 += 0.5 * vol_factor * cell * detail::weighted_square_sum(v_t, grid);
        for (int axis = 0; axis < grid.dims; ++axis) {
          auto dv = forward_diff_axis(v, grid, axis);
          entry.E1 += 0.5 * vol_factor * cell * decay *
                      detail::weighted_square_sum(dv, grid);
        }
      }
      entry.E = entry.E0 + entry.E1;
      entry.f = entry.E * std::exp(0.5 * (2 - n) * t);
      entry.e0 = entry.E0 * std::exp(-0.5 * n * t);
      entry.e1 = entry.E1 * std::exp(-0.5 * (n - 2) * t);
      report.F += entry.f;
      report.entries.push_back(entry);
    }
  }

  report.sup_phi_t = max_abs(field.phi_t);
  auto grads = gradient(field.phi, grid);
  double sup_grad = 0.0;
  for (std::size_t i = 0; i < field.phi.size(); ++i) {
    double gs = 0.0;
    for (int d = 0; d < grid.dims; ++d) gs += grads[d][i] * grads[d][i];
    sup_grad = std::max(sup_grad, gs);
  }
  report.sup_grad = std::sqrt(sup_grad);

  double alpha = (eq.variant == Variant::GeneralizedExtremal) ? eq.alpha : 1.0;
  auto status = timelike_status(field, t, alpha);
  report.min_denominator = status.min_denominator;
  report.min_determinant_factor = status.min_determinant_factor;
  return report;
}

namespace detail {

/// Derivative of a sampled scalar series by the 3-point Lagrange formula
/// (second order on nonuniform spacing). NaN at the two ends.
inline std::vector<double> series_derivative(const std::vector<double>& t,
                                             const std::vector<double>& y) {
  std::vector<double> dy(t.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    double a = t[k - 1], b = t[k], c = t[k + 1];
    dy[k] = y[k - 1] * (b - c) / ((a - b) * (a - c)) +
            y[k] * (2.0 * b - a - c) / ((b - a) * (b - c)) +
            y[k + 1] * (b - a) / ((c - a) * (c - b));
  }
  return dy;
}

} // namespace detail

/// Residual of the exact zeroth-order energy balance of the linear equation,
///   dE/dt = -((n+4)/2) E0 + ((n-2)/2) E1,
/// with dE/dt taken by post-hoc centered differencing of the sampled series.
/// NaN at the series ends.
inline std::vector<double> identity_residual(const std::vector<EnergyReport>& series,
                                             int n) {
  if (series.size() < 3)
    throw ContractError("identity_residual: need at least 3 samples");
  std::vector<double> t(series.size()), e(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    t[k] = series[k].t;
    e[k] = series[k].entry(0, 0).E;
  }
  auto de = detail::series_derivative(t, e);
  std::vector<double> r(series.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    const EnergyEntry& entry = series[k].entry(0, 0);
    r[k] = de[k] - (-0.5 * (n + 4) * entry.E0 + 0.5 * (n - 2) * entry.E1);
  }
  return r;
}

struct MonotonicityEntry {
  int order = 0;
  bool non_increasing = true;
  double max_relative_rise = 0.0; // worst f(t2)/min f(t1<t2) - 1
  double measured_ratio = 0.0;    // median of (df/dt) / (e^{(2-n)t/2} E0)
};

struct MonotonicityReport {
  std::vector<MonotonicityEntry> entries;
  bool all_non_increasing = true;
};

/// Checks that each tracked f^{|I|,0} never rises by more than `rel_slack`
/// over the run, and measures the damping-rate ratio for comparison with the
/// exact value -(n+1).
inline MonotonicityReport monotonicity_check(const std::vector<EnergyReport>& series,
                                             int n, double rel_slack = 1e-8) {
  MonotonicityReport report;
  if (series.empty()) return report;
  for (const auto& probe : series.front().entries) {
    if (probe.time_order != 0) continue;
    MonotonicityEntry entry;
    entry.order = probe.order;
    std::vector<double> t, f, e0;
    for (const auto& sample : series) {
      const EnergyEntry& x = sample.entry(probe.order, 0);
      t.push_back(sample.t);
      f.push_back(x.f);
      e0.push_back(x.E0);
    }
    double running_min = f.front();
    for (std::size_t k = 1; k < f.size(); ++k) {
      if (running_min > 0.0) {
        double rise = f[k] / running_min - 1.0;
        entry.max_relative_rise = std::max(entry.max_relative_rise, rise);
        if (rise > rel_slack) entry.non_increasing = false;
      }
      running_min = std::min(running_min, f[k]);
    }
    auto df = detail::series_derivative(t, f);
    std::vector<double> ratios;
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
      double denom = std::exp(0.5 * (2 - n) * t[k]) * e0[k];
      if (denom > 0.0 && std::isfinite(df[k])) ratios.push_back(df[k] / denom);
    }
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      entry.measured_ratio = ratios[ratios.size() / 2];
    }
    report.all_non_increasing = report.all_non_increasing && entry.non_increasing;
    report.entries.push_back(entry);
  }
  return report;
}

struct DecayReport {
  bool e0_bound_ok = true;     // e0 <= e^{-t} f
  bool e1_bound_ok = true;     // e1 <= f
  double max_e0_excess = 0.0;
  double max_e1_excess = 0.0;
  double phi_t_ratio = 0.0;    // max over t>=t_ref of sup|phi_t| e^{t/2},
  double phi_t_reference = 0.0;// normalised by the value at t_ref
};

/// Flat-energy bounds and the pointwise e^{-t/2} decay of phi_t, measured
/// relative to the first sample at or after `t_ref`.
inline DecayReport decay_check(const std::vector<EnergyReport>& series, int n,
                               double t_ref = 1.0) {
  (void)n;
  DecayReport report;
  double ref = 0.0;
  bool have_ref = false;
  double worst = 0.0;
  for (const auto& sample : series) {
    for (const auto& entry : sample.entries) {
      double tol = 1e-12 * std::max(1.0, entry.f);
      double e0_excess = entry.e0 - std::exp(-sample.t) * entry.f;
      double e1_excess = entry.e1 - entry.f;
      report.max_e0_excess = std::max(report.max_e0_excess, e0_excess);
      report.max_e1_excess = std::max(report.max_e1_excess, e1_excess);
      if (e0_excess > tol) report.e0_bound_ok = false;
      if (e1_excess > tol) report.e1_bound_ok = false;
    }
    double weighted = sample.sup_phi_t * std::exp(0.5 * sample.t);
    if (!have_ref && sample.t >= t_ref) {
      ref = weighted;
      have_ref = true;
    }
    if (have_ref) worst = std::max(worst, weighted);
  }
  report.phi_t_reference = ref;
  report.phi_t_ratio = (ref > 0.0) ? worst / ref : 0.0;
  return report;
}

/// Synthetic state with analytically known derivatives, used to probe the
/// Leibniz identities of the null form against stencil evaluation.
struct AnalyticState {
  std::vector<double> phi;
  std::vector<double> phi_t;
  std::vector<double> phi_tt;
  std::vector<std::vector<double>> grad_phi;   // exact d_i phi
  std::vector<std::vector<double>> grad_phi_t; // exact d_i phi_t
};

/// Max-norm residual of the spatial Leibniz identity
///   d_axis Q(phi, phi) = 2 Q(d_axis phi, phi),
/// both sides evaluated with stencils. Converges at stencil order.
inline double leibniz_spatial_residual(const Field& field, double t, int axis) {
  const GridSpec& grid = field.grid;
  auto grads = gradient(field.phi, grid);
  auto q = null_form_q(field.phi_t, grads, field.phi_t, grads, t);
  auto lhs = gradient_axis(q, grid, axis);

  auto d_phi = gradient_axis(field.phi, grid, axis);
  auto d_phi_t = gradient_axis(field.phi_t, grid, axis);
  auto grads_d = gradient(d_phi, grid);
  auto q_cross = null_form_q(d_phi_t, grads_d, field.phi_t, grads, t);

  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    worst = std::max(worst, std::abs(lhs[i] - 2.0 * q_cross[i]));
  return worst;
}

/// Max-norm residual of the time identity
///   d_t Q(phi, phi) = 2 Q(phi_t, phi) - e^{-t} |grad phi|^2.
/// The left side is assembled from the exact derivatives of the analytic
/// state; the right side evaluates the gradients with stencils, so the
/// residual vanishes at stencil order. (With stencils on both sides the
/// identity is exact discretely, since the stencil commutes with d_t.)
inline double leibniz_time_residual(const AnalyticState& state, const GridSpec& grid,
                                    double t) {
  auto grads_h = gradient(state.phi, grid);
  auto grads_t_h = gradient(state.phi_t, grid);
  const double decay = std::exp(-t);

  double worst = 0.0;
  for (std::size_t i = 0; i < state.phi.size(); ++i) {
    double cross_exact = 0.0, gs_exact = 0.0, cross_h = 0.0, gs_h = 0.0;
    for (int d = 0; d < grid.dims; ++d) {
      cross_exact += state.grad_phi_t[d][i] * state.grad_phi[d][i];
      gs_exact += state.grad_phi[d][i] * state.grad_phi[d][i];
      cross_h += grads_t_h[d][i] * grads_h[d][i];
      gs_h += grads_h[d][i] * grads_h[d][i];
    }
    double lhs = -2.0 * state.phi_tt[i] * state.phi_t[i] +
                 decay * (2.0 * cross_exact - gs_exact);
    double rhs = 2.0 * (-state.phi_tt[i] * state.phi_t[i] + decay * cross_h) -
                 decay * gs_h;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

} // namespace dsw
