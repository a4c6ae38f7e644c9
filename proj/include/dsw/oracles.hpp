#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsw/equations.hpp"

namespace dsw {

// Independent reference solutions: spatially constant reductions of each
// equation (ordinary differential equations in t), single Fourier modes of
// the linear equation, and closed forms where they exist. These never touch
// the lattice right-hand sides, so they can sit on the other side of a
// PDE-vs-ODE comparison.

using OdeRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

namespace detail {

inline std::vector<double> ode_rk4_step(const OdeRhs& f, double t,
                                        const std::vector<double>& y, double dt) {
  auto k1 = f(t, y);
  std::vector<double> tmp(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  auto k2 = f(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  auto k3 = f(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
  auto k4 = f(t + dt, tmp);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

inline std::vector<double> ode_advance(const OdeRhs& f, std::vector<double> y, double t0,
                                       double t1, std::size_t substeps) {
  double dt = (t1 - t0) / static_cast<double>(substeps);
  double t = t0;
  for (std::size_t k = 0; k < substeps; ++k) {
    y = ode_rk4_step(f, t, y, dt);
    t = t0 + dt * static_cast<double>(k + 1);
  }
  return y;
}

} // namespace detail

/// Integrate y' = f(t, y) and return the states at the requested times
/// (ascending, first >= t0). Each interval is stepped with RK4 and the
/// subdivision is doubled until two successive resolutions agree within tol.
inline std::vector<std::vector<double>> integrate_ode(const OdeRhs& f,
                                                      std::vector<double> y0, double t0,
                                                      const std::vector<double>& times,
                                                      double tol = 1e-12) {
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  std::vector<double> y = std::move(y0);
  double t = t0;
  for (double target : times) {
    if (target < t - 1e-15) throw ContractError("integrate_ode: times must ascend");
    if (target > t) {
      std::size_t substeps = 32;
      auto coarse = detail::ode_advance(f, y, t, target, substeps);
      for (;;) {
        auto fine = detail::ode_advance(f, y, t, target, substeps * 2);
        double diff = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
          diff = std::max(diff, std::abs(fine[i] - coarse[i]));
          scale = std::max(scale, std::abs(fine[i]));
        }
        if (diff <= tol * scale || substeps > (1u << 22)) {
          coarse = std::move(fine);
          break;
        }
        coarse = std::move(fine);
        substeps *= 2;
      }
      y = std::move(coarse);
      t = target;
    }
    out.push_back(y);
  }
  return out;
}

/// Spatially constant reduction of each equation: with all gradients zero,
/// u = phi_t obeys
///   linear:       u' = -k u                      (k = (n+2)/2)
///   semilinear:   u' = -k u + u^2
///   generalized:  u' = -k u + ((n+2-a)/2) e^{at} u^3
///   extremal:     the a = 1 case of the line above
///   tau frame:    u' = ((n+1)/tau) u (1 - u^2)
inline OdeRhs reduced_ode(const EquationKind& eq) {
  const double k = 0.5 * (eq.n + 2);
  switch (eq.variant) {
    case Variant::LinearDissipative:
      return [k](double, const std::vector<double>& y) {
        return std::vector<double>{-k * y[0]};
      };
    case Variant::SemilinearNull:
      return [k](double, const std::vector<double>& y) {
        return std::vector<double>{-k * y[0] + y[0] * y[0]};
      };
    case Variant::GeneralizedExtremal: {
      const double alpha = eq.alpha;
      const double cubic = 0.5 * (eq.n + 2 - alpha);
      return [k, alpha, cubic](double t, const std::vector<double>& y) {
        return std::vector<double>{-k * y[0] +
                                   cubic * std::exp(alpha * t) * y[0] * y[0] * y[0]};
      };
    }
    case Variant::ExtremalSurface: {
      const double cubic = 0.5 * (eq.n + 1);
      return [k, cubic](double t, const std::vector<double>& y) {
        return std::vector<double>{-k * y[0] + cubic * std::exp(t) * y[0] * y[0] * y[0]};
      };
    }
    case Variant::BornInfeldTau: {
      const double coeff = static_cast<double>(eq.n + 1);
      return [coeff](double tau, const std::vector<double>& y) {
        return std::vector<double>{coeff / tau * y[0] * (1.0 - y[0] * y[0])};
      };
    }
  }
  throw ContractError("reduced_ode: unknown variant");
}

/// Closed form for the linear constant-data case: u(t) = u0 e^{-(n+2)t/2}.
inline double linear_constant_solution(int n, double u0, double t) {
  return u0 * std::exp(-0.5 * (n + 2) * t);
}

/// Closed form for the semilinear constant-data Riccati u' = -k u + u^2:
/// u(t) = k / (1 - (1 - k/u0) e^{kt}).
inline double riccati_solution(int n, double u0, double t) {
  const double k = 0.5 * (n + 2);
  return k / (1.0 - (1.0 - k / u0) * std::exp(k * t));
}

/// Riccati blow-up time for u0 > k: t* = ln(u0/(u0-k)) / k.
inline std::optional<double> riccati_blowup_time(int n, double u0) {
  const double k = 0.5 * (n + 2);
  if (u0 <= k) return std::nullopt;
  return std::log(u0 / (u0 - k)) / k;
}

struct OracleTrajectory {
  std::vector<double> times;
  std::vector<double> values; // u = phi_t of the reduced ODE
  bool blew_up = false;
  double t_blow = 0.0;
};

/// High-accuracy reference trajectory of the spatially constant reduction.
/// Blow-up (|u| crossing `cap`) is bracketed by a fine march and then the
/// last interval is re-marched at ever finer steps from the saved state.
inline OracleTrajectory homogeneous_oracle(const EquationKind& eq, double u0,
                                           double t_end, std::size_t samples = 200,
                                           double cap = 1e6) {
  auto f = reduced_ode(eq);
  const double t0 = eq.is_tau_frame() ? -2.0 : 0.0;
  OracleTrajectory out;

  double dt = (t_end - t0) / 200000.0;
  std::vector<double> y{u0};
  double t = t0;
  double t_lo = t0, t_hi = t_end;
  std::vector<double> y_lo = y;
  bool crossed = false;
  while (t < t_end) {
    auto y_next = detail::ode_rk4_step(f, t, y, dt);
    if (!std::isfinite(y_next[0]) || std::abs(y_next[0]) >= cap) {
      t_lo = t;
      t_hi = t + dt;
      y_lo = y;
      crossed = true;
      break;
    }
    y = y_next;
    t += dt;
  }
  if (crossed) {
    for (int round = 0; round < 4 && t_hi - t_lo > 1e-13; ++round) {
      const int sub = 100;
      double fine_dt = (t_hi - t_lo) / sub;
      double tt = t_lo;
      std::vector<double> yy = y_lo;
      for (int k = 0; k < sub; ++k) {
        auto y_next = detail::ode_rk4_step(f, tt, yy, fine_dt);
        if (!std::isfinite(y_next[0]) || std::abs(y_next[0]) >= cap) {
          t_lo = tt;
          t_hi = tt + fine_dt;
          y_lo = yy;
          break;
        }
        yy = y_next;
        tt += fine_dt;
      }
    }
    out.blew_up = true;
    out.t_blow = 0.5 * (t_lo + t_hi);
  }

  const double horizon = crossed ? t_lo : t_end;
  std::vector<double> times;
  for (std::size_t k = 0; k <= samples; ++k)
    times.push_back(t0 + (horizon - t0) * static_cast<double>(k) /
                             static_cast<double>(samples));
  auto states = integrate_ode(f, {u0}, t0, times, 1e-12);
  out.times = std::move(times);
  for (auto& s : states) out.values.push_back(s[0]);
  return out;
}

/// Mode ODE of the linear equation under separation of variables
/// phi = a(t) sin(k x): a'' + ((n+2)/2) a' + e^{-t} k^2 a = 0.
inline OdeRhs fourier_mode_ode(int n, double k) {
  const double damping = 0.5 * (n + 2);
  const double k2 = k * k;
  return [damping, k2](double t, const std::vector<double>& y) {
    return std::vector<double>{y[1], -damping * y[1] - std::exp(-t) * k2 * y[0]};
  };
}

/// Reference amplitude a(t) at the requested times, from (a0, a0').
inline std::vector<double> fourier_oracle(double k, int n, double a0, double a0_prime,
                                          const std::vector<double>& times,
                                          double tol = 1e-12) {
  auto states = integrate_ode(fourier_mode_ode(n, k), {a0, a0_prime}, 0.0, times, tol);
  std::vector<double> out;
  out.reserve(states.size());
  for (auto& s : states) out.push_back(s[0]);
  return out;
}

} // namespace dsw
