#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dsw/errors.hpp"
#include "dsw/grid.hpp"
#include "dsw/stencils.hpp"

namespace dsw {

// Scalar wave equations on the expanding background ds^2 = -dt^2 + e^t dx^2,
// written as phi_tt = rhs(phi, phi_t, t) for method-of-lines integration.
// The covariant wave operator on this background is
//   box(phi) = -phi_tt - (n/2) phi_t + e^{-t} sum_i phi_ii,
// and the null form of the background is
//   Q(u, v) = -u_t v_t + e^{-t} sum_i u_i v_i.

enum class Variant {
  LinearDissipative,   // box(phi) - phi_t = 0
  SemilinearNull,      // box(phi) - phi_t = Q(phi, phi)
  GeneralizedExtremal, // box(phi) - phi_t = Q(phi, e^{at}Q)/(2(1 + e^{at}Q))
  ExtremalSurface,     // Euler-Lagrange equation of the induced-area functional
  BornInfeldTau        // 1D symmetric reduction in conformal time tau = -2e^{-t/2}
};

struct EquationKind {
  Variant variant = Variant::LinearDissipative;
  int n = 1;          // spatial dimension
  double alpha = 1.0; // exponent parameter, GeneralizedExtremal only

  void validate() const {
    if (n < 1 || n > 3) throw ConfigError("equation.n: must be 1, 2 or 3");
    if (variant == Variant::GeneralizedExtremal && !(alpha <= 1.0))
      throw ConfigError("equation.alpha: must be <= 1");
  }

  bool is_tau_frame() const { return variant == Variant::BornInfeldTau; }
};

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::LinearDissipative: return "linear";
    case Variant::SemilinearNull: return "semilinear";
    case Variant::GeneralizedExtremal: return "generalized";
    case Variant::ExtremalSurface: return "extremal";
    case Variant::BornInfeldTau: return "born_infeld_tau";
  }
  return "?";
}

/// Positive values below this count as degenerate (denominator collapse or
/// loss of the timelike condition). Well under the [1/2, 3/2] working band,
/// above roundoff.
inline constexpr double kDegeneracyThreshold = 1e-6;

/// Pointwise null form Q(a, b) = -a_t b_t + e^{-t} sum_i a_i b_i.
inline std::vector<double> null_form_q(const std::vector<double>& phi_t_a,
                                       const std::vector<std::vector<double>>& grad_a,
                                       const std::vector<double>& phi_t_b,
                                       const std::vector<std::vector<double>>& grad_b,
                                       double t) {
  const std::size_t total = phi_t_a.size();
  if (phi_t_b.size() != total || grad_a.size() != grad_b.size())
    throw ContractError("null_form_q: operand shapes differ");
  for (const auto& g : grad_a)
    if (g.size() != total) throw ContractError("null_form_q: gradient shape mismatch");
  for (const auto& g : grad_b)
    if (g.size() != total) throw ContractError("null_form_q: gradient shape mismatch");
  const double decay = std::exp(-t);
  std::vector<double> q(total);
  for (std::size_t i = 0; i < total; ++i) {
    double spatial = 0.0;
    for (std::size_t d = 0; d < grad_a.size(); ++d) spatial += grad_a[d][i] * grad_b[d][i];
    q[i] = -phi_t_a[i] * phi_t_b[i] + decay * spatial;
  }
  return q;
}

/// Minima of the two degeneracy indicators over the lattice:
/// the determinant factor 1 + |grad phi|^2 - e^t phi_t^2 of the induced
/// metric, and the denominator 1 + e^{alpha t} Q(phi, phi).
struct TimelikeStatus {
  double min_determinant_factor = 1.0;
  double min_denominator = 1.0;
  bool degenerate = false;
};

inline TimelikeStatus timelike_status(const Field& field, double t, double alpha) {
  const GridSpec& grid = field.grid;
  auto grads = gradient(field.phi, grid);
  const double et = std::exp(t);
  const double eat = std::exp(alpha * t);
  const double decay = std::exp(-t);
  TimelikeStatus status;
  status.min_determinant_factor = std::numeric_limits<double>::infinity();
  status.min_denominator = std::numeric_limits<double>::infinity();
  const std::size_t total = grid.size();
  for (std::size_t i = 0; i < total; ++i) {
    double gs = 0.0;
    for (int d = 0; d < grid.dims; ++d) gs += grads[d][i] * grads[d][i];
    double pt2 = field.phi_t[i] * field.phi_t[i];
    double det_factor = 1.0 + gs - et * pt2;
    double den = 1.0 + eat * (-pt2 + decay * gs);
    status.min_determinant_factor = std::min(status.min_determinant_factor, det_factor);
    status.min_denominator = std::min(status.min_denominator, den);
  }
  status.degenerate = status.min_determinant_factor <= kDegeneracyThreshold ||
                      status.min_denominator <= kDegeneracyThreshold;
  return status;
}

namespace detail {

/// Shared derivative bundle for the quasilinear right-hand sides.
struct DerivPack {
  std::vector<std::vector<double>> grad_phi;   // phi_i
  std::vector<std::vector<double>> grad_phi_t; // (phi_t)_i, from the evolved phi_t
  std::vector<double> lap;                     // sum_i phi_ii
  // second derivatives phi_ij for i <= j, flattened
  std::vector<std::vector<double>> second;
  int dims = 0;

  static std::size_t pair_index(int i, int j, int dims) {
    if (i > j) std::swap(i, j);
    // row-major upper triangle
    std::size_t idx = 0;
    for (int r = 0; r < i; ++r) idx += static_cast<std::size_t>(dims - r);
    return idx + static_cast<std::size_t>(j - i);
  }

  const std::vector<double>& phi_ij(int i, int j) const {
    return second[pair_index(i, j, dims)];
  }
};

inline DerivPack derivatives(const Field& field, bool need_second) {
  const GridSpec& grid = field.grid;
  DerivPack pack;
  pack.dims = grid.dims;
  pack.grad_phi = gradient(field.phi, grid);
  pack.grad_phi_t = gradient(field.phi_t, grid);
  pack.lap = laplacian(field.phi, grid);
  if (need_second) {
    for (int i = 0; i < grid.dims; ++i)
      for (int j = i; j < grid.dims; ++j)
        pack.second.push_back(second_diff(field.phi, grid, i, j));
  }
  return pack;
}

} // namespace detail

/// phi_tt for box(phi) - phi_t = 0:
///   phi_tt = -((n+2)/2) phi_t + e^{-t} sum_i phi_ii.
inline std::vector<double> rhs_linear(const Field& field, double t, int n) {
  auto lap = laplacian(field.phi, field.grid);
  const double damping = 0.5 * (n + 2);
  const double decay = std::exp(-t);
  std::vector<double> acc(lap.size());
  for (std::size_t i = 0; i < acc.size(); ++i)
    acc[i] = -damping * field.phi_t[i] + decay * lap[i];
  return acc;
}

/// phi_tt for box(phi) - phi_t = Q(phi, phi).
inline std::vector<double> rhs_semilinear(const Field& field, double t, int n) {
  const GridSpec& grid = field.grid;
  auto grads = gradient(field.phi, grid);
  auto lap = laplacian(field.phi, grid);
  const double damping = 0.5 * (n + 2);
  const double decay = std::exp(-t);
  std::vector<double> acc(lap.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double gs = 0.0;
    for (int d = 0; d < grid.dims; ++d) gs += grads[d][i] * grads[d][i];
    double pt = field.phi_t[i];
    double q = -pt * pt + decay * gs;
    acc[i] = -damping * pt + decay * lap[i] - q;
  }
  return acc;
}

/// phi_tt for box(phi) - phi_t = Q(phi, e^{at}Q(phi,phi)) / (2(1 + e^{at}Q)).
///
/// Expanding the nested null form produces second-derivative terms
///   2 e^{at} phi_t^2 phi_tt + 2 e^{(a-2)t} sum_ij phi_i phi_j phi_ij
///   - 4 e^{(a-1)t} phi_t sum_i phi_i (phi_t)_i
///   + a e^{at} phi_t^3 - (a-1) e^{(a-1)t} phi_t |grad phi|^2.
/// Collecting phi_tt and clearing the denominator leaves the coefficient
/// 1 + e^{(a-1)t}|grad phi|^2, which is >= 1, so the division is always safe
/// while the denominator 1 + e^{at}Q stays positive.
inline std::vector<double> rhs_generalized(const Field& field, double t, int n,
                                           double alpha) {
  const GridSpec& grid = field.grid;
  auto pack = detail::derivatives(field, /*need_second=*/true);
  const double damping = 0.5 * (n + 2);
  const double decay = std::exp(-t);
  const double e_a = std::exp(alpha * t);
  const double e_a1 = std::exp((alpha - 1.0) * t);
  const double e_a2 = std::exp((alpha - 2.0) * t);
  std::vector<double> acc(grid.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double pt = field.phi_t[i];
    double gs = 0.0, cross = 0.0, mixed = 0.0;
    for (int a = 0; a < grid.dims; ++a) {
      const double ga = pack.grad_phi[a][i];
      gs += ga * ga;
      cross += ga * pack.grad_phi_t[a][i];
      mixed += ga * ga * pack.phi_ij(a, a)[i];
      for (int b = a + 1; b < grid.dims; ++b)
        mixed += 2.0 * ga * pack.grad_phi[b][i] * pack.phi_ij(a, b)[i];
    }
    const double q = -pt * pt + decay * gs;
    const double den = 1.0 + e_a * q;
    if (den <= kDegeneracyThreshold)
      throw DegeneracyError(DegeneracyError::Kind::DenominatorDegenerate, i, den, t);
    const double lower = 2.0 * e_a2 * mixed - 4.0 * e_a1 * pt * cross +
                         alpha * e_a * pt * pt * pt - (alpha - 1.0) * e_a1 * pt * gs;
    acc[i] = (den * (-damping * pt + decay * pack.lap[i]) - 0.5 * lower) /
             (1.0 + e_a1 * gs);
  }
  return acc;
}

/// phi_tt for the induced-area Euler-Lagrange equation, with denominator
/// 1 + |grad phi|^2 - e^t phi_t^2. Algebraically identical to
/// rhs_generalized with alpha = 1.
inline std::vector<double> rhs_extremal_surface(const Field& field, double t, int n) {
  const GridSpec& grid = field.grid;
  auto pack = detail::derivatives(field, /*need_second=*/true);
  const double damping = 0.5 * (n + 2);
  const double decay = std::exp(-t);
  const double et = std::exp(t);
  std::vector<double> acc(grid.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double pt = field.phi_t[i];
    double gs = 0.0, cross = 0.0, mixed = 0.0;
    for (int a = 0; a < grid.dims; ++a) {
      const double ga = pack.grad_phi[a][i];
      gs += ga * ga;
      cross += ga * pack.grad_phi_t[a][i];
      mixed += ga * ga * pack.phi_ij(a, a)[i];
      for (int b = a + 1; b < grid.dims; ++b)
        mixed += 2.0 * ga * pack.grad_phi[b][i] * pack.phi_ij(a, b)[i];
    }
    const double det_factor = 1.0 + gs - et * pt * pt;
    if (det_factor <= kDegeneracyThreshold)
      throw DegeneracyError(DegeneracyError::Kind::TimelikeViolation, i, det_factor, t);
    acc[i] = (det_factor * (-damping * pt + decay * pack.lap[i]) + 2.0 * pt * cross -
              0.5 * et * pt * pt * pt - decay * mixed) /
             (1.0 + gs);
  }
  return acc;
}

/// phi_tautau for the 1D Born-Infeld reduction in tau = -2e^{-t/2} in (-2, 0):
///   phi_tautau = [(1 - phi_tau^2) phi_xx + 2 phi_tau phi_x phi_xtau
///                 + ((n+1)/tau) phi_tau (1 + phi_x^2 - phi_tau^2)] / (1 + phi_x^2).
/// Here field.phi_t stores phi_tau.
inline std::vector<double> rhs_born_infeld_tau(const Field& field, double tau, int n) {
  const GridSpec& grid = field.grid;
  if (grid.dims != 1)
    throw ContractError("rhs_born_infeld_tau: requires a 1D grid (symmetric reduction)");
  if (!(tau < 0.0) || tau < -2.0)
    throw ContractError("rhs_born_infeld_tau: tau must lie in [-2, 0)");
  auto px = gradient_axis(field.phi, grid, 0);
  auto pxx = laplacian(field.phi, grid);
  auto ptx = gradient_axis(field.phi_t, grid, 0);
  const double source = static_cast<double>(n + 1) / tau;
  std::vector<double> acc(grid.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double ptau = field.phi_t[i];
    const double root_arg = 1.0 + px[i] * px[i] - ptau * ptau;
    if (root_arg <= kDegeneracyThreshold)
      throw DegeneracyError(DegeneracyError::Kind::TimelikeViolation, i, root_arg, tau);
    acc[i] = ((1.0 - ptau * ptau) * pxx[i] + 2.0 * ptau * px[i] * ptx[i] +
              source * ptau * root_arg) /
             (1.0 + px[i] * px[i]);
  }
  return acc;
}

/// Dispatch phi_tt (phi_tautau for the tau-frame equation) for the
/// configured equation. `t` is coordinate time or tau accordingly.
inline std::vector<double> acceleration(const Field& field, double t,
                                        const EquationKind& eq) {
  switch (eq.variant) {
    case Variant::LinearDissipative: return rhs_linear(field, t, eq.n);
    case Variant::SemilinearNull: return rhs_semilinear(field, t, eq.n);
    case Variant::GeneralizedExtremal: return rhs_generalized(field, t, eq.n, eq.alpha);
    case Variant::ExtremalSurface: return rhs_extremal_surface(field, t, eq.n);
    case Variant::BornInfeldTau: return rhs_born_infeld_tau(field, t, eq.n);
  }
  throw ContractError("acceleration: unknown equation variant");
}

/// Characteristic speed bounding the CFL step: e^{-t/2} in coordinate time,
/// 1 in the conformal tau frame.
inline double wave_speed(const EquationKind& eq, double t) {
  return eq.is_tau_frame() ? 1.0 : std::exp(-0.5 * t);
}

/// One stored time slice of an evolution.
struct StateSnapshot {
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> phi_t;
};

/// Spacetime area of the graph over the stored slab:
///   integral of e^{nt/2} sqrt(1 + |grad phi|^2 - e^t phi_t^2)
/// by trapezoidal quadrature in space and in time.
inline double area_functional(const std::vector<StateSnapshot>& trajectory,
                              const GridSpec& grid) {
  const double cell = std::pow(grid.spacing(), grid.dims);
  std::vector<double> slice(trajectory.size(), 0.0);
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    const StateSnapshot& snap = trajectory[s];
    require_shape(snap.phi, grid, "area_functional");
    auto grads = gradient(snap.phi, grid);
    const double et = std::exp(snap.t);
    double sum = 0.0;
    for (std::size_t i = 0; i < snap.phi.size(); ++i) {
      double gs = 0.0;
      for (int d = 0; d < grid.dims; ++d) gs += grads[d][i] * grads[d][i];
      double arg = 1.0 + gs - et * snap.phi_t[i] * snap.phi_t[i];
      if (arg <= kDegeneracyThreshold)
        throw DegeneracyError(DegeneracyError::Kind::TimelikeViolation, i, arg, snap.t);
      sum += quadrature_weight(grid, i) * std::sqrt(arg);
    }
    slice[s] = std::exp(0.5 * grid.dims * snap.t) * sum * cell;
  }
  double area = 0.0;
  for (std::size_t s = 0; s + 1 < trajectory.size(); ++s)
    area += 0.5 * (trajectory[s + 1].t - trajectory[s].t) * (slice[s] + slice[s + 1]);
  return area;
}

} // namespace dsw
