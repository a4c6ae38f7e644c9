#pragma once

#include <cmath>
#include <string>

#include "dsw/errors.hpp"
#include "dsw/grid.hpp"

namespace dsw {

/// Smooth compactly supported radial profile: the classical bump
///   amplitude * exp(1/(r^2/R^2 - 1))   for r < R,   0 otherwise.
/// Identically (bitwise) zero at and beyond the support radius.
struct BumpProfile {
  double radius = 1.0;
  double amplitude = 1.0;

  double value(double r) const {
    double u = r / radius;
    if (u * u >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 / (u * u - 1.0));
  }

  /// d/dr of value(r); zero outside the support like the profile itself.
  double radial_derivative(double r) const {
    double u = r / radius;
    double w = u * u - 1.0;
    if (w >= 0.0) return 0.0;
    return value(r) * (-2.0 * r / (radius * radius)) / (w * w);
  }
};

/// Data travel budget: the effective wave speed e^{-t/2} integrates to 2 over
/// all time, so ZeroPad boundaries need extent >= radius + 2 + margin.
inline constexpr double kPropagationBudget = 2.0;

inline void require_profile_fits(const BumpProfile& p, const GridSpec& grid,
                                 double margin, const char* name) {
  if (grid.boundary != Boundary::ZeroPad) return;
  double needed = p.radius + kPropagationBudget + margin;
  if (grid.extent < needed)
    throw ConfigError(std::string(name) + ": grid extent " + std::to_string(grid.extent) +
                      " < radius + 2 + margin = " + std::to_string(needed));
}

/// phi = eps*f(|x|), phi_t = eps*g(|x|) on the lattice.
inline Field make_initial_data(const BumpProfile& profile_f, const BumpProfile& profile_g,
                               double eps, const GridSpec& grid, double margin = 0.5) {
  grid.validate();
  if (eps < 0.0) throw ConfigError("data.eps: must be >= 0");
  require_profile_fits(profile_f, grid, margin, "data.f");
  require_profile_fits(profile_g, grid, margin, "data.g");
  Field field(grid);
  const std::size_t total = grid.size();
  for (std::size_t i = 0; i < total; ++i) {
    double r = grid.radius(i);
    field.phi[i] = eps * profile_f.value(r);
    field.phi_t[i] = eps * profile_g.value(r);
  }
  return field;
}

} // namespace dsw
