#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dsw/errors.hpp"

namespace dsw {

enum class Boundary { ZeroPad, Periodic };

/// Cubic lattice over [-L, L]^dims with uniform spacing h = 2L/(points-1).
///
/// ZeroPad grids treat everything outside the lattice as identically zero
/// (valid for compactly supported states that never reach the boundary).
/// Periodic grids identify the two endpoints of each axis, so the period is
/// exactly 2L and k = pi*m/L modes are commensurate.
struct GridSpec {
  int dims = 1;              // spatial dimension, 1..3
  double extent = 1.0;       // half-width L
  int points = 5;            // points per axis, endpoints included
  Boundary boundary = Boundary::ZeroPad;

  double spacing() const { return 2.0 * extent / static_cast<double>(points - 1); }

  std::size_t size() const {
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(points);
    return total;
  }

  void validate() const {
    if (dims < 1 || dims > 3) throw ConfigError("grid.dims: must be 1, 2 or 3");
    if (points < 5) throw ConfigError("grid.points: must be >= 5 (stencil width)");
    if (!(extent > 0.0)) throw ConfigError("grid.extent: must be > 0");
  }

  double coordinate(int index_1d) const { return -extent + spacing() * index_1d; }

  /// Decompose a flat index into per-axis indices (x fastest).
  std::array<int, 3> unflatten(std::size_t flat) const {
    std::array<int, 3> c{0, 0, 0};
    for (int d = 0; d < dims; ++d) {
      c[d] = static_cast<int>(flat % static_cast<std::size_t>(points));
      flat /= static_cast<std::size_t>(points);
    }
    return c;
  }

  std::size_t flatten(const std::array<int, 3>& c) const {
    std::size_t flat = 0;
    for (int d = dims - 1; d >= 0; --d)
      flat = flat * static_cast<std::size_t>(points) + static_cast<std::size_t>(c[d]);
    return flat;
  }

  /// Euclidean distance of a lattice point from the origin.
  double radius(std::size_t flat) const {
    auto c = unflatten(flat);
    double r2 = 0.0;
    for (int d = 0; d < dims; ++d) {
      double x = coordinate(c[d]);
      r2 += x * x;
    }
    return std::sqrt(r2);
  }

  bool operator==(const GridSpec&) const = default;
};

/// Trapezoidal quadrature weight of a lattice point (excludes the h^dims
/// volume factor). ZeroPad edges get 1/2 per touching axis end; on periodic
/// axes the duplicated endpoint is dropped so one full period is covered.
inline double quadrature_weight(const GridSpec& grid, std::size_t flat) {
  auto c = grid.unflatten(flat);
  double w = 1.0;
  for (int d = 0; d < grid.dims; ++d) {
    if (grid.boundary == Boundary::Periodic) {
      if (c[d] == grid.points - 1) return 0.0;
    } else {
      if (c[d] == 0 || c[d] == grid.points - 1) w *= 0.5;
    }
  }
  return w;
}

/// Evolution state on a grid: the scalar phi and its first time derivative.
struct Field {
  GridSpec grid;
  std::vector<double> phi;
  std::vector<double> phi_t;

  Field() = default;
  explicit Field(const GridSpec& g)
      : grid(g), phi(g.size(), 0.0), phi_t(g.size(), 0.0) {}

  bool is_finite() const {
    for (double v : phi)
      if (!std::isfinite(v)) return false;
    for (double v : phi_t)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline void require_shape(const std::vector<double>& values, const GridSpec& grid,
                          const char* who) {
  if (values.size() != grid.size())
    throw ContractError(std::string(who) + ": array size " +
                        std::to_string(values.size()) + " does not match grid size " +
                        std::to_string(grid.size()));
}

} // namespace dsw
