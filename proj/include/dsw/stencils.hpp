#pragma once

#include <cstddef>
#include <vector>

#include "dsw/grid.hpp"

namespace dsw {

// Second-order central differences on the lattice. All functions are pure and
// allocate their result. Boundary handling: ZeroPad reads missing neighbours
// as 0, Periodic wraps past the duplicated endpoint (neighbour of index 0 is
// points-2, neighbour of points-1 is 1), keeping the period exactly 2L.

namespace detail {

template <typename LineOp>
inline void for_each_line(const GridSpec& grid, int axis, LineOp&& op) {
  const std::size_t n = static_cast<std::size_t>(grid.points);
  std::size_t stride = 1;
  for (int d = 0; d < axis; ++d) stride *= n;
  const std::size_t block = stride * n;
  const std::size_t total = grid.size();
  for (std::size_t outer = 0; outer * block < total; ++outer)
    for (std::size_t inner = 0; inner < stride; ++inner)
      op(outer * block + inner, stride);
}

} // namespace detail

/// d^2/dx_axis^2 by the 3-point stencil, accumulated into out.
inline void add_second_diff_axis(const std::vector<double>& v, const GridSpec& grid,
                                 int axis, std::vector<double>& out) {
  require_shape(v, grid, "add_second_diff_axis");
  require_shape(out, grid, "add_second_diff_axis(out)");
  const int n = grid.points;
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const bool periodic = grid.boundary == Boundary::Periodic;
  detail::for_each_line(grid, axis, [&](std::size_t base, std::size_t s) {
    for (int j = 1; j < n - 1; ++j) {
      const std::size_t i = base + static_cast<std::size_t>(j) * s;
      out[i] += (v[i + s] - 2.0 * v[i] + v[i - s]) * inv_h2;
    }
    const std::size_t first = base;
    const std::size_t last = base + static_cast<std::size_t>(n - 1) * s;
    if (periodic) {
      const std::size_t wrap_lo = base + static_cast<std::size_t>(n - 2) * s;
      const std::size_t wrap_hi = base + s;
      out[first] += (v[first + s] - 2.0 * v[first] + v[wrap_lo]) * inv_h2;
      out[last] += (v[wrap_hi] - 2.0 * v[last] + v[last - s]) * inv_h2;
    } else {
      out[first] += (v[first + s] - 2.0 * v[first]) * inv_h2;
      out[last] += (v[last - s] - 2.0 * v[last]) * inv_h2;
    }
  });
}

/// Sum of unscaled second derivatives over all axes.
inline std::vector<double> laplacian(const std::vector<double>& v, const GridSpec& grid) {
  require_shape(v, grid, "laplacian");
  std::vector<double> out(grid.size(), 0.0);
  for (int axis = 0; axis < grid.dims; ++axis) add_second_diff_axis(v, grid, axis, out);
  return out;
}

/// d/dx_axis by the centered 2-point stencil.
inline std::vector<double> gradient_axis(const std::vector<double>& v, const GridSpec& grid,
                                         int axis) {
  require_shape(v, grid, "gradient_axis");
  std::vector<double> out(grid.size(), 0.0);
  const int n = grid.points;
  const double inv_2h = 0.5 / grid.spacing();
  const bool periodic = grid.boundary == Boundary::Periodic;
  detail::for_each_line(grid, axis, [&](std::size_t base, std::size_t s) {
    for (int j = 1; j < n - 1; ++j) {
      const std::size_t i = base + static_cast<std::size_t>(j) * s;
      out[i] = (v[i + s] - v[i - s]) * inv_2h;
    }
    const std::size_t first = base;
    const std::size_t last = base + static_cast<std::size_t>(n - 1) * s;
    if (periodic) {
      const std::size_t wrap_lo = base + static_cast<std::size_t>(n - 2) * s;
      const std::size_t wrap_hi = base + s;
      out[first] = (v[first + s] - v[wrap_lo]) * inv_2h;
      out[last] = (v[wrap_hi] - v[last - s]) * inv_2h;
    } else {
      out[first] = v[first + s] * inv_2h;
      out[last] = -v[last - s] * inv_2h;
    }
  });
  return out;
}

/// d/dx_axis by the one-sided forward stencil. Paired with the 3-point
/// second difference this satisfies exact summation by parts on periodic
/// grids and on compactly supported data, which keeps discrete energy
/// balances exact; accuracy is first order pointwise, second order in the
/// quadratic sums that use it.
inline std::vector<double> forward_diff_axis(const std::vector<double>& v,
                                             const GridSpec& grid, int axis) {
  require_shape(v, grid, "forward_diff_axis");
  std::vector<double> out(grid.size(), 0.0);
  const int n = grid.points;
  const double inv_h = 1.0 / grid.spacing();
  const bool periodic = grid.boundary == Boundary::Periodic;
  detail::for_each_line(grid, axis, [&](std::size_t base, std::size_t s) {
    for (int j = 0; j < n - 1; ++j) {
      const std::size_t i = base + static_cast<std::size_t>(j) * s;
      out[i] = (v[i + s] - v[i]) * inv_h;
    }
    const std::size_t last = base + static_cast<std::size_t>(n - 1) * s;
    out[last] = periodic ? (v[base + s] - v[last]) * inv_h : -v[last] * inv_h;
  });
  return out;
}

/// All first derivatives, one array per axis.
inline std::vector<std::vector<double>> gradient(const std::vector<double>& v,
                                                 const GridSpec& grid) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(grid.dims));
  for (int axis = 0; axis < grid.dims; ++axis) out.push_back(gradient_axis(v, grid, axis));
  return out;
}

/// Mixed/repeated second derivative. The diagonal uses the compact 3-point
/// stencil; off-diagonal composes the two centered first derivatives, so the
/// axis order only matters at roundoff.
inline std::vector<double> second_diff(const std::vector<double>& v, const GridSpec& grid,
                                       int axis_a, int axis_b) {
  if (axis_a == axis_b) {
    require_shape(v, grid, "second_diff");
    std::vector<double> out(grid.size(), 0.0);
    add_second_diff_axis(v, grid, axis_a, out);
    return out;
  }
  return gradient_axis(gradient_axis(v, grid, axis_a), grid, axis_b);
}

} // namespace dsw
