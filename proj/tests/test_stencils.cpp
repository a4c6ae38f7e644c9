#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "dsw/array_ops.hpp"
#include "dsw/grid.hpp"
#include "dsw/stencils.hpp"

using namespace dsw;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> fill_1d(const GridSpec& grid, double (*f)(double)) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.coordinate(static_cast<int>(i)));
  return v;
}

} // namespace

TEST_CASE("laplacian of a constant vanishes on a periodic grid") {
  GridSpec grid{1, 2.0, 33, Boundary::Periodic};
  std::vector<double> v(grid.size(), 3.25);
  auto lap = laplacian(v, grid);
  for (double x : lap) CHECK(x == 0.0);
}

TEST_CASE("laplacian is exact on quadratics at interior points") {
  GridSpec grid{1, 2.0, 41, Boundary::ZeroPad};
  auto v = fill_1d(grid, [](double x) { return x * x; });
  auto lap = laplacian(v, grid);
  for (int i = 1; i < grid.points - 1; ++i)
    CHECK(lap[static_cast<std::size_t>(i)] == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("laplacian of a Fourier mode matches the analytic second derivative") {
  // commensurate mode: period 2L
  const double L = kPi;
  const double k = 2.0 * kPi / L;
  double prev_err = 0.0;
  for (int level = 0; level < 3; ++level) {
    GridSpec grid{1, L, 64 * (1 << level) + 1, Boundary::Periodic};
    std::vector<double> v(grid.size()), expected(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double x = grid.coordinate(static_cast<int>(i));
      v[i] = std::sin(k * x);
      expected[i] = -k * k * std::sin(k * x);
    }
    auto lap = laplacian(v, grid);
    double err = max_abs_diff(lap, expected);
    double h = grid.spacing();
    CHECK(err < 2.0 * k * k * k * k * h * h / 12.0);
    if (level > 0) CHECK(prev_err / err > 3.5); // second order
    prev_err = err;
  }
}

TEST_CASE("gradient of a constant vanishes, of x is exactly one inside") {
  GridSpec grid{1, 2.0, 33, Boundary::Periodic};
  std::vector<double> c(grid.size(), -7.5);
  for (double g : gradient_axis(c, grid, 0)) CHECK(g == 0.0);

  GridSpec open{1, 2.0, 33, Boundary::ZeroPad};
  auto v = fill_1d(open, [](double x) { return x; });
  auto g = gradient_axis(v, open, 0);
  for (int i = 1; i < open.points - 1; ++i)
    CHECK(g[static_cast<std::size_t>(i)] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gradient of a Fourier mode converges at second order") {
  const double L = kPi;
  const double k = 2.0 * kPi / L;
  double prev_err = 0.0;
  for (int level = 0; level < 3; ++level) {
    GridSpec grid{1, L, 64 * (1 << level) + 1, Boundary::Periodic};
    std::vector<double> v(grid.size()), expected(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double x = grid.coordinate(static_cast<int>(i));
      v[i] = std::sin(k * x);
      expected[i] = k * std::cos(k * x);
    }
    auto g = gradient_axis(v, grid, 0);
    double err = max_abs_diff(g, expected);
    if (level > 0) CHECK(prev_err / err > 3.5);
    prev_err = err;
  }
}

TEST_CASE("stencils are linear to roundoff") {
  GridSpec grid{2, 1.5, 17, Boundary::ZeroPad};
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> u(grid.size()), v(grid.size()), combo(grid.size());
  const double a = 1.7, b = -0.4;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = dist(rng);
    v[i] = dist(rng);
    combo[i] = a * u[i] + b * v[i];
  }
  auto lap_combo = laplacian(combo, grid);
  auto lap_u = laplacian(u, grid);
  auto lap_v = laplacian(v, grid);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(lap_combo[i] == Approx(a * lap_u[i] + b * lap_v[i]).margin(1e-10));
}

TEST_CASE("mixed second derivatives commute and converge") {
  GridSpec grid{2, kPi, 129, Boundary::Periodic};
  const double k = 2.0 * kPi / kPi; // = 2, commensurate
  std::vector<double> v(grid.size()), expected(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto c = grid.unflatten(i);
    double x = grid.coordinate(c[0]), y = grid.coordinate(c[1]);
    v[i] = std::sin(k * x) * std::sin(k * y);
    expected[i] = k * k * std::cos(k * x) * std::cos(k * y);
  }
  auto dxy = second_diff(v, grid, 0, 1);
  auto dyx = second_diff(v, grid, 1, 0);
  CHECK(max_abs_diff(dxy, dyx) < 1e-12); // axis order matters only at roundoff
  CHECK(max_abs_diff(dxy, expected) < 0.05);
}

TEST_CASE("shape mismatch is a contract violation") {
  GridSpec grid{1, 1.0, 9, Boundary::ZeroPad};
  std::vector<double> wrong(5, 0.0);
  CHECK_THROWS_AS(laplacian(wrong, grid), ContractError);
  CHECK_THROWS_AS(gradient_axis(wrong, grid, 0), ContractError);
}
