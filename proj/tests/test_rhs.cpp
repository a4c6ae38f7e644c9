#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "dsw/array_ops.hpp"
#include "dsw/equations.hpp"
#include "dsw/oracles.hpp"

using namespace dsw;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field constant_state(const GridSpec& grid, double phi, double phi_t) {
  Field f(grid);
  std::fill(f.phi.begin(), f.phi.end(), phi);
  std::fill(f.phi_t.begin(), f.phi_t.end(), phi_t);
  return f;
}

/// Smooth random periodic state from a handful of commensurate Fourier modes.
Field random_smooth_state(const GridSpec& grid, double amplitude, std::mt19937& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 3);
  Field f(grid);
  const double base_k = kPi / grid.extent;
  for (int wave = 0; wave < 3; ++wave) {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    std::array<double, 3> phase{0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dims; ++d) {
      k[d] = base_k * mode(rng);
      phase[d] = kPi * coeff(rng);
    }
    double a = amplitude * coeff(rng);
    double b = amplitude * coeff(rng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto c = grid.unflatten(i);
      double shape = 1.0;
      for (int d = 0; d < grid.dims; ++d)
        shape *= std::sin(k[d] * grid.coordinate(c[d]) + phase[d]);
      f.phi[i] += a * shape;
      f.phi_t[i] += b * shape;
    }
  }
  return f;
}

} // namespace

TEST_CASE("all right-hand sides vanish on the zero state") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  Field zero(grid);
  for (double t : {0.0, 1.5}) {
    for (double v : rhs_linear(zero, t, 1)) CHECK(v == 0.0);
    for (double v : rhs_semilinear(zero, t, 1)) CHECK(v == 0.0);
    for (double v : rhs_generalized(zero, t, 1, 0.5)) CHECK(v == 0.0);
    for (double v : rhs_extremal_surface(zero, t, 1)) CHECK(v == 0.0);
  }
  for (double v : rhs_born_infeld_tau(zero, -1.0, 1)) CHECK(v == 0.0);
}

TEST_CASE("linear rhs on spatially constant data is pure damping") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  auto f = constant_state(grid, 0.3, 0.7);
  auto acc = rhs_linear(f, 2.0, 1);
  for (double v : acc) CHECK(v == Approx(-1.5 * 0.7).epsilon(1e-14));
  auto acc3 = rhs_linear(f, 2.0, 3);
  for (double v : acc3) CHECK(v == Approx(-2.5 * 0.7).epsilon(1e-14));
}

TEST_CASE("linear rhs reproduces the analytic Laplacian on a Fourier mode") {
  GridSpec grid{1, kPi, 129, Boundary::Periodic};
  const double k = 2.0;
  Field f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f.phi[i] = std::sin(k * grid.coordinate(static_cast<int>(i)));
  auto acc = rhs_linear(f, 0.0, 1);
  double h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(acc[i] == Approx(-k * k * f.phi[i]).margin(2.0 * k * k * k * k * h * h / 12.0));
}

TEST_CASE("semilinear rhs adds the quadratic self-interaction") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  auto f = constant_state(grid, 0.0, 0.8);
  // Q = -u^2, so phi_tt = -1.5u + u^2
  auto acc = rhs_semilinear(f, 3.1, 1);
  for (double v : acc) CHECK(v == Approx(-1.5 * 0.8 + 0.64).epsilon(1e-14));
}

TEST_CASE("semilinear rhs sees pure gradient states through e^{-t}") {
  GridSpec grid{1, 2.0, 41, Boundary::ZeroPad};
  Field f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f.phi[i] = grid.coordinate(static_cast<int>(i));
  auto acc = rhs_semilinear(f, 0.0, 1);
  // interior: phi_xx = 0, phi_x = 1 -> phi_tt = -Q = -e^{0} * 1
  std::size_t center = grid.size() / 2;
  CHECK(acc[center] == Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("generalized rhs at alpha = 1 agrees with the extremal surface rhs") {
  std::mt19937 rng(123);
  for (int dims = 1; dims <= 3; ++dims) {
    GridSpec grid{dims, 1.5, dims == 3 ? 17 : 33, Boundary::Periodic};
    for (int trial = 0; trial < 10; ++trial) {
      auto f = random_smooth_state(grid, 0.1, rng);
      double t = 0.2 * trial;
      auto a = rhs_generalized(f, t, dims, 1.0);
      auto b = rhs_extremal_surface(f, t, dims);
      double scale = std::max(1.0, max_abs(b));
      CHECK(max_abs_diff(a, b) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("generalized rhs on constant states matches the reduced ODE") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  for (double alpha : {1.0, 0.5, 0.0, -1.0}) {
    EquationKind eq{Variant::GeneralizedExtremal, 1, alpha};
    auto ode = reduced_ode(eq);
    // keep e^{alpha t} u^2 away from 1 so every combination stays admissible
    for (double u : {0.3, -0.5, 0.6}) {
      for (double t : {0.0, 0.5}) {
        auto f = constant_state(grid, 0.1, u);
        auto acc = rhs_generalized(f, t, 1, alpha);
        double expected = ode(t, {u})[0];
        for (double v : acc) CHECK(v == Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("extremal rhs on constant states matches the reduced ODE") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  EquationKind eq{Variant::ExtremalSurface, 2, 1.0};
  auto ode = reduced_ode(eq);
  for (double u : {0.4, -0.6}) {
    auto f = constant_state(grid, 0.0, u);
    auto acc = rhs_extremal_surface(f, 0.3, 2);
    double expected = ode(0.3, {u})[0];
    for (double v : acc) CHECK(v == Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("tau-frame rhs on constant states matches the reduced ODE") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  EquationKind eq{Variant::BornInfeldTau, 1, 1.0};
  auto ode = reduced_ode(eq);
  for (double u : {0.4, -0.3}) {
    auto f = constant_state(grid, 0.2, u);
    auto acc = rhs_born_infeld_tau(f, -1.3, 1);
    double expected = ode(-1.3, {u})[0];
    for (double v : acc) CHECK(v == Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("tau-frame rhs linearizes with cubic remainder") {
  GridSpec grid{1, kPi, 129, Boundary::Periodic};
  std::mt19937 rng(5);
  auto base = random_smooth_state(grid, 1.0, rng);
  const double tau = -1.2;
  auto linear_part = [&](const Field& f) {
    auto pxx = laplacian(f.phi, grid);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = pxx[i] + 2.0 / tau * f.phi_t[i];
    return out;
  };
  auto nonlinear_residual = [&](double s) {
    Field f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f.phi[i] = s * base.phi[i];
      f.phi_t[i] = s * base.phi_t[i];
    }
    auto full = rhs_born_infeld_tau(f, tau, 1);
    auto lin = linear_part(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i)
      worst = std::max(worst, std::abs(full[i] - lin[i]));
    return worst;
  };
  double r3 = nonlinear_residual(1e-3);
  double r4 = nonlinear_residual(1e-4);
  CHECK(r3 > 0.0);
  CHECK(r3 / r4 == Approx(1000.0).epsilon(0.35)); // cubic in the state size
}

TEST_CASE("timelike status flags sharp time derivatives but not gradients") {
  GridSpec grid{1, 2.0, 33, Boundary::ZeroPad};
  Field zero(grid);
  auto s0 = timelike_status(zero, 0.0, 1.0);
  CHECK(s0.min_determinant_factor == 1.0);
  CHECK(s0.min_denominator == 1.0);
  CHECK_FALSE(s0.degenerate);

  Field spike(grid);
  spike.phi_t[grid.size() / 2] = 1.2;
  auto s1 = timelike_status(spike, 0.0, 1.0);
  CHECK(s1.min_determinant_factor == Approx(1.0 - 1.44).epsilon(1e-14));
  CHECK(s1.degenerate);

  // steep purely spatial profile: 1 + |grad|^2 only helps
  GridSpec wrap{1, kPi, 257, Boundary::Periodic};
  Field steep(wrap);
  for (std::size_t i = 0; i < wrap.size(); ++i)
    steep.phi[i] = 1.5 * std::sin(2.0 * wrap.coordinate(static_cast<int>(i)));
  auto s2 = timelike_status(steep, 0.0, 1.0);
  CHECK(s2.min_determinant_factor >= 1.0 - 1e-12);
  CHECK_FALSE(s2.degenerate);
}

TEST_CASE("degeneracy errors carry the offending point and value") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  auto f = constant_state(grid, 0.0, 1.2); // 1 - 1.44 < 0 at t = 0
  try {
    rhs_generalized(f, 0.0, 1, 1.0);
    FAIL("expected DegeneracyError");
  } catch (const DegeneracyError& e) {
    CHECK(e.kind() == DegeneracyError::Kind::DenominatorDegenerate);
    CHECK(e.value() == Approx(1.0 - 1.44).epsilon(1e-12));
    CHECK(e.time() == 0.0);
  }
  try {
    rhs_extremal_surface(f, 0.0, 1);
    FAIL("expected DegeneracyError");
  } catch (const DegeneracyError& e) {
    CHECK(e.kind() == DegeneracyError::Kind::TimelikeViolation);
    CHECK(e.flat_index() == 0);
  }
  CHECK_THROWS_AS(rhs_born_infeld_tau(constant_state(grid, 0.0, 1.2), -1.0, 1),
                  DegeneracyError);
  CHECK_THROWS_AS(rhs_born_infeld_tau(constant_state(grid, 0.0, 0.1), 0.5, 1),
                  ContractError); // tau >= 0 is out of range
}

TEST_CASE("evaluation succeeds whenever the denominator stays in the working band") {
  std::mt19937 rng(99);
  GridSpec grid{1, 1.5, 33, Boundary::Periodic};
  int accepted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_real_distribution<double> amp(0.0, 0.6);
    auto f = random_smooth_state(grid, amp(rng), rng);
    std::uniform_real_distribution<double> time(0.0, 2.0);
    double t = time(rng);
    std::uniform_real_distribution<double> alpha_pick(-0.5, 1.0);
    double alpha = alpha_pick(rng);
    auto status = timelike_status(f, t, alpha);
    if (status.min_denominator < 0.5) continue; // outside the guaranteed band
    ++accepted;
    std::vector<double> acc;
    REQUIRE_NOTHROW(acc = rhs_generalized(f, t, 1, alpha));
    for (double v : acc) REQUIRE(std::isfinite(v));
  }
  CHECK(accepted > 50); // the sample must actually exercise the band
}

TEST_CASE("small states reduce every equation to the linear one") {
  GridSpec grid{1, kPi, 65, Boundary::Periodic};
  std::mt19937 rng(77);
  auto base = random_smooth_state(grid, 1.0, rng);
  const double t = 0.4;
  auto scaled = [&](double s) {
    Field f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f.phi[i] = s * base.phi[i];
      f.phi_t[i] = s * base.phi_t[i];
    }
    return f;
  };
  auto residual = [&](auto&& rhs_fn, double s, double power) {
    auto f = scaled(s);
    auto full = rhs_fn(f);
    auto lin = rhs_linear(f, t, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i)
      worst = std::max(worst, std::abs(full[i] - lin[i]));
    return worst / std::pow(s, power);
  };
  // quadratic remainder for the semilinear equation
  double c1 = residual([&](const Field& f) { return rhs_semilinear(f, t, 1); }, 1e-3, 2.0);
  double c2 = residual([&](const Field& f) { return rhs_semilinear(f, t, 1); }, 1e-4, 2.0);
  CHECK(c1 == Approx(c2).epsilon(0.05));
  // cubic remainder for the quasilinear equations
  double g1 =
      residual([&](const Field& f) { return rhs_generalized(f, t, 1, 0.7); }, 1e-2, 3.0);
  double g2 =
      residual([&](const Field& f) { return rhs_generalized(f, t, 1, 0.7); }, 1e-3, 3.0);
  CHECK(g1 == Approx(g2).epsilon(0.05));
  double x1 =
      residual([&](const Field& f) { return rhs_extremal_surface(f, t, 1); }, 1e-2, 3.0);
  double x2 =
      residual([&](const Field& f) { return rhs_extremal_surface(f, t, 1); }, 1e-3, 3.0);
  CHECK(x1 == Approx(x2).epsilon(0.05));
}
