#include <catch2/catch.hpp>

#include <cmath>
#include <cstring>

#include "dsw/bump.hpp"
#include "dsw/integrator.hpp"
#include "dsw/oracles.hpp"

using namespace dsw;

namespace {

Field constant_state(const GridSpec& grid, double phi, double phi_t) {
  Field f(grid);
  std::fill(f.phi.begin(), f.phi.end(), phi);
  std::fill(f.phi_t.begin(), f.phi_t.end(), phi_t);
  return f;
}

MonitorSet no_monitors() {
  MonitorSet m;
  m.energy = false;
  return m;
}

} // namespace

TEST_CASE("zero state is a fixed point of every equation") {
  GridSpec grid{1, 2.0, 17, Boundary::Periodic};
  Field zero(grid);
  for (auto variant : {Variant::LinearDissipative, Variant::SemilinearNull,
                       Variant::GeneralizedExtremal, Variant::ExtremalSurface}) {
    EquationKind eq{variant, 1, 0.5};
    auto next = rk4_step(zero, 0.0, 0.01, eq);
    CHECK(max_abs(next.phi) == 0.0);
    CHECK(max_abs(next.phi_t) == 0.0);
  }
  auto next = rk4_step(zero, -2.0, 0.01, {Variant::BornInfeldTau, 1, 1.0});
  CHECK(max_abs(next.phi) == 0.0);
}

TEST_CASE("linear constant data integrates to the closed-form exponential") {
  GridSpec grid{1, 1.0, 5, Boundary::Periodic};
  auto f = constant_state(grid, 0.0, 1.0);
  StepControl ctrl;
  ctrl.dt_max = 1e-3;
  ctrl.cfl = 1.0;
  ctrl.t_end = 1.0;
  auto run = evolve(f, {Variant::LinearDissipative, 1, 1.0}, ctrl, no_monitors());
  REQUIRE(run.status == RunStatus::Completed);
  double expected = std::exp(-1.5); // 0.2231301601...
  CHECK(std::abs(run.final_state.phi_t[0] - expected) / expected < 1e-9);
}

TEST_CASE("global error of the stepper falls sixteen-fold per dt halving") {
  GridSpec grid{1, 1.0, 5, Boundary::Periodic};
  auto error_at = [&](double dt) {
    auto f = constant_state(grid, 0.0, 1.0);
    StepControl ctrl;
    ctrl.dt_max = dt;
    ctrl.cfl = 1.0;
    ctrl.t_end = 1.0;
    auto run = evolve(f, {Variant::SemilinearNull, 1, 1.0}, ctrl, no_monitors());
    double exact = riccati_solution(1, 1.0, 1.0); // decaying branch, u0 = 1
    return std::abs(run.final_state.phi_t[0] - exact);
  };
  double e1 = error_at(0.1);
  double e2 = error_at(0.05);
  CHECK(e1 / e2 == Approx(16.0).epsilon(0.3));
}

TEST_CASE("zero data completes with an identically zero trajectory") {
  GridSpec grid{1, 3.5, 33, Boundary::ZeroPad};
  auto field = make_initial_data({1.0, 1.0}, {1.0, 1.0}, 0.0, grid);
  StepControl ctrl;
  ctrl.t_end = 0.5;
  ctrl.snapshot_stride = 5;
  for (auto variant : {Variant::LinearDissipative, Variant::SemilinearNull,
                       Variant::GeneralizedExtremal, Variant::ExtremalSurface}) {
    auto run = evolve(field, {variant, 1, 0.5}, ctrl, no_monitors());
    REQUIRE(run.status == RunStatus::Completed);
    for (const auto& snap : run.trajectory) {
      CHECK(max_abs(snap.phi) == 0.0);
      CHECK(max_abs(snap.phi_t) == 0.0);
    }
  }
}

TEST_CASE("constant-data quadratic growth is detected near the closed-form time") {
  GridSpec grid{1, 1.0, 5, Boundary::Periodic};
  auto f = constant_state(grid, 0.0, 2.0);
  StepControl ctrl;
  ctrl.dt_max = 1e-4;
  ctrl.cfl = 1.0;
  ctrl.t_end = 2.0;
  auto run = evolve(f, {Variant::SemilinearNull, 1, 1.0}, ctrl, no_monitors());
  REQUIRE(run.status == RunStatus::BlowUp);
  double t_star = *riccati_blowup_time(1, 2.0); // ln(4)/1.5
  CHECK(std::abs(run.t_detect - t_star) / t_star < 0.02);
  CHECK(run.t_detect <= ctrl.t_end);
  CHECK(run.t_certified <= run.t_detect);

  SECTION("detection time is robust under dt halving") {
    StepControl fine = ctrl;
    fine.dt_max = 5e-5;
    auto run2 = evolve(f, {Variant::SemilinearNull, 1, 1.0}, fine, no_monitors());
    REQUIRE(run2.status == RunStatus::BlowUp);
    CHECK(std::abs(run2.t_detect - run.t_detect) < 0.005 * t_star);
  }
}

TEST_CASE("initially degenerate quasilinear data reports an immediate event") {
  GridSpec grid{1, 1.0, 5, Boundary::Periodic};
  auto f = constant_state(grid, 0.0, 1.05); // e^0 u^2 > 1
  StepControl ctrl;
  ctrl.t_end = 1.0;
  auto run = evolve(f, {Variant::GeneralizedExtremal, 1, 1.0}, ctrl, no_monitors());
  REQUIRE(run.status == RunStatus::BlowUp);
  CHECK(*run.criterion == BlowUpCriterion::DenominatorDegenerate);
  CHECK(run.t_detect < 0.02);
  auto run2 = evolve(f, {Variant::ExtremalSurface, 1, 1.0}, ctrl, no_monitors());
  REQUIRE(run2.status == RunStatus::BlowUp);
  CHECK(*run2.criterion == BlowUpCriterion::TimelikeViolation);
}

TEST_CASE("admissible step never shrinks as the wave speed decays") {
  EquationKind eq{Variant::LinearDissipative, 1, 1.0};
  double prev = wave_speed(eq, 0.0);
  for (double t = 0.25; t <= 10.0; t += 0.25) {
    double now = wave_speed(eq, t);
    CHECK(now <= prev);
    prev = now;
  }
  CHECK(wave_speed({Variant::BornInfeldTau, 1, 1.0}, -1.0) == 1.0);
}

TEST_CASE("compact support spreads no faster than the travel budget") {
  // The truncation-error field rides the characteristics to the front and
  // decays evanescently beyond it (about a factor 3 per cell at this
  // resolution), so the measurable support hugs the light cone plus a thin
  // O(h) boundary layer.
  const double radius = 1.0;
  GridSpec grid{1, 3.5, 257, Boundary::ZeroPad};
  auto field = make_initial_data({radius, 1.0}, {radius, 1.0}, 0.1, grid);
  StepControl ctrl;
  ctrl.t_end = 3.0;
  ctrl.snapshot_stride = 40;
  auto run = evolve(field, {Variant::LinearDissipative, 1, 1.0}, ctrl, no_monitors());
  REQUIRE(run.status == RunStatus::Completed);
  const double h = grid.spacing();
  for (const auto& snap : run.trajectory) {
    double front = radius + 2.0 * (1.0 - std::exp(-0.5 * snap.t));
    double peak = max_abs(snap.phi);
    if (peak == 0.0) continue;
    auto leak_beyond = [&](double margin) {
      double outside = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.radius(i) > front + margin)
          outside = std::max(outside, std::abs(snap.phi[i]));
      return outside / peak;
    };
    CHECK(leak_beyond(2.0 * h) <= 1e-4);
    CHECK(leak_beyond(12.0 * h) <= 1e-9);
  }
}

TEST_CASE("identical configurations produce bitwise identical trajectories") {
  GridSpec grid{1, 3.5, 65, Boundary::ZeroPad};
  auto field = make_initial_data({1.0, 1.0}, {1.0, 0.5}, 0.05, grid);
  StepControl ctrl;
  ctrl.t_end = 1.0;
  MonitorSet monitors; // energy on
  auto a = evolve(field, {Variant::SemilinearNull, 1, 1.0}, ctrl, monitors);
  auto b = evolve(field, {Variant::SemilinearNull, 1, 1.0}, ctrl, monitors);
  REQUIRE(a.final_state.phi.size() == b.final_state.phi.size());
  CHECK(std::memcmp(a.final_state.phi.data(), b.final_state.phi.data(),
                    a.final_state.phi.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.final_state.phi_t.data(), b.final_state.phi_t.data(),
                    a.final_state.phi_t.size() * sizeof(double)) == 0);
  REQUIRE(a.energy_series.size() == b.energy_series.size());
  for (std::size_t k = 0; k < a.energy_series.size(); ++k)
    CHECK(a.energy_series[k].F == b.energy_series[k].F);
}

TEST_CASE("three-dimensional runs decay like the constant-data closed form") {
  GridSpec grid{3, 1.0, 5, Boundary::Periodic};
  auto f = constant_state(grid, 0.0, 1.0);
  StepControl ctrl;
  ctrl.dt_max = 1e-3;
  ctrl.cfl = 1.0;
  ctrl.t_end = 1.0;
  ctrl.snapshot_stride = 250;
  MonitorSet monitors;
  monitors.cap.max_total = 1;
  auto run = evolve(f, {Variant::LinearDissipative, 3, 1.0}, ctrl, monitors);
  REQUIRE(run.status == RunStatus::Completed);
  // n = 3: phi_t = e^{-2.5 t}
  double expected = std::exp(-2.5);
  for (double v : run.final_state.phi_t)
    CHECK(std::abs(v - expected) / expected < 1e-9);
  // E^{0,0}(t) = E(0) e^{-(n+4)t/2}
  const auto& first = run.energy_series.front().entry(0, 0);
  const auto& last = run.energy_series.back().entry(0, 0);
  CHECK(last.E == Approx(first.E * std::exp(-3.5)).epsilon(1e-8));
  // snapshots: initial, every 250th step, final; strictly increasing times
  CHECK(run.trajectory.size() >= 5);
  CHECK(run.trajectory.size() <= 7);
  CHECK(run.trajectory.front().t == 0.0);
  CHECK(run.trajectory.back().t == Approx(1.0));
  for (std::size_t k = 0; k + 1 < run.trajectory.size(); ++k)
    CHECK(run.trajectory[k].t < run.trajectory[k + 1].t);
}

TEST_CASE("energy is sampled once per accepted step plus the initial state") {
  GridSpec grid{1, 3.5, 33, Boundary::ZeroPad};
  auto field = make_initial_data({1.0, 1.0}, {1.0, 1.0}, 0.01, grid);
  StepControl ctrl;
  ctrl.t_end = 0.2;
  MonitorSet monitors;
  monitors.cap.max_total = 1;
  auto run = evolve(field, {Variant::LinearDissipative, 1, 1.0}, ctrl, monitors);
  REQUIRE(run.status == RunStatus::Completed);
  CHECK(run.energy_series.size() == run.steps + 1);
  CHECK(run.trajectory.front().t == 0.0);
  CHECK(run.trajectory.back().t == Approx(0.2));
}
