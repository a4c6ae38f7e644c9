#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsw/config.hpp"
#include "dsw/csv.hpp"
#include "dsw/experiments.hpp"
#include "dsw/integrator.hpp"
#include "dsw/oracles.hpp"
#include "dsw/snapshot.hpp"

namespace dsw {

// Command-line surface. Exit codes: 0 success, 1 validation/usage error,
// 2 numerical event with --fail-on-blowup, 3 internal error. Errors also
// leave a one-line machine-readable record on the diagnostic stream.

namespace cli_detail {

inline void report_error(std::ostream& err, const std::string& kind,
                         const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  err << j.dump() << "\n";
}

inline std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    std::size_t pos = 0;
    double value = std::stod(cell, &pos);
    if (pos != cell.size()) throw ConfigError("bad number in list: '" + cell + "'");
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

inline std::string outcome_summary(const RunOutcome& run) {
  std::ostringstream os;
  switch (run.status) {
    case RunStatus::Completed:
      os << "completed t=" << run.final_time;
      break;
    case RunStatus::BlowUp:
      os << "blow_up criterion=" << criterion_name(*run.criterion)
         << " t_detect=" << run.t_detect << " t_certified=" << run.t_certified;
      break;
    case RunStatus::StepFailure:
      os << "step_failure t=" << run.final_time;
      break;
  }
  os << " steps=" << run.steps;
  return os.str();
}

inline void write_run_outputs(const RunConfig& config, const RunOutcome& run,
                              std::ostream& out) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_directory);
  write_config(config, config.output_directory + "/effective_config.json");
  if (config.write_series) {
    auto series = run.energy_series;
    if (config.equation.variant == Variant::LinearDissipative && series.size() >= 3) {
      auto residual = identity_residual(series, config.equation.n);
      for (std::size_t k = 0; k < series.size(); ++k)
        series[k].identity_residual = residual[k];
    }
    std::ofstream file(config.output_directory + "/series.csv");
    emit_series(series, file);
    out << "wrote " << config.output_directory << "/series.csv (" << series.size()
        << " samples)\n";
  }
  if (config.write_snapshots) {
    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "/snap_%06zu.bin", i);
      write_snapshot(config.output_directory + name, run.trajectory[i], config.grid);
    }
    out << "wrote " << run.trajectory.size() << " snapshots\n";
  }
}

inline RunConfig sweep_base_config() {
  RunConfig config;
  config.equation = {Variant::GeneralizedExtremal, 1, 1.0};
  config.grid = {1, 3.5, 257, Boundary::ZeroPad};
  config.control.t_end = 20.0;
  config.control.dt_max = 0.01;
  config.monitors.energy = false;
  return config;
}

inline int run_oracle_case(const std::string& name, std::ostream& out) {
  if (name == "linear") {
    GridSpec grid{1, 1.0, 5, Boundary::Periodic};
    Field data(grid);
    std::fill(data.phi_t.begin(), data.phi_t.end(), 1.0);
    StepControl ctrl;
    ctrl.dt_max = 1e-3;
    ctrl.cfl = 1.0;
    ctrl.t_end = 1.0;
    MonitorSet monitors;
    monitors.energy = false;
    auto run = evolve(data, {Variant::LinearDissipative, 1, 1.0}, ctrl, monitors);
    double expected = linear_constant_solution(1, 1.0, 1.0);
    double measured = run.final_state.phi_t.front();
    out << "case linear: u(1) closed form " << format_full(expected) << ", pde "
        << format_full(measured) << ", rel error "
        << format_full(std::abs(measured - expected) / expected) << "\n";
    return 0;
  }
  if (name == "riccati") {
    GridSpec grid{1, 1.0, 5, Boundary::Periodic};
    Field data(grid);
    std::fill(data.phi_t.begin(), data.phi_t.end(), 2.0);
    StepControl ctrl;
    ctrl.dt_max = 1e-4;
    ctrl.cfl = 1.0;
    ctrl.t_end = 2.0;
    MonitorSet monitors;
    monitors.energy = false;
    auto run = evolve(data, {Variant::SemilinearNull, 1, 1.0}, ctrl, monitors);
    double t_star = *riccati_blowup_time(1, 2.0);
    out << "case riccati: t* closed form " << format_full(t_star);
    if (run.blew_up())
      out << ", pde detection " << format_full(run.t_detect) << " ("
          << criterion_name(*run.criterion) << ")";
    else
      out << ", pde: no event before t_end";
    out << "\n";
    return 0;
  }
  if (name == "fourier") {
    const double length = 3.14159265358979323846; // half-width; period 2L
    GridSpec grid{1, length, 513, Boundary::Periodic};
    const double k = 2.0 * 3.14159265358979323846 / length; // commensurate with period 2L
    Field data(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      data.phi[i] = std::sin(k * grid.coordinate(static_cast<int>(i)));
    StepControl ctrl;
    ctrl.t_end = 5.0;
    ctrl.dt_max = 0.01;
    MonitorSet monitors;
    monitors.energy = false;
    auto run = evolve(data, {Variant::LinearDissipative, 1, 1.0}, ctrl, monitors);
    auto reference = fourier_oracle(k, 1, 1.0, 0.0, {5.0});
    // project onto the mode
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double s = std::sin(k * grid.coordinate(static_cast<int>(i)));
      double w = quadrature_weight(grid, i);
      num += w * run.final_state.phi[i] * s;
      den += w * s * s;
    }
    out << "case fourier: a(5) mode ode " << format_full(reference[0]) << ", pde "
        << format_full(num / den) << ", rel error "
        << format_full(std::abs(num / den - reference[0]) / std::abs(reference[0]))
        << "\n";
    return 0;
  }
  throw ConfigError("unknown oracle case '" + name + "' (linear|riccati|fourier)");
}

} // namespace cli_detail

inline int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wave equations on an exponentially expanding background"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "evolve one configured Cauchy problem");
  std::string run_config_path;
  bool fail_on_blowup = false;
  run_cmd->add_option("--config", run_config_path, "JSON config file")->required();
  run_cmd->add_flag("--fail-on-blowup", fail_on_blowup,
                    "exit 2 when a detection event ends the run");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "lifespan vs data size");
  double sweep_alpha = 1.0;
  std::string sweep_eps;
  std::string sweep_config_path;
  std::string sweep_out = "out";
  double sweep_t_end = 20.0;
  sweep_cmd->add_option("--alpha", sweep_alpha, "exponent parameter (<= 1)")->required();
  sweep_cmd->add_option("--eps", sweep_eps, "comma-separated data sizes")->required();
  sweep_cmd->add_option("--config", sweep_config_path, "base JSON config (optional)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_option("--t-end", sweep_t_end, "censoring horizon");

  // converge
  auto* conv_cmd = app.add_subcommand("converge", "grid convergence order study");
  std::string conv_config_path;
  int conv_levels = 3;
  conv_cmd->add_option("--config", conv_config_path, "JSON config file")->required();
  conv_cmd->add_option("--levels", conv_levels, "refinement levels (>= 3)");

  // crosscheck
  auto* cross_cmd = app.add_subcommand("crosscheck",
                                       "coordinate-time vs conformal-time comparison");
  double cross_tc = 4.0;
  double cross_eps = 0.01;
  int cross_points = 129;
  int cross_levels = 3;
  cross_cmd->add_option("--t-c", cross_tc, "final coordinate time");
  cross_cmd->add_option("--eps", cross_eps, "data size");
  cross_cmd->add_option("--points", cross_points, "coarsest grid points per axis");
  cross_cmd->add_option("--levels", cross_levels, "refinement levels");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "closed-form reference cases");
  std::string oracle_case;
  oracle_cmd->add_option("--case", oracle_case, "linear | riccati | fourier")->required();

  std::reverse(args.begin(), args.end()); // CLI11 consumes back-to-front
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) { // --help
      out << app.help();
      return 0;
    }
    cli_detail::report_error(err, "usage", e.what());
    err << app.help();
    return 1;
  }

  try {
    if (*run_cmd) {
      RunConfig config = parse_config(run_config_path);
      auto run = evolve(config.initial_data(), config.equation, config.control,
                        config.monitors);
      cli_detail::write_run_outputs(config, run, out);
      out << cli_detail::outcome_summary(run) << "\n";
      if (run.status == RunStatus::StepFailure) {
        cli_detail::report_error(err, "step_failure", "time step underflow");
        return 3;
      }
      if (fail_on_blowup && run.blew_up()) {
        cli_detail::report_error(err, "blow_up", cli_detail::outcome_summary(run));
        return 2;
      }
      return 0;
    }

    if (*sweep_cmd) {
      RunConfig base = sweep_config_path.empty() ? cli_detail::sweep_base_config()
                                                 : parse_config(sweep_config_path);
      SweepSetup setup;
      setup.grid = base.grid;
      setup.profile_f = base.profile_f;
      setup.profile_g = base.profile_g;
      setup.margin = base.margin;
      setup.control = base.control;
      setup.control.t_end = sweep_t_end;
      setup.n = base.grid.dims;
      auto eps_list = cli_detail::parse_double_list(sweep_eps);
      auto sweep = lifespan_sweep(sweep_alpha, eps_list, setup);

      std::filesystem::create_directories(sweep_out);
      std::ofstream file(sweep_out + "/sweep.csv");
      emit_sweep(sweep.records, sweep.fit, file);
      emit_sweep(sweep.records, sweep.fit, out);
      if (sweep.fit)
        out << "fit: slope " << format_full(sweep.fit->slope) << " over "
            << sweep.fit->records_used << " uncensored records\n";
      else
        out << "fit: absent (fewer than 3 uncensored records)\n";
      return 0;
    }

    if (*conv_cmd) {
      RunConfig config = parse_config(conv_config_path);
      ConvergenceSetup setup;
      setup.eq = config.equation;
      setup.grid = config.grid;
      setup.profile_f = config.profile_f;
      setup.profile_g = config.profile_g;
      setup.eps = config.eps;
      setup.margin = config.margin;
      setup.control = config.control;
      setup.levels = conv_levels;
      auto report = convergence_study(setup);
      if (report.degenerate) {
        out << "degenerate study: successive differences are identically zero\n";
        return 0;
      }
      for (std::size_t k = 0; k < report.diffs.size(); ++k)
        out << "level " << k << " -> " << k + 1 << ": diff "
            << format_full(report.diffs[k]) << "\n";
      for (std::size_t k = 0; k < report.orders.size(); ++k)
        out << "order estimate " << k << ": " << format_full(report.orders[k]) << "\n";
      return 0;
    }

    if (*cross_cmd) {
      double prev = 0.0;
      for (int level = 0; level < cross_levels; ++level) {
        CrosscheckSetup setup;
        setup.grid = {1, 3.5, (cross_points - 1) * (1 << level) + 1, Boundary::ZeroPad};
        setup.eps = cross_eps;
        setup.t_final = cross_tc;
        auto report = coordinate_crosscheck(setup);
        out << "points " << setup.grid.points << ": max discrepancy "
            << format_full(report.max_discrepancy);
        if (level > 0)
          out << "  order " << format_full(std::log2(prev / report.max_discrepancy));
        out << "\n";
        prev = report.max_discrepancy;
      }
      return 0;
    }

    if (*oracle_cmd) return cli_detail::run_oracle_case(oracle_case, out);
  } catch (const ConfigError& e) {
    cli_detail::report_error(err, "config", e.what());
    return 1;
  } catch (const ContractError& e) {
    cli_detail::report_error(err, "contract", e.what());
    return 1;
  } catch (const std::exception& e) {
    cli_detail::report_error(err, "internal", e.what());
    return 3;
  }
  return 1;
}

} // namespace dsw
