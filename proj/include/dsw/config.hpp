#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsw/bump.hpp"
#include "dsw/energy.hpp"
#include "dsw/equations.hpp"
#include "dsw/grid.hpp"
#include "dsw/integrator.hpp"

namespace dsw {

inline constexpr int kConfigSchemaVersion = 1;

/// Full run description, as read from a JSON config file. Defaults are made
/// explicit on parse so a serialize/parse round trip is lossless.
struct RunConfig {
  EquationKind equation;
  GridSpec grid{1, 3.5, 257, Boundary::ZeroPad};
  BumpProfile profile_f{1.0, 1.0};
  BumpProfile profile_g{1.0, 1.0};
  double eps = 0.01;
  double margin = 0.5;
  StepControl control;
  MonitorSet monitors;
  std::string output_directory = "out";
  bool write_series = true;
  bool write_snapshots = false;

  Field initial_data() const {
    return make_initial_data(profile_f, profile_g, eps, grid, margin);
  }
};

namespace detail {

inline std::optional<Variant> variant_from_string(const std::string& s) {
  if (s == "linear") return Variant::LinearDissipative;
  if (s == "semilinear") return Variant::SemilinearNull;
  if (s == "generalized") return Variant::GeneralizedExtremal;
  if (s == "extremal") return Variant::ExtremalSurface;
  if (s == "born_infeld_tau") return Variant::BornInfeldTau;
  return std::nullopt;
}

inline std::optional<Boundary> boundary_from_string(const std::string& s) {
  if (s == "zero_pad") return Boundary::ZeroPad;
  if (s == "periodic") return Boundary::Periodic;
  return std::nullopt;
}

inline const char* boundary_name(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "zero_pad";
}

/// Collects field-path-qualified violations so a bad config reports all of
/// them at once.
struct Violations {
  std::vector<std::string> messages;
  void add(const std::string& m) { messages.push_back(m); }
  void raise_if_any() const {
    if (messages.empty()) return;
    std::string joined = "invalid config:";
    for (const auto& m : messages) joined += "\n  - " + m;
    throw ConfigError(joined);
  }
};

inline void check_known_keys(const nlohmann::json& obj, const std::string& path,
                             const std::vector<std::string>& known, Violations& v) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : known)
      if (it.key() == k) ok = true;
    if (!ok) v.add(path + "." + it.key() + ": unknown key");
  }
}

template <typename T>
inline T fetch(const nlohmann::json& obj, const std::string& path, const char* key,
               T fallback, Violations& v) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    v.add(path + "." + key + ": wrong type");
    return fallback;
  }
}

} // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["equation"] = {{"variant", variant_name(c.equation.variant)}, {"n", c.equation.n}};
  if (c.equation.variant == Variant::GeneralizedExtremal)
    j["equation"]["alpha"] = c.equation.alpha;
  j["grid"] = {{"dims", c.grid.dims},
               {"extent", c.grid.extent},
               {"points", c.grid.points},
               {"boundary", detail::boundary_name(c.grid.boundary)}};
  j["data"] = {{"radius", c.profile_f.radius},
               {"amplitude_f", c.profile_f.amplitude},
               {"amplitude_g", c.profile_g.amplitude},
               {"eps", c.eps},
               {"margin", c.margin}};
  j["control"] = {{"cfl", c.control.cfl},
                  {"dt_max", c.control.dt_max},
                  {"t_start", c.control.t_start},
                  {"t_end", c.control.t_end},
                  {"snapshot_stride", c.control.snapshot_stride},
                  {"amplitude_cap", c.control.amplitude_cap}};
  j["monitors"] = {{"energy", c.monitors.energy},
                   {"max_total", c.monitors.cap.max_total},
                   {"max_time_order", c.monitors.cap.max_time_order}};
  j["output"] = {{"directory", c.output_directory},
                 {"series", c.write_series},
                 {"snapshots", c.write_snapshots}};
  return j;
}

/// Parse and validate. Reports every violated invariant, field-path
/// qualified, not just the first.
inline RunConfig config_from_json(const nlohmann::json& j) {
  detail::Violations v;
  RunConfig c;

  detail::check_known_keys(
      j, "$", {"schema_version", "equation", "grid", "data", "control", "monitors", "output"},
      v);
  int version = detail::fetch<int>(j, "$", "schema_version", kConfigSchemaVersion, v);
  if (version != kConfigSchemaVersion)
    v.add("$.schema_version: unsupported version " + std::to_string(version));

  if (j.contains("equation")) {
    const auto& e = j.at("equation");
    detail::check_known_keys(e, "equation", {"variant", "n", "alpha"}, v);
    std::string variant =
        detail::fetch<std::string>(e, "equation", "variant", "linear", v);
    auto parsed = detail::variant_from_string(variant);
    if (!parsed)
      v.add("equation.variant: unknown variant '" + variant + "'");
    else
      c.equation.variant = *parsed;
    c.equation.n = detail::fetch<int>(e, "equation", "n", 1, v);
    bool has_alpha = e.contains("alpha");
    if (c.equation.variant == Variant::GeneralizedExtremal) {
      if (!has_alpha)
        v.add("equation.alpha: required for the generalized variant");
      else
        c.equation.alpha = detail::fetch<double>(e, "equation", "alpha", 1.0, v);
      if (has_alpha && !(c.equation.alpha <= 1.0))
        v.add("equation.alpha: must be <= 1 (standing assumption of the model)");
    } else if (has_alpha) {
      v.add("equation.alpha: only valid for the generalized variant");
    }
  }
  if (c.equation.n < 1 || c.equation.n > 3) v.add("equation.n: must be 1, 2 or 3");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::check_known_keys(g, "grid", {"dims", "extent", "points", "boundary"}, v);
    c.grid.dims = detail::fetch<int>(g, "grid", "dims", c.equation.n, v);
    c.grid.extent = detail::fetch<double>(g, "grid", "extent", 3.5, v);
    c.grid.points = detail::fetch<int>(g, "grid", "points", 257, v);
    std::string boundary =
        detail::fetch<std::string>(g, "grid", "boundary", "zero_pad", v);
    auto parsed = detail::boundary_from_string(boundary);
    if (!parsed)
      v.add("grid.boundary: unknown boundary '" + boundary + "'");
    else
      c.grid.boundary = *parsed;
  } else {
    c.grid.dims = c.equation.n;
  }
  if (c.grid.dims < 1 || c.grid.dims > 3) v.add("grid.dims: must be 1, 2 or 3");
  if (c.grid.points < 5) v.add("grid.points: must be >= 5 (stencil width)");
  if (!(c.grid.extent > 0.0)) v.add("grid.extent: must be > 0");

  if (j.contains("data")) {
    const auto& d = j.at("data");
    detail::check_known_keys(
        d, "data", {"radius", "amplitude_f", "amplitude_g", "eps", "margin"}, v);
    double radius = detail::fetch<double>(d, "data", "radius", 1.0, v);
    c.profile_f.radius = radius;
    c.profile_g.radius = radius;
    c.profile_f.amplitude = detail::fetch<double>(d, "data", "amplitude_f", 1.0, v);
    c.profile_g.amplitude = detail::fetch<double>(d, "data", "amplitude_g", 1.0, v);
    c.eps = detail::fetch<double>(d, "data", "eps", 0.01, v);
    c.margin = detail::fetch<double>(d, "data", "margin", 0.5, v);
  }
  if (!(c.profile_f.radius > 0.0)) v.add("data.radius: must be > 0");
  if (c.eps < 0.0) v.add("data.eps: must be >= 0");
  if (c.margin < 0.0) v.add("data.margin: must be >= 0");
  if (c.grid.boundary == Boundary::ZeroPad && c.profile_f.radius > 0.0) {
    double needed = c.profile_f.radius + kPropagationBudget + c.margin;
    if (c.grid.extent < needed) {
      std::ostringstream msg;
      msg << "grid.extent: " << c.grid.extent
          << " < radius + 2 + margin = " << needed
          << " (finite-propagation domain rule for zero_pad grids)";
      v.add(msg.str());
    }
  }

  bool tau_frame = c.equation.variant == Variant::BornInfeldTau;
  c.control.t_start = tau_frame ? -2.0 : 0.0;
  c.control.t_end = tau_frame ? -2.0 * std::exp(-0.5 * 4.0) : 10.0;
  if (j.contains("control")) {
    const auto& ctl = j.at("control");
    detail::check_known_keys(
        ctl, "control",
        {"cfl", "dt_max", "t_start", "t_end", "snapshot_stride", "amplitude_cap"}, v);
    c.control.cfl = detail::fetch<double>(ctl, "control", "cfl", 0.5, v);
    c.control.dt_max = detail::fetch<double>(ctl, "control", "dt_max", 0.01, v);
    c.control.t_start =
        detail::fetch<double>(ctl, "control", "t_start", c.control.t_start, v);
    c.control.t_end = detail::fetch<double>(ctl, "control", "t_end", c.control.t_end, v);
    c.control.snapshot_stride =
        detail::fetch<int>(ctl, "control", "snapshot_stride", 0, v);
    c.control.amplitude_cap =
        detail::fetch<double>(ctl, "control", "amplitude_cap", 1e6, v);
  }
  if (!(c.control.cfl > 0.0 && c.control.cfl <= 1.0))
    v.add("control.cfl: must be in (0, 1]");
  if (!(c.control.dt_max > 0.0)) v.add("control.dt_max: must be > 0");
  if (!(c.control.t_end > c.control.t_start))
    v.add("control.t_end: must exceed control.t_start");
  if (c.control.snapshot_stride < 0) v.add("control.snapshot_stride: must be >= 0");
  if (!(c.control.amplitude_cap > 0.0)) v.add("control.amplitude_cap: must be > 0");
  if (tau_frame) {
    if (c.control.t_start < -2.0 || !(c.control.t_start < 0.0))
      v.add("control.t_start: tau-frame runs need t_start in [-2, 0)");
    if (!(c.control.t_end < 0.0))
      v.add("control.t_end: tau-frame runs need t_end < 0 (tau is singular at 0)");
    if (c.grid.dims != 1) v.add("grid.dims: tau-frame runs require a 1D grid");
  }
  if (c.grid.dims != c.equation.n && !tau_frame)
    v.add("grid.dims: must equal equation.n");

  if (j.contains("monitors")) {
    const auto& m = j.at("monitors");
    detail::check_known_keys(m, "monitors", {"energy", "max_total", "max_time_order"}, v);
    c.monitors.energy = detail::fetch<bool>(m, "monitors", "energy", true, v);
    c.monitors.cap.max_total = detail::fetch<int>(m, "monitors", "max_total", 2, v);
    c.monitors.cap.max_time_order =
        detail::fetch<int>(m, "monitors", "max_time_order", 1, v);
  }
  if (c.monitors.cap.max_total < 0 || c.monitors.cap.max_total > 3)
    v.add("monitors.max_total: must be in [0, 3]");
  if (c.monitors.cap.max_time_order < 0 || c.monitors.cap.max_time_order > 1)
    v.add("monitors.max_time_order: must be 0 or 1");

  if (j.contains("output")) {
    const auto& o = j.at("output");
    detail::check_known_keys(o, "output", {"directory", "series", "snapshots"}, v);
    c.output_directory =
        detail::fetch<std::string>(o, "output", "directory", "out", v);
    c.write_series = detail::fetch<bool>(o, "output", "series", true, v);
    c.write_snapshots = detail::fetch<bool>(o, "output", "snapshots", false, v);
  }

  v.raise_if_any();
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

inline void write_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << to_json(c).dump(2) << "\n";
}

} // namespace dsw
