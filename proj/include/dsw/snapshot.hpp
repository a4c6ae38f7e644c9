#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dsw/equations.hpp"
#include "dsw/grid.hpp"

namespace dsw {

// Snapshot files: a small text header (format tag, grid shape, time) followed
// by the raw little-endian doubles of phi and phi_t, so stored states are
// bit-exact.

inline void write_snapshot(const std::string& path, const StateSnapshot& snap,
                           const GridSpec& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write snapshot file: " + path);
  char header[256];
  std::snprintf(header, sizeof(header),
                "dsw-snapshot 1\ndims %d points %d extent %.17g boundary %s\nt %.17g\n"
                "fields phi phi_t\n",
                grid.dims, grid.points, grid.extent,
                grid.boundary == Boundary::Periodic ? "periodic" : "zero_pad", snap.t);
  out << header;
  out.write(reinterpret_cast<const char*>(snap.phi.data()),
            static_cast<std::streamsize>(snap.phi.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(snap.phi_t.data()),
            static_cast<std::streamsize>(snap.phi_t.size() * sizeof(double)));
  if (!out) throw ConfigError("short write on snapshot file: " + path);
}

struct LoadedSnapshot {
  GridSpec grid;
  StateSnapshot state;
};

inline LoadedSnapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot file: " + path);
  std::string magic_line, shape_line, t_line, fields_line;
  std::getline(in, magic_line);
  std::getline(in, shape_line);
  std::getline(in, t_line);
  std::getline(in, fields_line);
  if (magic_line != "dsw-snapshot 1")
    throw ConfigError("not a dsw snapshot file: " + path);

  LoadedSnapshot loaded;
  {
    std::istringstream ss(shape_line);
    std::string kw_dims, kw_points, kw_extent, kw_boundary, boundary;
    ss >> kw_dims >> loaded.grid.dims >> kw_points >> loaded.grid.points >> kw_extent >>
        loaded.grid.extent >> kw_boundary >> boundary;
    if (kw_dims != "dims" || kw_points != "points" || kw_extent != "extent" ||
        kw_boundary != "boundary")
      throw ConfigError("malformed snapshot header: " + path);
    loaded.grid.boundary = boundary == "periodic" ? Boundary::Periodic : Boundary::ZeroPad;
  }
  {
    std::istringstream ss(t_line);
    std::string kw;
    ss >> kw >> loaded.state.t;
    if (kw != "t") throw ConfigError("malformed snapshot header: " + path);
  }
  const std::size_t total = loaded.grid.size();
  loaded.state.phi.resize(total);
  loaded.state.phi_t.resize(total);
  in.read(reinterpret_cast<char*>(loaded.state.phi.data()),
          static_cast<std::streamsize>(total * sizeof(double)));
  in.read(reinterpret_cast<char*>(loaded.state.phi_t.data()),
          static_cast<std::streamsize>(total * sizeof(double)));
  if (!in) throw ConfigError("truncated snapshot file: " + path);
  return loaded;
}

} // namespace dsw
