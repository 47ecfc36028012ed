#pragma once

#include "locrel/config.hpp"
#include "locrel/radiomap.hpp"

namespace locrel::testing {

/// Small desk config: full default extents, coarse grid, reduced draws.
inline const SystemConfig& small_cfg() {
  static const SystemConfig cfg = [] {
    SystemConfig c;
    c.numerics.grid_step_m = 25.0;
    c.numerics.map_samples = 20000;
    c.numerics.select_mc_samples = 2000;
    c.numerics.phase_nodes_meta = 16;
    c.numerics.phase_nodes_throughput = 8;
    c.numerics.hermite_nodes = 21;
    c.validate();
    return c;
  }();
  return cfg;
}

/// One shared coarse map per test process.
inline const RadioMap& small_map() {
  static const RadioMap map = RadioMap::build(small_cfg(), 2);
  return map;
}

/// Single-subcarrier config around BS 1, used by the tail/edge cross checks.
inline const SystemConfig& single_carrier_cfg() {
  static const SystemConfig cfg = [] {
    SystemConfig c;
    c.n_subcarriers = 1;
    c.numerics.grid_min_m = -200.0;
    c.numerics.grid_max_m = 400.0;
    c.numerics.grid_step_m = 4.0;
    c.numerics.map_samples = 1000000;
    c.numerics.select_mc_samples = 500;
    c.numerics.phase_nodes_meta = 16;
    c.numerics.phase_nodes_throughput = 8;
    c.validate();
    return c;
  }();
  return cfg;
}

inline const RadioMap& single_carrier_map() {
  static const RadioMap map = RadioMap::build(single_carrier_cfg(), 2);
  return map;
}

}  // namespace locrel::testing
