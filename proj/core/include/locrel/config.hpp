#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace locrel {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Numerical-method settings; defaults give the desk-scale setup.
struct NumericsConfig {
  double grid_min_m = -400.0;       ///< radio-map extent (left)
  double grid_max_m = 1400.0;       ///< radio-map extent (right)
  double grid_step_m = 1.0;         ///< radio-map spacing
  std::int64_t map_samples = 1000000;     ///< MC draws per map point
  std::int64_t select_mc_samples = 10000; ///< ping pairs for BS selection
  int phase_nodes_meta = 64;        ///< phase grid (per axis) for meta-probability
  int phase_nodes_throughput = 32;  ///< phase grid (per axis) for throughput
  int hermite_nodes = 41;           ///< Gauss-Hermite nodes for the estimate average
  double eps_target = 1e-3;         ///< outage level the map must resolve
  double min_bs_distance_m = 1.0;   ///< guard radius around each BS
  std::uint64_t seed = 12345;       ///< master seed; every artifact records it
};

/// System settings. Powers are entered in dBm and converted to linear watts
/// once, at parse; everything downstream works in linear units.
struct SystemConfig {
  std::array<double, 2> bs_positions{0.0, 1000.0};
  double tx_power_dbm = 10.0;
  double noise_power_dbm = -70.0;
  double bandwidth_hz = 10e6;
  double carrier_freq_hz = 2.1e9;
  int n_subcarriers = 600;
  double excess_delay_s = 50e-9;
  double pdp_rho = 2.0;
  NumericsConfig numerics;

  // linear-unit fields, derived from the dBm inputs by validate()
  double tx_power_w = 1e-2;
  double noise_power_w = 1e-10;

  double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }
  double subcarrier_spacing() const { return bandwidth_hz / n_subcarriers; }

  /// Recomputes linear powers and checks every invariant; throws
  /// ValidationError with a field-level message on the first violation.
  void validate();
};

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

/// Parses a config JSON file. Missing keys take the defaults above.
SystemConfig load_config(const std::string& path);

/// Parses a config from JSON text (same schema as load_config).
SystemConfig config_from_json_text(const std::string& text);

std::string config_to_json_text(const SystemConfig& cfg);

void save_config(const SystemConfig& cfg, const std::string& path);

/// FNV-1a hash of the canonical JSON form, as fixed-width hex. Recorded in
/// every emitted artifact so results can be traced to their settings.
std::string config_hash(const SystemConfig& cfg);

}  // namespace locrel
