#include "locrel/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "locrel/errors.hpp"

namespace locrel {

using nlohmann::json;

void SystemConfig::validate() {
  tx_power_w = dbm_to_watt(tx_power_dbm);
  noise_power_w = dbm_to_watt(noise_power_dbm);

  if (!(bs_positions[0] != bs_positions[1]))
    throw ValidationError("bs_positions: the two BS positions must be distinct");
  if (!(n_subcarriers >= 1))
    throw ValidationError("n_subcarriers: must be >= 1");
  if (!(tx_power_w > 0.0) || !std::isfinite(tx_power_w))
    throw ValidationError("tx_power_dbm: linear power must be positive and finite");
  if (!(noise_power_w > 0.0) || !std::isfinite(noise_power_w))
    throw ValidationError("noise_power_dbm: linear power must be positive and finite");
  if (!(bandwidth_hz > 0.0))
    throw ValidationError("bandwidth_hz: must be positive");
  if (!(carrier_freq_hz > 0.0))
    throw ValidationError("carrier_freq_hz: must be positive");
  if (!(pdp_rho > 0.0))
    throw ValidationError("pdp_rho: must be positive");
  if (!(excess_delay_s > 0.0))
    throw ValidationError("excess_delay_s: must be positive");
  if (!(subcarrier_spacing() > 0.0))
    throw ValidationError("bandwidth_hz/n_subcarriers: subcarrier spacing must be positive");

  const auto& nu = numerics;
  if (!(nu.grid_step_m > 0.0))
    throw ValidationError("numerics.grid_step_m: must be positive");
  if (!(nu.grid_min_m < nu.grid_max_m))
    throw ValidationError("numerics.grid_min_m/grid_max_m: empty grid");
  if (nu.map_samples < 1)
    throw ValidationError("numerics.map_samples: must be >= 1");
  if (nu.select_mc_samples < 1)
    throw ValidationError("numerics.select_mc_samples: must be >= 1");
  if (nu.phase_nodes_meta < 1 || nu.phase_nodes_throughput < 1)
    throw ValidationError("numerics.phase_nodes_*: must be >= 1");
  if (nu.hermite_nodes < 1)
    throw ValidationError("numerics.hermite_nodes: must be >= 1");
  if (!(nu.eps_target > 0.0 && nu.eps_target < 1.0))
    throw ValidationError("numerics.eps_target: must be in (0,1)");
  if (!(nu.min_bs_distance_m > 0.0))
    throw ValidationError("numerics.min_bs_distance_m: must be positive");
}

namespace {

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(key) + ": " + e.what());
  }
}

json numerics_to_json(const NumericsConfig& n) {
  return json{{"grid_min_m", n.grid_min_m},
              {"grid_max_m", n.grid_max_m},
              {"grid_step_m", n.grid_step_m},
              {"map_samples", n.map_samples},
              {"select_mc_samples", n.select_mc_samples},
              {"phase_nodes_meta", n.phase_nodes_meta},
              {"phase_nodes_throughput", n.phase_nodes_throughput},
              {"hermite_nodes", n.hermite_nodes},
              {"eps_target", n.eps_target},
              {"min_bs_distance_m", n.min_bs_distance_m},
              {"seed", n.seed}};
}

}  // namespace

SystemConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config JSON: top level must be an object");

  SystemConfig cfg;
  read_field(j, "bs_positions", cfg.bs_positions);
  read_field(j, "tx_power_dbm", cfg.tx_power_dbm);
  read_field(j, "noise_power_dbm", cfg.noise_power_dbm);
  read_field(j, "bandwidth_hz", cfg.bandwidth_hz);
  read_field(j, "carrier_freq_hz", cfg.carrier_freq_hz);
  read_field(j, "n_subcarriers", cfg.n_subcarriers);
  read_field(j, "excess_delay_s", cfg.excess_delay_s);
  read_field(j, "pdp_rho", cfg.pdp_rho);
  if (j.contains("numerics")) {
    const json& n = j.at("numerics");
    if (!n.is_object()) throw ParseError("numerics: must be an object");
    read_field(n, "grid_min_m", cfg.numerics.grid_min_m);
    read_field(n, "grid_max_m", cfg.numerics.grid_max_m);
    read_field(n, "grid_step_m", cfg.numerics.grid_step_m);
    read_field(n, "map_samples", cfg.numerics.map_samples);
    read_field(n, "select_mc_samples", cfg.numerics.select_mc_samples);
    read_field(n, "phase_nodes_meta", cfg.numerics.phase_nodes_meta);
    read_field(n, "phase_nodes_throughput", cfg.numerics.phase_nodes_throughput);
    read_field(n, "hermite_nodes", cfg.numerics.hermite_nodes);
    read_field(n, "eps_target", cfg.numerics.eps_target);
    read_field(n, "min_bs_distance_m", cfg.numerics.min_bs_distance_m);
    read_field(n, "seed", cfg.numerics.seed);
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const SystemConfig& cfg) {
  json j{{"bs_positions", cfg.bs_positions},
         {"tx_power_dbm", cfg.tx_power_dbm},
         {"noise_power_dbm", cfg.noise_power_dbm},
         {"bandwidth_hz", cfg.bandwidth_hz},
         {"carrier_freq_hz", cfg.carrier_freq_hz},
         {"n_subcarriers", cfg.n_subcarriers},
         {"excess_delay_s", cfg.excess_delay_s},
         {"pdp_rho", cfg.pdp_rho},
         {"numerics", numerics_to_json(cfg.numerics)}};
  return j.dump(2);
}

void save_config(const SystemConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << config_to_json_text(cfg) << '\n';
}

std::string config_hash(const SystemConfig& cfg) {
  const std::string text = config_to_json_text(cfg);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace locrel
