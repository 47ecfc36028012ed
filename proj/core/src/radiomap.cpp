#include "locrel/radiomap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "locrel/errors.hpp"
#include "locrel/parallel.hpp"

namespace locrel {

namespace {

constexpr char kMagic[8] = {'L', 'R', 'M', 'A', 'P', 'v', '1', '\0'};
constexpr std::uint32_t kExactLadderMax = 1024;

// stream purpose tags for map building
constexpr std::uint64_t kTagRatesBs1 = 0x10;
constexpr std::uint64_t kTagRatesBs2 = 0x11;
constexpr std::uint64_t kTagSelect = 0x20;

std::int64_t order_statistic_index(double eps, std::int64_t n) {
  // ceil(eps*n) with a guard against the product landing epsilon above an
  // integer (e.g. 1e-3 * 1e6).
  const double kd = eps * static_cast<double>(n);
  auto k = static_cast<std::int64_t>(std::ceil(kd - 1e-9));
  return std::clamp<std::int64_t>(k, 1, n);
}

std::vector<std::uint32_t> make_ladder(std::int64_t n) {
  std::vector<std::uint32_t> ks;
  const auto top = static_cast<std::uint32_t>(std::min<std::int64_t>(n, kExactLadderMax));
  for (std::uint32_t k = 1; k <= top; ++k) ks.push_back(k);
  double k = top;
  while (static_cast<std::int64_t>(ks.back()) < n) {
    k *= 1.01;
    auto kk = static_cast<std::int64_t>(std::ceil(k));
    if (kk > n) kk = n;
    if (kk > static_cast<std::int64_t>(ks.back()))
      ks.push_back(static_cast<std::uint32_t>(kk));
  }
  return ks;
}

double clamped_distance(double x, int bs, const SystemConfig& cfg) {
  const double d = std::abs(x - cfg.bs_positions[static_cast<std::size_t>(bs)]);
  return std::max(d, cfg.numerics.min_bs_distance_m);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xCBF29CE484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

double MarSampleSet::quantile(double eps) const {
  const std::int64_t n = n_samples();
  if (n == 0) throw InsufficientSamples("empty sample set");
  if (!(eps < 1.0)) throw InvalidDomain("quantile level must be < 1");
  if (eps < 1.0 / static_cast<double>(n) - 1e-15)
    throw QuantileUnresolvable("eps below 1/n_samples");
  return rates[static_cast<std::size_t>(order_statistic_index(eps, n) - 1)];
}

double mar_sample(double x, int bs, std::complex<double> a_scatter,
                  const SystemConfig& cfg) {
  const FrequencyResponse fr = freq_response(x, bs, a_scatter, cfg);
  const double snr_scale = cfg.tx_power_w / cfg.noise_power_w;
  double sum = 0.0;
  for (const auto& h : fr.values) sum += std::log2(1.0 + snr_scale * std::norm(h));
  return sum;
}

MarSampleSet build_cdf(double x, int bs, std::int64_t n, const SystemConfig& cfg,
                       RngStream& rng) {
  if (static_cast<double>(n) < 10.0 / cfg.numerics.eps_target)
    throw InsufficientSamples("build_cdf: need at least 10/eps_target samples");
  bs_distance(x, bs, cfg);  // geometry check
  MarSampleSet set;
  set.location = x;
  set.bs = bs;
  MarBulkSampler sampler(cfg);
  sampler.draw(x, bs, n, rng, set.rates);
  std::sort(set.rates.begin(), set.rates.end());
  return set;
}

std::array<double, 2> bs_selection_prob(double x, std::int64_t n_mc,
                                        const SystemConfig& cfg, RngStream& rng) {
  bs_distance(x, 0, cfg);
  bs_distance(x, 1, cfg);
  std::int64_t wins = 0;
  for (std::int64_t s = 0; s < n_mc; ++s) {
    const double e1 = ping_energy_sample(x, 0, cfg, rng);
    const double e2 = ping_energy_sample(x, 1, cfg, rng);
    if (e1 > e2) ++wins;
  }
  const double p1 = static_cast<double>(wins) / static_cast<double>(n_mc);
  return {p1, 1.0 - p1};
}

RadioMap RadioMap::build(const SystemConfig& cfg, unsigned n_threads) {
  const auto& nu = cfg.numerics;
  if (static_cast<double>(nu.map_samples) < 10.0 / nu.eps_target)
    throw InsufficientSamples("map build: map_samples below 10/eps_target");

  RadioMap map;
  const auto count = static_cast<std::size_t>(
      std::floor((nu.grid_max_m - nu.grid_min_m) / nu.grid_step_m + 1e-9)) + 1;
  map.grid_.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    map.grid_[i] = nu.grid_min_m + static_cast<double>(i) * nu.grid_step_m;
  map.step_ = nu.grid_step_m;
  map.ladder_ = make_ladder(nu.map_samples);
  map.n_samples_ = nu.map_samples;
  map.n_select_ = nu.select_mc_samples;
  map.seed_ = nu.seed;
  map.hash_ = locrel::config_hash(cfg);

  const std::size_t L = map.ladder_.size();
  map.rates_.resize(count * 2 * L);
  map.psel1_.resize(count);

  const MarBulkSampler sampler(cfg);
  parallel_for(count, n_threads, [&](std::size_t i) {
    const double x = map.grid_[i];
    const std::uint64_t key = position_key(x);
    std::vector<double> rates;
    for (int bs = 0; bs < 2; ++bs) {
      rates.clear();
      RngStream rs(nu.seed, bs == 0 ? kTagRatesBs1 : kTagRatesBs2, key);
      const double d = clamped_distance(x, bs, cfg);
      const double xe = cfg.bs_positions[static_cast<std::size_t>(bs)] + d;
      sampler.draw(xe, bs, nu.map_samples, rs, rates);
      std::sort(rates.begin(), rates.end());
      double* dst = &map.rates_[(i * 2 + static_cast<std::size_t>(bs)) * L];
      for (std::size_t m = 0; m < L; ++m) dst[m] = rates[map.ladder_[m] - 1];
    }
    // selection probabilities from ping-energy pairs at clamped distances
    RngStream sel(nu.seed, kTagSelect, key);
    std::int64_t wins = 0;
    const double x1 = cfg.bs_positions[0] + clamped_distance(x, 0, cfg) * (x >= cfg.bs_positions[0] ? 1.0 : -1.0);
    const double x2 = cfg.bs_positions[1] + clamped_distance(x, 1, cfg) * (x >= cfg.bs_positions[1] ? 1.0 : -1.0);
    for (std::int64_t s = 0; s < nu.select_mc_samples; ++s) {
      const double e1 = ping_energy_sample(x1, 0, cfg, sel);
      const double e2 = ping_energy_sample(x2, 1, cfg, sel);
      if (e1 > e2) ++wins;
    }
    map.psel1_[i] = static_cast<double>(wins) / static_cast<double>(nu.select_mc_samples);
  });
  return map;
}

RadioMap build_map(const SystemConfig& cfg, unsigned n_threads) {
  return RadioMap::build(cfg, n_threads);
}

const double* RadioMap::ladder_rates(std::size_t idx, int bs) const {
  return &rates_[(idx * 2 + static_cast<std::size_t>(bs)) * ladder_.size()];
}

std::size_t RadioMap::nearest_index(double x) const {
  const double t = (x - grid_.front()) / step_;
  const auto i = static_cast<std::int64_t>(std::llround(t));
  return static_cast<std::size_t>(std::clamp<std::int64_t>(
      i, 0, static_cast<std::int64_t>(grid_.size()) - 1));
}

double RadioMap::point_quantile(std::size_t idx, int bs, double eps) const {
  const std::int64_t k = order_statistic_index(eps, n_samples_);
  const double* row = ladder_rates(idx, bs);
  if (k <= static_cast<std::int64_t>(std::min<std::size_t>(ladder_.size(), kExactLadderMax)) &&
      ladder_[static_cast<std::size_t>(k - 1)] == static_cast<std::uint32_t>(k))
    return row[static_cast<std::size_t>(k - 1)];
  // interpolate between bracketing ladder entries
  const auto it = std::lower_bound(ladder_.begin(), ladder_.end(),
                                   static_cast<std::uint32_t>(k));
  const auto hi = static_cast<std::size_t>(it - ladder_.begin());
  if (ladder_[hi] == static_cast<std::uint32_t>(k)) return row[hi];
  const std::size_t lo = hi - 1;
  const double t = (static_cast<double>(k) - ladder_[lo]) /
                   (static_cast<double>(ladder_[hi]) - ladder_[lo]);
  return row[lo] + t * (row[hi] - row[lo]);
}

double RadioMap::eps_quantile(double eps, double x, int bs) const {
  if (bs < 0 || bs > 1) throw InvalidDomain("bs index must be 0 or 1");
  if (!(eps < 1.0)) throw InvalidDomain("eps must be < 1");
  if (eps < eps_min() - 1e-15) throw QuantileUnresolvable("eps below 1/n_samples");
  if (x < grid_.front() - 1e-9 || x > grid_.back() + 1e-9)
    throw OutOfMapRange("x outside the map grid");
  const double t = std::clamp((x - grid_.front()) / step_, 0.0,
                              static_cast<double>(grid_.size() - 1));
  const auto i0 = static_cast<std::size_t>(
      std::min<double>(std::floor(t), static_cast<double>(grid_.size() - 2)));
  const double frac = t - static_cast<double>(i0);
  const double q0 = point_quantile(i0, bs, eps);
  if (frac <= 0.0) return q0;
  const double q1 = point_quantile(i0 + 1, bs, eps);
  return q0 + frac * (q1 - q0);
}

double RadioMap::eps_quantile_clamped(double eps, double x, int bs) const {
  return eps_quantile(eps, std::clamp(x, grid_.front(), grid_.back()), bs);
}

double RadioMap::point_cdf(std::size_t idx, int bs, double rate) const {
  if (rate <= 0.0) return 0.0;
  const double* row = ladder_rates(idx, bs);
  const std::size_t L = ladder_.size();
  const double n = static_cast<double>(n_samples_);
  if (rate >= row[L - 1]) return 1.0;
  if (rate < row[0]) return (rate / row[0]) / n;
  const double* it = std::upper_bound(row, row + L, rate);
  const auto hi = static_cast<std::size_t>(it - row);  // first > rate, >= 1
  const std::size_t lo = hi - 1;
  const double plo = ladder_[lo] / n;
  const double phi = ladder_[hi] / n;
  const double den = row[hi] - row[lo];
  if (!(den > 0.0)) return phi;
  return plo + (rate - row[lo]) / den * (phi - plo);
}

double RadioMap::outage_prob(double rate, double x, int bs) const {
  if (bs < 0 || bs > 1) throw InvalidDomain("bs index must be 0 or 1");
  if (x < grid_.front() - 1e-9 || x > grid_.back() + 1e-9)
    throw OutOfMapRange("x outside the map grid");
  const double t = std::clamp((x - grid_.front()) / step_, 0.0,
                              static_cast<double>(grid_.size() - 1));
  const auto i0 = static_cast<std::size_t>(
      std::min<double>(std::floor(t), static_cast<double>(grid_.size() - 2)));
  const double frac = t - static_cast<double>(i0);
  const double p0 = point_cdf(i0, bs, rate);
  if (frac <= 0.0) return p0;
  const double p1 = point_cdf(i0 + 1, bs, rate);
  return p0 + frac * (p1 - p0);
}

std::array<double, 2> RadioMap::selection_prob(double x) const {
  if (x < grid_.front() - 1e-9 || x > grid_.back() + 1e-9)
    throw OutOfMapRange("x outside the map grid");
  const double t = std::clamp((x - grid_.front()) / step_, 0.0,
                              static_cast<double>(grid_.size() - 1));
  const auto i0 = static_cast<std::size_t>(
      std::min<double>(std::floor(t), static_cast<double>(grid_.size() - 2)));
  const double frac = t - static_cast<double>(i0);
  const double p = psel1_[i0] + frac * (psel1_[i0 + 1] - psel1_[i0]);
  return {p, 1.0 - p};
}

double RadioMap::min_quantile_between(double eps, double lo, double hi, int bs) const {
  if (!(lo <= hi)) std::swap(lo, hi);
  lo = std::clamp(lo, grid_.front(), grid_.back());
  hi = std::clamp(hi, grid_.front(), grid_.back());
  double best = std::min(eps_quantile(eps, lo, bs), eps_quantile(eps, hi, bs));
  const auto first = static_cast<std::size_t>(
      std::ceil((lo - grid_.front()) / step_ - 1e-12));
  const auto last = static_cast<std::size_t>(
      std::floor((hi - grid_.front()) / step_ + 1e-12));
  for (std::size_t i = first; i <= last && i < grid_.size(); ++i)
    best = std::min(best, point_quantile(i, bs, eps));
  return best;
}

void RadioMap::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write map file: " + path);
  nlohmann::json header{{"version", 1},
                        {"config_hash", hash_},
                        {"seed", seed_},
                        {"n_samples", n_samples_},
                        {"n_select", n_select_},
                        {"grid_min", grid_.front()},
                        {"grid_step", step_},
                        {"grid_count", grid_.size()},
                        {"ladder", ladder_}};
  const std::string htext = header.dump();
  const std::uint64_t hlen = htext.size();
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  std::uint64_t payload_hash = fnv1a(rates_.data(), rates_.size() * sizeof(double));
  payload_hash = fnv1a(psel1_.data(), psel1_.size() * sizeof(double), payload_hash);
  out.write(reinterpret_cast<const char*>(rates_.data()),
            static_cast<std::streamsize>(rates_.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(psel1_.data()),
            static_cast<std::streamsize>(psel1_.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(&payload_hash), sizeof(payload_hash));
  if (!out) throw IoError("short write to map file: " + path);
}

RadioMap RadioMap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open map file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError("not a radio map file: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen > (1ull << 24)) throw ParseError("corrupt map header: " + path);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(htext);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map header JSON: ") + e.what());
  }
  RadioMap map;
  try {
    map.hash_ = header.at("config_hash").get<std::string>();
    map.seed_ = header.at("seed").get<std::uint64_t>();
    map.n_samples_ = header.at("n_samples").get<std::int64_t>();
    map.n_select_ = header.at("n_select").get<std::int64_t>();
    const auto gmin = header.at("grid_min").get<double>();
    map.step_ = header.at("grid_step").get<double>();
    const auto count = header.at("grid_count").get<std::size_t>();
    map.ladder_ = header.at("ladder").get<std::vector<std::uint32_t>>();
    map.grid_.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      map.grid_[i] = gmin + static_cast<double>(i) * map.step_;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map header fields: ") + e.what());
  }
  map.rates_.resize(map.grid_.size() * 2 * map.ladder_.size());
  map.psel1_.resize(map.grid_.size());
  in.read(reinterpret_cast<char*>(map.rates_.data()),
          static_cast<std::streamsize>(map.rates_.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(map.psel1_.data()),
          static_cast<std::streamsize>(map.psel1_.size() * sizeof(double)));
  std::uint64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (!in) throw ParseError("truncated map file: " + path);
  std::uint64_t payload_hash = fnv1a(map.rates_.data(), map.rates_.size() * sizeof(double));
  payload_hash = fnv1a(map.psel1_.data(), map.psel1_.size() * sizeof(double), payload_hash);
  if (stored != payload_hash) throw ParseError("map payload checksum mismatch: " + path);
  return map;
}

}  // namespace locrel
