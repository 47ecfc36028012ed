#include "locrel/channel.hpp"

#include <cmath>
#include <numbers>

#include "locrel/errors.hpp"

namespace locrel {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_distance(double d, const SystemConfig& cfg) {
  if (!(d >= cfg.numerics.min_bs_distance_m))
    throw DegenerateGeometry("UE within min_bs_distance of a BS (d = " + std::to_string(d) + " m)");
}

void check_bs(int bs) {
  if (bs < 0 || bs > 1) throw InvalidDomain("bs index must be 0 or 1");
}
}  // namespace

double bs_distance(double x, int bs, const SystemConfig& cfg) {
  check_bs(bs);
  const double d = std::abs(x - cfg.bs_positions[static_cast<std::size_t>(bs)]);
  check_distance(d, cfg);
  return d;
}

double path_gain(double d, const SystemConfig& cfg) {
  check_distance(d, cfg);
  const double lam = cfg.wavelength();
  return lam * lam / (16.0 * std::numbers::pi * std::numbers::pi * d * d);
}

std::complex<double> los_coefficient(double x, int bs, const SystemConfig& cfg) {
  const double d = bs_distance(x, bs, cfg);
  return std::polar(std::sqrt(path_gain(d, cfg)), -kTwoPi * d / cfg.wavelength());
}

double scatter_variance(double d, const SystemConfig& cfg) {
  return path_gain(d, cfg) / cfg.pdp_rho * std::exp(-cfg.excess_delay_s / cfg.pdp_rho);
}

std::complex<double> scatter_coefficient(double d, const SystemConfig& cfg, RngStream& rng) {
  return rng.cnormal(scatter_variance(d, cfg));
}

std::complex<double> scatter_coefficient(double d, double phase, double magnitude_quantile,
                                         const SystemConfig& cfg) {
  if (!(magnitude_quantile > 0.0 && magnitude_quantile < 1.0))
    throw InvalidDomain("magnitude_quantile must be in (0,1)");
  // |a| is Rayleigh with E|a|^2 = scatter_variance, so the magnitude
  // quantile is sigma * sqrt(-ln(1-q)).
  const double mag =
      std::sqrt(-scatter_variance(d, cfg) * std::log1p(-magnitude_quantile));
  return std::polar(mag, phase);
}

PathCoefficients path_coefficients(double x, int bs, std::complex<double> a_scatter,
                                   const SystemConfig& cfg) {
  const double d = bs_distance(x, bs, cfg);
  PathCoefficients pc;
  pc.a_los = los_coefficient(x, bs, cfg);
  pc.a_scatter = a_scatter;
  pc.tau_los = d / kSpeedOfLight;
  pc.tau_scatter = pc.tau_los + cfg.excess_delay_s;
  return pc;
}

FrequencyResponse freq_response(double x, int bs, std::complex<double> a_scatter,
                                const SystemConfig& cfg) {
  const PathCoefficients pc = path_coefficients(x, bs, a_scatter, cfg);
  FrequencyResponse fr;
  fr.values.resize(static_cast<std::size_t>(cfg.n_subcarriers));
  const double df = cfg.subcarrier_spacing();
  for (int j = 0; j < cfg.n_subcarriers; ++j) {
    const double w = kTwoPi * j * df;
    fr.values[static_cast<std::size_t>(j)] =
        pc.a_los * std::polar(1.0, -w * pc.tau_los) +
        pc.a_scatter * std::polar(1.0, -w * pc.tau_scatter);
  }
  return fr;
}

RicianParams rician_params(double x, int bs, const SystemConfig& cfg) {
  const double d = bs_distance(x, bs, cfg);
  const double r = cfg.excess_delay_s / cfg.pdp_rho;
  RicianParams rp;
  rp.avg_power = path_gain(d, cfg) * (1.0 + std::exp(-r) / cfg.pdp_rho);
  rp.k_factor = cfg.pdp_rho * std::exp(r);
  return rp;
}

std::vector<std::complex<double>> simulate_ping(double x, int bs, const SystemConfig& cfg,
                                                RngStream& rng) {
  const double d = bs_distance(x, bs, cfg);
  const std::complex<double> a2 = scatter_coefficient(d, cfg, rng);
  FrequencyResponse fr = freq_response(x, bs, a2, cfg);
  const double amp = std::sqrt(cfg.tx_power_w);
  std::vector<std::complex<double>> y(fr.values.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    y[j] = amp * fr.values[j] + rng.cnormal(cfg.noise_power_w);
  return y;
}

double ping_energy_sample(double x, int bs, const SystemConfig& cfg, RngStream& rng) {
  const double d = bs_distance(x, bs, cfg);
  const int n = cfg.n_subcarriers;
  const double a1_mag = std::sqrt(path_gain(d, cfg));
  const std::complex<double> a2 = scatter_coefficient(d, cfg, rng);
  // ||h||^2 = N(|a1|^2 + |a2|^2) + 2 Re(conj(a1) a2 G),  G = sum_j e^{-i theta_j}
  const double df = cfg.subcarrier_spacing();
  const double step = kTwoPi * df * cfg.excess_delay_s;
  std::complex<double> geom;
  if (std::abs(std::polar(1.0, -step) - 1.0) < 1e-14) {
    geom = static_cast<double>(n);
  } else {
    const std::complex<double> r = std::polar(1.0, -step);
    geom = (1.0 - std::pow(r, n)) / (1.0 - r);
  }
  const std::complex<double> a1 = los_coefficient(x, bs, cfg);
  const double hnorm2 = n * (a1_mag * a1_mag + std::norm(a2)) +
                        2.0 * (std::conj(a1) * a2 * geom).real();
  const double lambda_nc = 2.0 * cfg.tx_power_w * hnorm2 / cfg.noise_power_w;
  const double z = rng.normal() + std::sqrt(lambda_nc);
  const double chi = rng.chi_square(2.0 * n - 1.0) + z * z;
  return 0.5 * cfg.noise_power_w * chi;
}

MarBulkSampler::MarBulkSampler(const SystemConfig& cfg) : cfg_(cfg) {
  snr_scale_ = cfg.tx_power_w / cfg.noise_power_w;
  const int n = cfg.n_subcarriers;
  cos_theta_.resize(static_cast<std::size_t>(n));
  sin_theta_.resize(static_cast<std::size_t>(n));
  const double step = kTwoPi * cfg.subcarrier_spacing() * cfg.excess_delay_s;
  for (int j = 0; j < n; ++j) {
    cos_theta_[static_cast<std::size_t>(j)] = std::cos(step * j);
    sin_theta_[static_cast<std::size_t>(j)] = std::sin(step * j);
  }
}

double MarBulkSampler::mar_rotated(double a1_mag, double br, double bi) const {
  // Per subcarrier: |h_j|^2 = |a1|^2 + |b|^2 + 2|a1|(br cos th_j + bi sin th_j),
  // so each log argument is t0 + t1 cos + t2 sin. The sum of logs becomes one
  // log of a product; partial products are renormalized with frexp before
  // they can overflow (arguments are >= 1, so no underflow side).
  const int n = static_cast<int>(cos_theta_.size());
  const double* ct = cos_theta_.data();
  const double* st = sin_theta_.data();
  const double t0 = 1.0 + snr_scale_ * (a1_mag * a1_mag + br * br + bi * bi);
  const double t1 = snr_scale_ * 2.0 * a1_mag * br;
  const double t2 = snr_scale_ * 2.0 * a1_mag * bi;
  double p0 = 1, p1 = 1, p2 = 1, p3 = 1;
  long ex = 0;
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    p0 *= t0 + t1 * ct[j] + t2 * st[j];
    p1 *= t0 + t1 * ct[j + 1] + t2 * st[j + 1];
    p2 *= t0 + t1 * ct[j + 2] + t2 * st[j + 2];
    p3 *= t0 + t1 * ct[j + 3] + t2 * st[j + 3];
    if (((j + 4) & 127) == 0) {
      int e0, e1, e2, e3;
      p0 = std::frexp(p0, &e0);
      p1 = std::frexp(p1, &e1);
      p2 = std::frexp(p2, &e2);
      p3 = std::frexp(p3, &e3);
      ex += e0 + e1 + e2 + e3;
    }
  }
  for (; j < n; ++j) p0 *= t0 + t1 * ct[j] + t2 * st[j];
  int e0, e1, e2, e3;
  p0 = std::frexp(p0, &e0);
  p1 = std::frexp(p1, &e1);
  p2 = std::frexp(p2, &e2);
  p3 = std::frexp(p3, &e3);
  ex += e0 + e1 + e2 + e3;
  return std::log2(p0 * p1 * p2 * p3) + static_cast<double>(ex);
}

double MarBulkSampler::mar(double x, int bs, std::complex<double> a_scatter) const {
  const double d = bs_distance(x, bs, cfg_);
  const double a1_mag = std::sqrt(path_gain(d, cfg_));
  // rotate the scatter coefficient into the LoS frame
  const std::complex<double> b =
      a_scatter * std::polar(1.0, kTwoPi * d / cfg_.wavelength());
  return mar_rotated(a1_mag, b.real(), b.imag());
}

void MarBulkSampler::draw(double x, int bs, std::int64_t n, RngStream& rng,
                          std::vector<double>& out) const {
  const double d = bs_distance(x, bs, cfg_);
  const double a1_mag = std::sqrt(path_gain(d, cfg_));
  const double sig = std::sqrt(scatter_variance(d, cfg_) / 2.0);
  const double rot = kTwoPi * d / cfg_.wavelength();
  const double cr = std::cos(rot), sr = std::sin(rot);
  out.reserve(out.size() + static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    const double ar = sig * rng.normal();
    const double ai = sig * rng.normal();
    out.push_back(mar_rotated(a1_mag, ar * cr - ai * sr, ar * sr + ai * cr));
  }
}

}  // namespace locrel
