#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace locrel {

/// One step of the splitmix64 sequence; mutates the state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Stream split rule used everywhere: a task identified by (purpose tag,
/// key) gets an mt19937_64 seeded from splitmix64 over
/// master ^ f(tag) ^ g(key). Tasks with distinct (tag, key) get
/// independent streams regardless of scheduling, so parallel results are
/// reproducible for a fixed master seed.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t tag,
                                        std::uint64_t key) {
  std::uint64_t s = master;
  s ^= 0xD1B54A32D192ED03ull * (tag + 1);
  s ^= 0xAEF17502108EF2D9ull * (key + 0x632BE59BD9B4E019ull);
  std::uint64_t t = s;
  return splitmix64(t);
}

/// Position-based stream key: quantizes a coordinate to millimetres so that
/// refined grids reuse the streams of coincident points.
inline std::uint64_t position_key(double x_m) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(x_m * 1000.0)));
}

/// Seedable random stream with the handful of draws the library needs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t tag, std::uint64_t key)
      : gen_(derive_stream_seed(master, tag, key)) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  /// Circularly symmetric complex normal with total variance `var`.
  std::complex<double> cnormal(double var) {
    const double s = std::sqrt(var / 2.0);
    return {s * normal(), s * normal()};
  }

  /// Chi-square with `dof` degrees of freedom.
  double chi_square(double dof) {
    std::gamma_distribution<double> g(dof / 2.0, 2.0);
    return g(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace locrel
