#include "locrel/rateselect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "locrel/errors.hpp"
#include "locrel/gaussian.hpp"
#include "locrel/localization.hpp"
#include "locrel/parallel.hpp"
#include "locrel/reliability.hpp"

namespace locrel {

SigmaBarTable SigmaBarTable::build(const RadioMap& map, const SystemConfig& cfg,
                                   unsigned n_threads) {
  SigmaBarTable tab;
  tab.x0 = map.grid_min();
  tab.step = map.grid_step();
  tab.values.resize(map.grid().size());
  // Twice the guard radius: at the guard radius itself the Fisher nuisance
  // block sits right at the conditioning limit.
  const double margin = 2.0 * cfg.numerics.min_bs_distance_m;
  const double lo = std::min(cfg.bs_positions[0], cfg.bs_positions[1]) + margin;
  const double hi = std::max(cfg.bs_positions[0], cfg.bs_positions[1]) - margin;
  const CrlbEvaluator ev(cfg);
  parallel_for(tab.values.size(), n_threads, [&](std::size_t i) {
    const double x = std::clamp(map.grid()[i], lo, hi);
    tab.values[i] = ev.average_std(x, cfg.numerics.phase_nodes_meta);
  });
  return tab;
}

double SigmaBarTable::at(double xhat) const {
  if (values.empty()) throw InvalidDomain("sigma-bar table is empty");
  const double t = std::clamp((xhat - x0) / step, 0.0,
                              static_cast<double>(values.size() - 1));
  const auto i0 = static_cast<std::size_t>(
      std::min<double>(std::floor(t), static_cast<double>(values.size() - 2)));
  const double frac = t - static_cast<double>(i0);
  return values[i0] + frac * (values[i0 + 1] - values[i0]);
}

double OracleTable::rate(double xhat, int bs) const {
  if (empty()) throw OutOfMapRange("oracle table not calibrated");
  if (bs < 0 || bs > 1) throw InvalidDomain("bs index must be 0 or 1");
  const auto i = static_cast<std::int64_t>(std::llround((xhat - x0) / step));
  const auto idx = static_cast<std::size_t>(std::clamp<std::int64_t>(
      i, 0, static_cast<std::int64_t>(rates.size()) - 1));
  return rates[idx][static_cast<std::size_t>(bs)];
}

RateSelector RateSelector::backoff(double k, double eps) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidDomain("backoff k must be in (0,1]");
  RateSelector s;
  s.kind = Kind::backoff;
  s.k = k;
  s.eps = eps;
  return s;
}

RateSelector RateSelector::conf_interval(double alpha, double eps) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidDomain("alpha must be in (0,1)");
  RateSelector s;
  s.kind = Kind::conf_interval;
  s.alpha = alpha;
  s.eps = eps;
  return s;
}

RateSelector RateSelector::oracle(OracleTable table, double eps) {
  RateSelector s;
  s.kind = Kind::oracle;
  s.table = std::move(table);
  s.eps = eps;
  return s;
}

std::vector<double> CalibrationSpec::grid() const {
  std::vector<double> xs;
  for (double x = x_min; x <= x_max + 1e-9; x += x_step) xs.push_back(x);
  return xs;
}

void CalibrationSpec::validate(const RadioMap& map) const {
  if (!(delta > 0.0 && delta < 1.0))
    throw ValidationError("calibration delta must be in (0,1)");
  if (!(x_min < x_max) || !(x_step > 0.0))
    throw ValidationError("calibration x range is empty");
  if (x_min < map.grid_min() || x_max > map.grid_max())
    throw ValidationError("calibration range must lie within the map grid");
}

SelectorContext::SelectorContext(const RadioMap& m, const SystemConfig& c,
                                 unsigned n_threads)
    : map(m), cfg(c), sigma_bar(SigmaBarTable::build(m, c, n_threads)) {}

double backoff_rate(double xhat, int bs, double k, double eps, const RadioMap& map) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidDomain("backoff k must be in (0,1]");
  return k * map.eps_quantile_clamped(eps, xhat, bs);
}

double ci_rate(double xhat, int bs, double alpha, double eps, const RadioMap& map,
               const SigmaBarTable& sigma_bar) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidDomain("alpha must be in (0,1)");
  const double w = normal_quantile(1.0 - alpha / 2.0) * sigma_bar.at(xhat);
  return map.min_quantile_between(eps, xhat - w, xhat + w, bs);
}

double ci_rate(double xhat, int bs, double alpha, double eps, const RadioMap& map,
               const SystemConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidDomain("alpha must be in (0,1)");
  const double margin = 2.0 * cfg.numerics.min_bs_distance_m;
  const double lo = std::min(cfg.bs_positions[0], cfg.bs_positions[1]) + margin;
  const double hi = std::max(cfg.bs_positions[0], cfg.bs_positions[1]) - margin;
  const double sb = average_std(std::clamp(xhat, lo, hi), cfg);
  const double w = normal_quantile(1.0 - alpha / 2.0) * sb;
  return map.min_quantile_between(eps, xhat - w, xhat + w, bs);
}

double oracle_rate(double xhat, int bs, const OracleTable& table) {
  return table.rate(xhat, bs);
}

double SelectorContext::rate(const RateSelector& sel, double xhat, int bs) const {
  switch (sel.kind) {
    case RateSelector::Kind::backoff:
      return backoff_rate(xhat, bs, sel.k, sel.eps, map);
    case RateSelector::Kind::conf_interval:
      return ci_rate(xhat, bs, sel.alpha, sel.eps, map, sigma_bar);
    case RateSelector::Kind::oracle:
      return oracle_rate(xhat, bs, sel.table);
  }
  throw InvalidDomain("unknown selector kind");
}

namespace {

double max_meta(const std::vector<double>& xs, const RateSelector& sel, double eps,
                const ReliabilityEvaluator& ev, unsigned n_threads) {
  std::vector<double> metas(xs.size());
  parallel_for(xs.size(), n_threads, [&](std::size_t i) {
    metas[i] = ev.meta_prob(xs[i], sel, eps).meta_prob;
  });
  return *std::max_element(metas.begin(), metas.end());
}

}  // namespace

double calibrate_backoff(const CalibrationSpec& spec, double eps,
                         const ReliabilityEvaluator& ev, unsigned n_threads) {
  spec.validate(ev.ctx().map);
  const auto xs = spec.grid();
  ev.precompute_sigma(xs, n_threads);
  const auto feasible = [&](double k) {
    return max_meta(xs, RateSelector::backoff(k, eps), eps, ev, n_threads) <= spec.delta;
  };
  if (feasible(1.0)) return 1.0;
  double lo = 1e-3;
  double hi = 1.0;
  if (!feasible(lo))
    throw Infeasible("calibrate_backoff: even k = 1e-3 violates the meta bound");
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

double calibrate_ci(const CalibrationSpec& spec, double eps,
                    const ReliabilityEvaluator& ev, unsigned n_threads) {
  spec.validate(ev.ctx().map);
  const auto xs = spec.grid();
  ev.precompute_sigma(xs, n_threads);
  const auto feasible = [&](double a) {
    return max_meta(xs, RateSelector::conf_interval(a, eps), eps, ev, n_threads) <=
           spec.delta;
  };
  double hi = 1.0 - 1e-9;
  if (feasible(hi)) return hi;
  double lo = 1e-12;
  if (!feasible(lo))
    throw Infeasible("calibrate_ci: even alpha = 1e-12 violates the meta bound");
  while (hi / lo > 1.5) {
    const double mid = std::exp(0.5 * (std::log(lo) + std::log(hi)));
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

OracleTable calibrate_oracle(const CalibrationSpec& spec, double eps,
                             const ReliabilityEvaluator& ev, unsigned n_threads) {
  spec.validate(ev.ctx().map);
  const RadioMap& map = ev.ctx().map;
  const auto xs = spec.grid();
  ev.precompute_sigma(xs, n_threads);

  const std::size_t nx = xs.size();
  const std::size_t nc = map.grid().size();
  const int meta_nodes = ev.ctx().cfg.numerics.phase_nodes_meta;

  // Mass of (-inf, edge] per true location, phase-mixed; cell masses are the
  // differences, so any union of cells has exactly additive mass.
  std::vector<double> phimass(nx * (nc + 1));
  std::vector<std::array<double, 2>> thr(nx);
  std::vector<std::array<double, 2>> psel(nx);
  parallel_for(nx, n_threads, [&](std::size_t ix) {
    const double x = xs[ix];
    const auto sig = ev.sigma_grid(x, meta_nodes);
    double* row = &phimass[ix * (nc + 1)];
    for (std::size_t e = 0; e <= nc; ++e) {
      double edge;
      if (e == 0)
        edge = -std::numeric_limits<double>::infinity();
      else if (e == nc)
        edge = std::numeric_limits<double>::infinity();
      else
        edge = map.grid()[e - 1] + 0.5 * map.grid_step();
      double acc = 0.0;
      if (std::isinf(edge)) {
        acc = edge > 0 ? static_cast<double>(sig.size()) : 0.0;
      } else {
        for (double s : sig) acc += q_function((x - edge) / s);
      }
      row[e] = acc / static_cast<double>(sig.size());
    }
    const auto w = map.selection_prob(x);
    psel[ix] = {w[0], w[1]};
    thr[ix] = {map.eps_quantile(eps, x, 0), map.eps_quantile(eps, x, 1)};
  });

  auto contrib = [&](std::size_t ix, std::size_t cell) {
    return phimass[ix * (nc + 1) + cell + 1] - phimass[ix * (nc + 1) + cell];
  };

  OracleTable tab;
  tab.x0 = map.grid_min();
  tab.step = map.grid_step();
  tab.rates.assign(nc, {0.0, 0.0});

  // Conservative initialization: the calibrated backoff table is feasible
  // and the climb only raises rates, so the oracle dominates it pointwise.
  double k_init = 0.0;
  try {
    k_init = calibrate_backoff(spec, eps, ev, n_threads);
  } catch (const Infeasible&) {
    k_init = 0.0;
  }
  std::vector<double> meta(nx, 0.0);
  std::vector<char> member(nx * nc * 2, 0);
  if (k_init > 0.0) {
    for (std::size_t cell = 0; cell < nc; ++cell)
      for (int bs = 0; bs < 2; ++bs)
        tab.rates[cell][static_cast<std::size_t>(bs)] =
            k_init * map.eps_quantile(eps, map.grid()[cell], bs);
    for (std::size_t ix = 0; ix < nx; ++ix)
      for (std::size_t cell = 0; cell < nc; ++cell)
        for (int bs = 0; bs < 2; ++bs)
          if (tab.rates[cell][static_cast<std::size_t>(bs)] >
              thr[ix][static_cast<std::size_t>(bs)]) {
            member[(ix * nc + cell) * 2 + static_cast<std::size_t>(bs)] = 1;
            meta[ix] += psel[ix][static_cast<std::size_t>(bs)] * contrib(ix, cell);
          }
  }
  constexpr double kRatio = 1.01;
  constexpr double kFloorFactor = 1e-3;

  bool changed = true;
  int passes = 0;
  while (changed && passes < 4) {
    changed = false;
    ++passes;
    for (std::size_t cell = 0; cell < nc; ++cell) {
      for (int bs = 0; bs < 2; ++bs) {
        const double ceiling = map.eps_quantile(eps, map.grid()[cell], bs);
        double cur = tab.rates[cell][static_cast<std::size_t>(bs)];
        // ascending candidate ladder: ceiling / ratio^m
        std::vector<double> cands;
        for (double r = ceiling; r > std::max(cur, ceiling * kFloorFactor);
             r /= kRatio)
          cands.push_back(r);
        std::sort(cands.begin(), cands.end());
        for (double cand : cands) {
          bool ok = true;
          for (std::size_t ix = 0; ix < nx; ++ix) {
            if (member[(ix * nc + cell) * 2 + static_cast<std::size_t>(bs)]) continue;
            if (cand > thr[ix][static_cast<std::size_t>(bs)] &&
                meta[ix] + psel[ix][static_cast<std::size_t>(bs)] * contrib(ix, cell) >
                    spec.delta) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
          for (std::size_t ix = 0; ix < nx; ++ix) {
            auto& m = member[(ix * nc + cell) * 2 + static_cast<std::size_t>(bs)];
            if (!m && cand > thr[ix][static_cast<std::size_t>(bs)]) {
              meta[ix] += psel[ix][static_cast<std::size_t>(bs)] * contrib(ix, cell);
              m = 1;
            }
          }
          if (cand > cur) {
            cur = cand;
            changed = true;
          }
        }
        tab.rates[cell][static_cast<std::size_t>(bs)] = cur;
      }
    }
  }
  return tab;
}

void save_selector(const RateSelector& sel, const CalibrationSpec& spec,
                   const std::string& map_hash, const std::string& path) {
  nlohmann::json j{{"version", 1},
                   {"eps", sel.eps},
                   {"delta", spec.delta},
                   {"x_min", spec.x_min},
                   {"x_max", spec.x_max},
                   {"x_step", spec.x_step},
                   {"map_hash", map_hash}};
  switch (sel.kind) {
    case RateSelector::Kind::backoff:
      j["scheme"] = "backoff";
      j["k"] = sel.k;
      break;
    case RateSelector::Kind::conf_interval:
      j["scheme"] = "ci";
      j["alpha"] = sel.alpha;
      break;
    case RateSelector::Kind::oracle: {
      j["scheme"] = "oracle";
      nlohmann::json t;
      t["x0"] = sel.table.x0;
      t["step"] = sel.table.step;
      t["rates"] = sel.table.rates;
      j["table"] = std::move(t);
      break;
    }
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write selector record: " + path);
  out << j.dump(2) << '\n';
}

RateSelector load_selector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open selector record: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("selector record JSON: ") + e.what());
  }
  try {
    const auto scheme = j.at("scheme").get<std::string>();
    const double eps = j.at("eps").get<double>();
    if (scheme == "backoff") return RateSelector::backoff(j.at("k").get<double>(), eps);
    if (scheme == "ci")
      return RateSelector::conf_interval(j.at("alpha").get<double>(), eps);
    if (scheme == "oracle") {
      OracleTable tab;
      const auto& t = j.at("table");
      tab.x0 = t.at("x0").get<double>();
      tab.step = t.at("step").get<double>();
      tab.rates = t.at("rates").get<std::vector<std::array<double, 2>>>();
      return RateSelector::oracle(std::move(tab), eps);
    }
    throw ParseError("selector record: unknown scheme " + scheme);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("selector record fields: ") + e.what());
  }
}

}  // namespace locrel
