#include "locrel/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "locrel/errors.hpp"
#include "locrel/gaussian.hpp"
#include "locrel/localization.hpp"
#include "locrel/parallel.hpp"
#include "locrel/reliability.hpp"
#include "locrel/version.hpp"

namespace locrel {

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

ResultTable make_table(const std::string& name, std::vector<std::string> columns,
                       const SystemConfig& cfg, const ExperimentPlan& plan) {
  ResultTable t;
  t.name = name;
  t.columns = std::move(columns);
  t.config_hash = config_hash(cfg);
  t.seed = cfg.numerics.seed;
  t.version = kVersion;
  if (plan.stamp) t.timestamp = iso_timestamp();
  return t;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> xs;
  for (double x = lo; x <= hi + 1e-9; x += step) xs.push_back(x);
  return xs;
}

const char* kPlotFig1 = R"(#!/usr/bin/env python3
import csv, sys
import matplotlib.pyplot as plt

def load(path):
    cols, rows = None, []
    with open(path) as f:
        for line in f:
            if line.startswith('#') or not line.strip():
                continue
            cells = line.strip().split(',')
            if cols is None:
                cols = cells
            else:
                rows.append([float(c) for c in cells])
    return cols, list(zip(*rows))

cols, data = load('fig1_stats.csv')
x = data[0]
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
ax1.plot(x, data[2], label='BS 1')
ax1.plot(x, data[3], label='BS 2')
ax1.set_ylabel('eps-quantile of MAR [bits/s/Hz]')
ax1.set_yscale('log')
ax1.legend()
ax2.plot(x, data[1])
ax2.set_ylabel('avg localization std [m]')
ax2.set_xlabel('x [m]')
fig.tight_layout()
fig.savefig('fig1.png', dpi=150)
print('wrote fig1.png')
)";

const char* kPlotFig2 = R"(#!/usr/bin/env python3
import csv
import matplotlib.pyplot as plt

def load(path):
    cols, rows = None, []
    with open(path) as f:
        for line in f:
            if line.startswith('#') or not line.strip():
                continue
            cells = line.strip().split(',')
            if cols is None:
                cols = cells
            else:
                rows.append([float(c) for c in cells])
    return cols, list(zip(*rows))

_, curve = load('fig2_curve.csv')
_, summary = load('fig2_summary.csv')
xhat, pout, pdf = curve[0], curve[1], curve[2]
edge_lo, edge_hi = summary[2][0], summary[3][0]
fig, ax1 = plt.subplots(figsize=(7, 4))
ax1.semilogy(xhat, pout, 'C0', label='outage probability')
ax1.axhline(1e-3, color='k', ls=':', lw=0.8)
ax1.axvline(edge_lo, color='r', ls='--', lw=0.8)
ax1.axvline(edge_hi, color='r', ls='--', lw=0.8, label='outage region edges')
ax1.set_xlabel('estimated location [m]')
ax1.set_ylabel('p_out')
ax2 = ax1.twinx()
ax2.plot(xhat, pdf, 'C1', label='estimate density')
ax2.set_ylabel('p(xhat)')
fig.legend(loc='upper right')
fig.tight_layout()
fig.savefig('fig2.png', dpi=150)
print('wrote fig2.png')
)";

const char* kPlotFig3 = R"(#!/usr/bin/env python3
import csv
import matplotlib.pyplot as plt

def load(path):
    cols, rows = None, []
    with open(path) as f:
        for line in f:
            if line.startswith('#') or not line.strip():
                continue
            cells = line.strip().split(',')
            if cols is None:
                cols = cells
            else:
                rows.append([float(c) for c in cells])
    return cols, list(zip(*rows))

_, meta = load('fig3_meta.csv')
_, thr = load('fig3_throughput.csv')
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
for i, lab in ((1, 'backoff'), (2, 'conf. interval'), (3, 'oracle')):
    ax1.semilogy(meta[0], [max(v, 1e-12) for v in meta[i]], label=lab)
    ax2.plot(thr[0], thr[i], label=lab)
ax1.set_ylabel('meta-probability')
ax1.legend()
ax2.set_ylabel('throughput ratio')
ax2.set_xlabel('x [m]')
fig.tight_layout()
fig.savefig('fig3.png', dpi=150)
print('wrote fig3.png')
)";

}  // namespace

FigureResult run_figure(const std::string& which, const SystemConfig& cfg,
                        const ExperimentPlan& plan, const RadioMap* prebuilt_map) {
  namespace fs = std::filesystem;
  fs::create_directories(plan.out_dir);
  const double eps = cfg.numerics.eps_target;

  RadioMap built;
  const RadioMap* map = prebuilt_map;
  if (map == nullptr) {
    built = RadioMap::build(cfg, plan.threads);
    built.save((fs::path(plan.out_dir) / "radiomap.lrm").string());
    map = &built;
  }

  FigureResult result;
  auto emit_all = [&](const std::string& script_name, const char* script) {
    std::vector<std::string> written;
    try {
      for (std::size_t i = 0; i < result.tables.size(); ++i) {
        const auto path = (fs::path(plan.out_dir) /
                           (result.tables[i].name + "." + plan.format)).string();
        result.tables[i].emit(plan.format, path);
        written.push_back(path);
        result.paths.push_back(path);
      }
      if (plan.format == "csv") {
        const auto spath = (fs::path(plan.out_dir) / script_name).string();
        write_text_file(spath, script);
        result.paths.push_back(spath);
      }
    } catch (...) {
      for (const auto& p : written) fs::remove(p);
      throw;
    }
  };

  if (which == "fig1") {
    const auto xs = linspace_step(10.0, 990.0, 10.0);
    const CrlbEvaluator crlb(cfg);
    std::vector<double> sbar(xs.size());
    parallel_for(xs.size(), plan.threads, [&](std::size_t i) {
      sbar[i] = crlb.average_std(xs[i], cfg.numerics.phase_nodes_meta);
    });
    ResultTable t = make_table("fig1_stats", {"x_m", "sigma_bar_m", "q_eps_bs1", "q_eps_bs2"},
                               cfg, plan);
    for (std::size_t i = 0; i < xs.size(); ++i)
      t.add_row({xs[i], sbar[i], map->eps_quantile(eps, xs[i], 0),
                 map->eps_quantile(eps, xs[i], 1)});
    result.tables.push_back(std::move(t));
    emit_all("plot_fig1.py", kPlotFig1);
    return result;
  }

  if (which == "fig2") {
    const double x_true = 300.0;
    const double k = 0.25;
    const RateSelector sel = RateSelector::backoff(k, eps);
    ReliabilityEvaluator ev(*map, cfg, plan.threads);
    const OutageInterval iv = ev.outage_interval(x_true, 0, sel, eps);
    const auto sig = ev.sigma_grid(x_true, cfg.numerics.phase_nodes_meta);
    const ReliabilityReport rep = ev.meta_prob(x_true, sel, eps);

    ResultTable curve =
        make_table("fig2_curve", {"xhat_m", "p_out_bs1", "xhat_pdf"}, cfg, plan);
    for (double xh = -400.0; xh <= 700.0 + 1e-9; xh += map->grid_step()) {
      const double pout = outage_prob_given_estimate(x_true, xh, 0, sel, ev.ctx());
      double pdf = 0.0;
      for (double s : sig) pdf += normal_pdf((xh - x_true) / s) / s;
      pdf /= static_cast<double>(sig.size());
      curve.add_row({xh, pout, pdf});
    }
    ResultTable summary = make_table(
        "fig2_summary",
        {"x_m", "eps_quantile_bs1", "edge_lo_m", "edge_hi_m", "meta_prob"}, cfg, plan);
    summary.add_row({x_true, map->eps_quantile(eps, x_true, 0), iv.lo, iv.hi,
                     rep.meta_prob});
    result.tables.push_back(std::move(curve));
    result.tables.push_back(std::move(summary));
    emit_all("plot_fig2.py", kPlotFig2);
    return result;
  }

  if (which == "fig3") {
    const CalibrationSpec spec{eps, 45.0, 955.0, 5.0};
    ReliabilityEvaluator ev(*map, cfg, plan.threads);
    const double k = calibrate_backoff(spec, eps, ev, plan.threads);
    const double alpha = calibrate_ci(spec, eps, ev, plan.threads);
    OracleTable otab = calibrate_oracle(spec, eps, ev, plan.threads);
    const RateSelector sels[3] = {RateSelector::backoff(k, eps),
                                  RateSelector::conf_interval(alpha, eps),
                                  RateSelector::oracle(std::move(otab), eps)};

    // fail loudly if any calibration misses its bound
    const auto cal_xs = spec.grid();
    ev.precompute_sigma(cal_xs, plan.threads);
    for (const auto& sel : sels) {
      std::vector<double> metas(cal_xs.size());
      parallel_for(cal_xs.size(), plan.threads, [&](std::size_t i) {
        metas[i] = ev.meta_prob(cal_xs[i], sel, eps).meta_prob;
      });
      const double worst = *std::max_element(metas.begin(), metas.end());
      if (worst > spec.delta * (1.0 + 1e-9))
        throw Infeasible("fig3: calibrated selector violates the meta bound (max " +
                         std::to_string(worst) + ")");
    }

    const auto xs = linspace_step(10.0, 990.0, 10.0);
    ev.precompute_sigma(xs, plan.threads);
    std::vector<std::array<double, 3>> meta(xs.size()), omega(xs.size());
    parallel_for(xs.size(), plan.threads, [&](std::size_t i) {
      for (int s = 0; s < 3; ++s) {
        meta[i][static_cast<std::size_t>(s)] =
            ev.meta_prob(xs[i], sels[s], eps).meta_prob;
        omega[i][static_cast<std::size_t>(s)] =
            ev.throughput_ratio(xs[i], sels[s], eps);
      }
    });

    ResultTable tmeta = make_table(
        "fig3_meta", {"x_m", "meta_backoff", "meta_ci", "meta_oracle"}, cfg, plan);
    ResultTable tomega = make_table(
        "fig3_throughput", {"x_m", "omega_backoff", "omega_ci", "omega_oracle"}, cfg,
        plan);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      tmeta.add_row({xs[i], meta[i][0], meta[i][1], meta[i][2]});
      tomega.add_row({xs[i], omega[i][0], omega[i][1], omega[i][2]});
    }
    result.tables.push_back(std::move(tmeta));
    result.tables.push_back(std::move(tomega));
    emit_all("plot_fig3.py", kPlotFig3);

    nlohmann::json cal{{"k", k},
                       {"alpha", alpha},
                       {"delta", spec.delta},
                       {"eps", eps},
                       {"x_min", spec.x_min},
                       {"x_max", spec.x_max},
                       {"config_hash", config_hash(cfg)},
                       {"seed", cfg.numerics.seed},
                       {"version", kVersion}};
    const auto cpath = (fs::path(plan.out_dir) / "fig3_calibration.json").string();
    write_text_file(cpath, cal.dump(2) + "\n");
    result.paths.push_back(cpath);
    return result;
  }

  throw ValidationError("unknown figure: " + which + " (expected fig1|fig2|fig3)");
}

}  // namespace locrel
