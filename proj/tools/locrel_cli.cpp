// Command line front end: map building/queries, CRLB sweeps, selector
// calibration, meta-probability and throughput curves, analytic results,
// and figure reproduction.
//
// Exit codes: 0 ok, 2 validation/input error, 3 infeasible calibration,
// 4 numerical failure.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "locrel/analytic.hpp"
#include "locrel/errors.hpp"
#include "locrel/localization.hpp"
#include "locrel/parallel.hpp"
#include "locrel/quadrature.hpp"
#include "locrel/radiomap.hpp"
#include "locrel/rateselect.hpp"
#include "locrel/reliability.hpp"
#include "locrel/result_table.hpp"
#include "locrel/runner.hpp"
#include "locrel/version.hpp"

namespace fs = std::filesystem;
using namespace locrel;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::string format = "csv";
  bool stamp = false;
};

SystemConfig load_effective_config(const GlobalOpts& g) {
  SystemConfig cfg;
  if (!g.config_path.empty())
    cfg = load_config(g.config_path);
  else
    cfg.validate();
  if (g.seed) {
    cfg.numerics.seed = *g.seed;
    cfg.validate();
  }
  return cfg;
}

ResultTable new_table(const std::string& name, std::vector<std::string> cols,
                      const SystemConfig& cfg) {
  ResultTable t;
  t.name = name;
  t.columns = std::move(cols);
  t.config_hash = config_hash(cfg);
  t.seed = cfg.numerics.seed;
  t.version = kVersion;
  return t;
}

RadioMap obtain_map(const std::string& map_path, const SystemConfig& cfg,
                    const GlobalOpts& g, bool save_if_built = true) {
  if (!map_path.empty()) return RadioMap::load(map_path);
  RadioMap map = RadioMap::build(cfg, g.threads);
  if (save_if_built) {
    fs::create_directories(g.out_dir);
    map.save((fs::path(g.out_dir) / "radiomap.lrm").string());
  }
  return map;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"location-uncertainty / wireless-reliability simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "config JSON path (defaults when omitted)");
  app.add_option("--seed", g.seed, "master seed override");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_option("--format", g.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--stamp", g.stamp, "add wall-clock timestamps to artifacts");

  // ---- map build / query
  auto* map_cmd = app.add_subcommand("map", "radio map operations");
  map_cmd->require_subcommand(1);
  auto* map_build_cmd = map_cmd->add_subcommand("build", "build and save the radio map");
  std::string map_out;
  map_build_cmd->add_option("--map-out", map_out, "map output path (default <out>/radiomap.lrm)");

  auto* map_query_cmd = map_cmd->add_subcommand("query", "query a saved map");
  std::string map_in;
  double q_x = 300.0, q_eps = 1e-3;
  int q_bs = 1;
  map_query_cmd->add_option("--map", map_in, "map file")->required();
  map_query_cmd->add_option("--x", q_x, "location [m]")->required();
  map_query_cmd->add_option("--bs", q_bs, "BS index (1 or 2)")->check(CLI::Range(1, 2));
  map_query_cmd->add_option("--eps", q_eps, "outage level");

  // ---- crlb sweep
  auto* crlb_cmd = app.add_subcommand("crlb-sweep", "localization uncertainty over x");
  double c_xmin = 10.0, c_xmax = 990.0, c_step = 10.0;
  crlb_cmd->add_option("--xmin", c_xmin, "")->capture_default_str();
  crlb_cmd->add_option("--xmax", c_xmax, "")->capture_default_str();
  crlb_cmd->add_option("--step", c_step, "")->capture_default_str();

  // ---- calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "calibrate a rate selector");
  std::string cal_scheme;
  double cal_delta = 1e-3, cal_eps = 1e-3, cal_xmin = 45.0, cal_xmax = 955.0,
         cal_xstep = 5.0;
  std::string cal_map;
  cal_cmd->add_option("--scheme", cal_scheme, "backoff|ci|oracle")
      ->required()
      ->check(CLI::IsMember({"backoff", "ci", "oracle"}));
  cal_cmd->add_option("--delta", cal_delta, "meta-probability bound")->capture_default_str();
  cal_cmd->add_option("--eps", cal_eps, "outage level")->capture_default_str();
  cal_cmd->add_option("--xmin", cal_xmin, "")->capture_default_str();
  cal_cmd->add_option("--xmax", cal_xmax, "")->capture_default_str();
  cal_cmd->add_option("--xstep", cal_xstep, "")->capture_default_str();
  cal_cmd->add_option("--map", cal_map, "saved map (built fresh when omitted)");

  // ---- meta
  auto* meta_cmd = app.add_subcommand("meta", "meta-probability curve for a selector");
  std::string meta_sel, meta_map;
  double m_xmin = 45.0, m_xmax = 955.0, m_step = 5.0;
  meta_cmd->add_option("--selector", meta_sel, "calibration record JSON")->required();
  meta_cmd->add_option("--map", meta_map, "saved map (built fresh when omitted)");
  meta_cmd->add_option("--xmin", m_xmin, "")->capture_default_str();
  meta_cmd->add_option("--xmax", m_xmax, "")->capture_default_str();
  meta_cmd->add_option("--step", m_step, "")->capture_default_str();

  // ---- throughput
  auto* thr_cmd = app.add_subcommand("throughput", "throughput-ratio curve for a selector");
  std::string thr_sel, thr_map;
  double t_xmin = 45.0, t_xmax = 955.0, t_step = 5.0;
  thr_cmd->add_option("--selector", thr_sel, "calibration record JSON")->required();
  thr_cmd->add_option("--map", thr_map, "saved map (built fresh when omitted)");
  thr_cmd->add_option("--xmin", t_xmin, "")->capture_default_str();
  thr_cmd->add_option("--xmax", t_xmax, "")->capture_default_str();
  thr_cmd->add_option("--step", t_step, "")->capture_default_str();

  // ---- analytic
  auto* ana_cmd = app.add_subcommand("analytic", "single-subcarrier closed forms");
  double a_x = 300.0, a_k = 0.25, a_eps = 1e-3;
  std::string a_sweep;
  ana_cmd->add_option("--x", a_x, "")->capture_default_str();
  ana_cmd->add_option("--k", a_k, "")->capture_default_str();
  ana_cmd->add_option("--eps", a_eps, "")->capture_default_str();
  ana_cmd->add_option("--sweep", a_sweep, "emit a CSV sweep over x to this path");

  // ---- figure
  auto* fig_cmd = app.add_subcommand("figure", "reproduce a result figure");
  std::string fig_which, fig_map;
  fig_cmd->add_option("which", fig_which, "fig1|fig2|fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  fig_cmd->add_option("--map", fig_map, "saved map (built fresh when omitted)");

  // ---- selftest
  auto* self_cmd = app.add_subcommand("selftest", "quick internal consistency checks");

  CLI11_PARSE(app, argc, argv);

  try {
    SystemConfig cfg = load_effective_config(g);
    const ExperimentPlan plan{"", g.out_dir, g.format, g.threads, cfg.numerics.seed,
                              g.stamp};

    if (map_build_cmd->parsed()) {
      RadioMap map = RadioMap::build(cfg, g.threads);
      fs::create_directories(g.out_dir);
      const std::string path =
          map_out.empty() ? (fs::path(g.out_dir) / "radiomap.lrm").string() : map_out;
      map.save(path);
      std::cout << "map: " << map.grid().size() << " points x 2 BS, "
                << map.n_samples() << " samples/point -> " << path << '\n';
      return 0;
    }
    if (map_query_cmd->parsed()) {
      const RadioMap map = RadioMap::load(map_in);
      const int bs = q_bs - 1;
      std::cout << "eps_quantile(" << q_eps << "; " << q_x << ", BS" << q_bs
                << ") = " << map.eps_quantile(q_eps, q_x, bs) << " bits/s/Hz\n";
      const auto w = map.selection_prob(q_x);
      std::cout << "selection_prob = [" << w[0] << ", " << w[1] << "]\n";
      return 0;
    }
    if (crlb_cmd->parsed()) {
      const CrlbEvaluator ev(cfg);
      const auto nodes = periodic_phase_nodes(cfg.numerics.phase_nodes_meta);
      ResultTable t = new_table("crlb_sweep",
                                {"x_m", "sigma_bar_m", "var_min", "var_max"}, cfg);
      std::vector<double> xs;
      for (double x = c_xmin; x <= c_xmax + 1e-9; x += c_step) xs.push_back(x);
      std::vector<std::array<double, 3>> vals(xs.size());
      parallel_for(xs.size(), g.threads, [&](std::size_t i) {
        double vmin = 1e300, vmax = 0.0, acc = 0.0;
        for (double p1 : nodes)
          for (double p2 : nodes) {
            const double v = ev.variance(xs[i], {p1, p2});
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            acc += v;
          }
        const double n2 = static_cast<double>(nodes.size()) * nodes.size();
        vals[i] = {std::sqrt(acc / n2), vmin, vmax};
      });
      for (std::size_t i = 0; i < xs.size(); ++i)
        t.add_row({xs[i], vals[i][0], vals[i][1], vals[i][2]});
      fs::create_directories(g.out_dir);
      const auto path = (fs::path(g.out_dir) / ("crlb_sweep." + g.format)).string();
      t.emit(g.format, path);
      std::cout << "wrote " << path << '\n';
      return 0;
    }
    if (cal_cmd->parsed()) {
      const RadioMap map = obtain_map(cal_map, cfg, g);
      const CalibrationSpec spec{cal_delta, cal_xmin, cal_xmax, cal_xstep};
      ReliabilityEvaluator ev(map, cfg, g.threads);
      RateSelector sel;
      if (cal_scheme == "backoff")
        sel = RateSelector::backoff(calibrate_backoff(spec, cal_eps, ev, g.threads),
                                    cal_eps);
      else if (cal_scheme == "ci")
        sel = RateSelector::conf_interval(calibrate_ci(spec, cal_eps, ev, g.threads),
                                          cal_eps);
      else
        sel = RateSelector::oracle(calibrate_oracle(spec, cal_eps, ev, g.threads),
                                   cal_eps);
      fs::create_directories(g.out_dir);
      const auto path =
          (fs::path(g.out_dir) / ("calibration_" + cal_scheme + ".json")).string();
      save_selector(sel, spec, map.config_hash(), path);
      if (cal_scheme == "backoff")
        std::cout << "k = " << sel.k << '\n';
      else if (cal_scheme == "ci")
        std::cout << "alpha = " << sel.alpha << '\n';
      std::cout << "wrote " << path << '\n';
      return 0;
    }
    if (meta_cmd->parsed() || thr_cmd->parsed()) {
      const bool is_meta = meta_cmd->parsed();
      const RateSelector sel = load_selector(is_meta ? meta_sel : thr_sel);
      const RadioMap map = obtain_map(is_meta ? meta_map : thr_map, cfg, g);
      ReliabilityEvaluator ev(map, cfg, g.threads);
      const double xmin = is_meta ? m_xmin : t_xmin;
      const double xmax = is_meta ? m_xmax : t_xmax;
      const double step = is_meta ? m_step : t_step;
      std::vector<double> xs;
      for (double x = xmin; x <= xmax + 1e-9; x += step) xs.push_back(x);
      ev.precompute_sigma(xs, g.threads);
      fs::create_directories(g.out_dir);
      if (is_meta) {
        ResultTable t = new_table(
            "meta", {"x_m", "meta_prob", "meta_bs1", "meta_bs2", "p_sel1"}, cfg);
        std::vector<ReliabilityReport> reps(xs.size());
        parallel_for(xs.size(), g.threads, [&](std::size_t i) {
          reps[i] = ev.meta_prob(xs[i], sel, sel.eps);
        });
        for (std::size_t i = 0; i < xs.size(); ++i)
          t.add_row({xs[i], reps[i].meta_prob, reps[i].per_bs_meta[0],
                     reps[i].per_bs_meta[1], reps[i].selection_weight[0]});
        const auto path = (fs::path(g.out_dir) / ("meta." + g.format)).string();
        t.emit(g.format, path);
        std::cout << "wrote " << path << '\n';
      } else {
        ResultTable t = new_table("throughput", {"x_m", "omega"}, cfg);
        std::vector<double> om(xs.size());
        parallel_for(xs.size(), g.threads, [&](std::size_t i) {
          om[i] = ev.throughput_ratio(xs[i], sel, sel.eps);
        });
        for (std::size_t i = 0; i < xs.size(); ++i) t.add_row({xs[i], om[i]});
        const auto path = (fs::path(g.out_dir) / ("throughput." + g.format)).string();
        t.emit(g.format, path);
        std::cout << "wrote " << path << '\n';
      }
      return 0;
    }
    if (ana_cmd->parsed()) {
      const TailConstants tc = tail_constants(a_eps, cfg);
      std::printf("psi        = %.10g\n", tc.psi);
      std::printf("psi_prime  = %.10g m^2\n", tc.psi_prime);
      std::printf("capacity   = %.10g bits/s/Hz\n",
                  analytic_outage_capacity(a_eps, a_x, cfg));
      std::printf("edge_exact = %.10g m\n", edge_exact(a_x, a_k, a_eps, cfg));
      std::printf("edge_approx= %.10g m\n", edge_approx(a_x, a_k));
      if (!a_sweep.empty()) {
        ResultTable t = new_table(
            "analytic_sweep",
            {"x_m", "capacity_bits", "edge_exact_m", "edge_approx_m"}, cfg);
        for (double x = 10.0; x <= 990.0 + 1e-9; x += 10.0)
          t.add_row({x, analytic_outage_capacity(a_eps, x, cfg),
                     edge_exact(x, a_k, a_eps, cfg), edge_approx(x, a_k)});
        t.emit_csv(a_sweep);
        std::cout << "wrote " << a_sweep << '\n';
      }
      return 0;
    }
    if (fig_cmd->parsed()) {
      std::optional<RadioMap> map;
      if (!fig_map.empty()) map = RadioMap::load(fig_map);
      const FigureResult res =
          run_figure(fig_which, cfg, plan, map ? &*map : nullptr);
      for (const auto& p : res.paths) std::cout << "wrote " << p << '\n';
      return 0;
    }
    if (self_cmd->parsed()) {
      const int failures = selftest(std::cout);
      if (failures != 0) {
        std::cerr << failures << " selftest check(s) failed\n";
        return 4;
      }
      return 0;
    }
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
