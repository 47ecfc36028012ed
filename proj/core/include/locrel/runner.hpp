#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "locrel/config.hpp"
#include "locrel/radiomap.hpp"
#include "locrel/rateselect.hpp"
#include "locrel/result_table.hpp"

namespace locrel {

/// One orchestrated run: where the config came from, where outputs go, and
/// the execution knobs. The master seed is recorded in every artifact.
struct ExperimentPlan {
  std::string name;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned threads = 0;  ///< 0 = all cores
  std::uint64_t seed = 0;
  bool stamp = false;  ///< add a wall-clock timestamp line (breaks reproducibility)
};

/// Results of a figure run, one table per emitted file.
struct FigureResult {
  std::vector<ResultTable> tables;
  std::vector<std::string> paths;
};

/// Reproduces one of the result figures at desk scale:
///  - fig1: localization std and eps-quantile curves over x.
///  - fig2: outage probability vs estimated location at x = 300 m with
///    backoff k = 0.25, the estimate density, and the outage-region edges.
///  - fig3: meta-probability and throughput-ratio curves for the three
///    calibrated selectors; fails loudly if a calibration misses its bound.
/// The map is built from cfg when not supplied. A plotting script for the
/// emitted CSVs is written next to them.
FigureResult run_figure(const std::string& which, const SystemConfig& cfg,
                        const ExperimentPlan& plan,
                        const RadioMap* prebuilt_map = nullptr);

/// Quick internal consistency checks; prints one line per check to `out`
/// and returns the number of failures.
int selftest(std::ostream& out);

}  // namespace locrel
