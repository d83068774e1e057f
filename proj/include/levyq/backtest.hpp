#pragma once

#include "levyq/calib.hpp"
#include "levyq/filter.hpp"
#include "levyq/mc.hpp"

#include <cstdint>
#include <vector>

// Backtest drivers: day-by-day RMEMC calibration with prior chaining, the
// particle-filter recovery on a simulated path, and the cross-method premium
// comparison table.

namespace levyq {

/// Evenly spaced strike strip (default 30 strikes spanning +-30% of spot).
std::vector<double> strike_strip(double S0, int count = 30,
                                 double span = 0.30);

/// Synthetic call chain priced by the Fourier-cosine method at the given
/// model.
OptionChain synthetic_chain(const ModelParams& model, const MarketEnv& env,
                            double T, std::span<const double> strikes);

struct RmemcDay {
    int day = 0;
    bool ok = false;
    std::string error;
    CalibrationResult result;
    double sse_vs_actual = 0.0; // sum of squared premium errors on the strip
};

struct RmemcBacktestConfig {
    ModelKind family = ModelKind::VG;
    MarketEnv env;
    double maturity = 0.25;
    double alpha = 0.0;
    std::vector<std::vector<double>> starts; // day-1 multistart grid
    NmOptions nm;
    int strikes = 30;
};

/// Day-by-day calibration against per-day chains; from day 2 on, the prior
/// and single start point is the previous day's argmin (the chained-prior
/// recursion). Per-day failures are recorded and the run continues.
std::vector<RmemcDay> backtest_rmemc(const RmemcBacktestConfig& cfg,
                                     const std::vector<OptionChain>& days);

struct CompareRow {
    double strike = 0.0;
    double ls_mc = 0.0;
    double pf_mc = 0.0;
    double ls_cos = 0.0;
    double pf_cos = 0.0;
    double actual = 0.0;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double mean_abs_ls_pf = 0.0;
    double mean_abs_ls_actual = 0.0;
    double mean_abs_pf_actual = 0.0;
};

/// Prices the strip under the calibrated (LS) and filtered (PF) parameter
/// sets with one shared Monte Carlo seed, plus the Fourier-cosine premiums,
/// against the supplied actual premiums.
CompareReport compare_premiums(const ModelParams& ls_model,
                               const ModelParams& pf_model,
                               const MarketEnv& env, double T,
                               std::span<const double> strikes,
                               std::span<const double> actual_premiums,
                               const McConfig& mc_cfg);

} // namespace levyq
