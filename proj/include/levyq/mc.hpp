#pragma once

#include "levyq/models.hpp"
#include "levyq/pricing.hpp"
#include "levyq/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

// Monte Carlo engines for BS, VG, VGSA and CGMY terminal prices and paths,
// with antithetic variates and standard-error reporting. Paths own
// independent RNG substreams keyed by (seed, path index), so premiums are
// bit-identical for a given seed regardless of thread partitioning.

namespace levyq {

struct McConfig {
    std::int64_t num_paths = 10000;
    int steps = 100;
    std::uint64_t seed = 0;
    bool antithetic = true;
    double cgmy_epsilon = 1e-4;        // jump truncation level
    double max_expected_jumps = 1e7;   // cap on lambda * T per path

    void validate() const;
};

struct McPrice {
    double premium = 0.0;
    double standard_error = 0.0;
    std::int64_t num_paths_effective = 0;
};

struct PricePath {
    std::vector<double> times;      // ascending, times[0] = 0
    std::vector<double> log_prices; // same length
};

/// Diagnostics accumulated while simulating.
struct McStats {
    std::int64_t cir_floor_events = 0;   // CIR positivity floor triggers
    std::int64_t acceptance_clamps = 0;  // cgmy acceptance outside [0,1]
    std::int64_t acceptance_proposals = 0;
};

/// Rosinski thinning probability for the CGMY subordinator: the jump of size
/// y survives with probability h(y). Values outside [0,1] (roundoff in the
/// parabolic cylinder evaluation) are clamped and counted.
double cgmy_acceptance(double y, double Y, double B, McStats* stats = nullptr);

/// Terminal log prices ln S_T for any model. With antithetic on, entries
/// (2i, 2i+1) form a pair sharing gamma/uniform/jump draws with the Gaussian
/// components negated on the second leg.
std::vector<double> mc_terminal_log_prices(const ModelParams& model,
                                           const MarketEnv& env, double T,
                                           const McConfig& cfg,
                                           McStats* stats = nullptr);

std::vector<PricePath> simulate_vg(const MarketEnv& env, const VgParams& params,
                                   double T, const McConfig& cfg);
std::vector<PricePath> simulate_vgsa(const MarketEnv& env,
                                     const VgsaParams& params, double T,
                                     const McConfig& cfg,
                                     McStats* stats = nullptr);
std::vector<PricePath> simulate_cgmy(const MarketEnv& env,
                                     const CgmyParams& params, double T,
                                     const McConfig& cfg,
                                     McStats* stats = nullptr);

/// Path simulation for any model (BS paths are exact GBM increments).
std::vector<PricePath> simulate_paths(const ModelParams& model,
                                      const MarketEnv& env, double T,
                                      const McConfig& cfg,
                                      McStats* stats = nullptr);

/// Discounted mean payoff with standard error. Antithetic pairs are averaged
/// before the variance is computed.
McPrice mc_price(std::span<const double> terminal_log_prices, OptionKind kind,
                 double K, const MarketEnv& env, double T, bool antithetic);

McPrice mc_price(const std::vector<PricePath>& paths, OptionKind kind,
                 double K, const MarketEnv& env, double T, bool antithetic);

} // namespace levyq
