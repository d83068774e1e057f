#pragma once

#include "levyq/models.hpp"
#include "levyq/pricing.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

// Cross-sectional calibration: vega-weighted least squares on option chains,
// discretized relative-entropy regularization against a prior model,
// Nelder-Mead minimization and multi-start search.

namespace levyq {

struct OptionQuote {
    double strike = 0.0;
    double maturity = 0.0; // years
    double mid = 0.0;
    std::optional<double> bid;
    std::optional<double> ask;
    std::optional<double> weight; // overrides the weight rule when present
};

struct OptionChain {
    std::vector<OptionQuote> quotes;
    MarketEnv env;

    void validate() const;
};

/// Black-Scholes vega in the weight-rule form |K e^{-rT} N(d-) sqrt(T)|,
/// floored at eps so reciprocal-square weights stay finite.
double vega(const MarketEnv& env, double K, double T, double sigma,
            double eps = 1e-8);

/// Reciprocal-square-vega weights for a chain, one per quote; quotes with an
/// explicit weight override keep it.
std::vector<double> vega_weights(const OptionChain& chain, double sigma,
                                 double eps = 1e-8);

using Pricer = std::function<double(const ModelParams&, const MarketEnv&,
                                    double K, double T)>;

/// Default pricer used by calibration: Fourier-cosine call premium.
Pricer cos_pricer(const CosConfig& cfg = {});

/// Sum of w_i (mid_i - model price_i)^2 over the chain. Pricer failures are
/// rethrown with the offending quote attached.
double weighted_sq_error(const ModelParams& model, const OptionChain& chain,
                         std::span<const double> weights, const Pricer& pricer);

/// Unweighted root mean square pricing error, (1/sqrt(N)) ||C_hat - C||_2.
double rmse(const ModelParams& model, const OptionChain& chain,
            const Pricer& pricer);

/// Drift and jump pieces of the discretized relative entropy, before the
/// horizon scaling. The drift bracket is reported separately because the
/// paper leaves the prior drift convention open; the jump part alone is zero
/// at q = p.
struct EntropyTerms {
    double drift = 0.0; // (1/2A)(A/2 + b_P + sum (e^x - 1) q)^2, 0 when A = 0
    double jump = 0.0;  // sum q ln(q/p) + p - q
};

EntropyTerms entropy_terms(const DiscreteLevyMeasure& q,
                           const DiscreteLevyMeasure& p);

/// T * (drift + jump) per the discretized functional. Requires identical
/// grids, identical diffusion, and absolute continuity on the grid.
double relative_entropy(const DiscreteLevyMeasure& q,
                        const DiscreteLevyMeasure& p, double T);

/// Weighted squared error plus alpha times the relative entropy between the
/// discretized Levy measures of model and prior on the shared grid. The
/// entropy horizon is the chain's largest maturity.
double rmemc_objective(const ModelParams& model, const OptionChain& chain,
                       const ModelParams& prior, double alpha,
                       std::span<const double> grid,
                       std::span<const double> weights, const Pricer& pricer);

/// Vega rule for the regularization strength: scale_A times the chain's
/// median vega. sigma feeds the vega formula (ATM-vol proxy).
double choose_alpha(const OptionChain& chain, const MarketEnv& env,
                    double scale_A, double sigma = 0.2);

struct NmOptions {
    double tol = 1e-5;     // simplex spread tolerance (both x and f)
    int max_iters = 1000;
};

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace; // best objective value per iteration
};

/// Nelder-Mead with componentwise log-reparameterization for coordinates
/// flagged positive. Throws if the objective is not finite at the start.
NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0,
                     std::span<const bool> positive_mask,
                     const NmOptions& opts = {});

struct CalibrationResult {
    ModelParams params = ModelParams::vg(0.2, 0.1, 0.0);
    double objective = 0.0;
    double weighted_sq = 0.0; // rmse_w^2 component of the objective
    double rmse = 0.0;        // unweighted
    double entropy = 0.0;     // relative entropy term (unscaled by alpha)
    double alpha = 0.0;
    int iterations = 0;
    int start_id = -1;
    bool converged = false;
};

struct CalibSetup {
    ModelKind family = ModelKind::VG;
    OptionChain chain;
    std::vector<double> weights; // empty = unit weights
    double alpha = 0.0;
    std::optional<ModelParams> prior; // required when alpha > 0
    std::vector<double> grid;         // empty = default_levy_grid()
    Pricer pricer;                    // empty = cos_pricer()
    NmOptions nm;
};

/// Parameter-vector layout per family: VG (sigma, nu, theta),
/// VGSA (sigma, nu, theta, kappa, eta, lambda), CGMY (C, G, M, Y),
/// BS (sigma).
ModelParams model_from_vector(ModelKind family, std::span<const double> x);
std::vector<double> vector_from_model(const ModelParams& model);
std::vector<bool> positivity_mask(ModelKind family);

/// Runs Nelder-Mead from every start (concurrently) and returns the best
/// result by objective; ties break toward the lower entropy term and then the
/// lower start id. Throws with the per-start failure list when no start
/// produces a finite objective.
CalibrationResult multistart_calibrate(
    const CalibSetup& setup, const std::vector<std::vector<double>>& starts);

} // namespace levyq
