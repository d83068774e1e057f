#pragma once

#include "levyq/calib.hpp"
#include "levyq/models.hpp"

#include <cstdint>
#include <span>
#include <vector>

// Time-series parameter estimation: the integrated VG transition density,
// the VGSA conditional density given a realized clock increment, an extended
// Kalman filter proposal, a systematic-resampling particle filter, and
// negative log-likelihood minimization with common random numbers.

namespace levyq {

struct LogReturnSeries {
    std::vector<double> log_prices; // equally spaced in time
    double dt = 1.0 / 252.0;        // years per step

    void validate() const; // needs >= 2 points, dt > 0
    std::size_t num_returns() const { return log_prices.size() - 1; }
};

/// Integrated VG transition log-density of a log return z over horizon h,
/// with observed drift mu (r - q under the risk-neutral frame).
double vg_log_density(double z, double h, double mu, const VgParams& params);

/// Density form of the above; underflow comes back as 0.
double vg_density(double z, double h, const VgParams& params,
                  const MarketEnv& env);

/// VGSA conditional log-density given realized clock increment h_star: the
/// VG density with h_star in the shape and exponent positions while the
/// calendar step h keeps the mu drift term.
double vgsa_conditional_log_density(double z, double h_star, double h,
                                    double mu, const VgsaParams& params);

double vgsa_conditional_density(double z, double h_star, double h,
                                const VgsaParams& params,
                                const MarketEnv& env);

struct EkfState {
    double x_post = 0.0;
    double p_post = 0.0;
    double x_prior = 0.0;
    double p_prior = 0.0;
};

/// One EKF prediction + update for the arrival-rate state. z is the log
/// return over dt. States are floored at state_floor.
EkfState ekf_step(double x_prev, double p_prev, double z,
                  const VgsaParams& params, double mu, double dt,
                  double state_floor = 1e-10);

/// Stratified resampling: slot j draws u_j = (draws[j] + j) / N and copies
/// the first particle whose cumulative weight reaches u_j. Returns source
/// indices so callers can resample any per-particle payload.
std::vector<std::size_t> sir_resample_indices(std::span<const double> weights,
                                              std::span<const double> draws);

/// Convenience overload returning the resampled states themselves.
std::vector<double> sir_resample(std::span<const double> weights,
                                 std::span<const double> states,
                                 std::span<const double> draws);

struct PfConfig {
    int num_particles = 100;
    std::uint64_t seed = 0;
    double x0 = 1.0;          // initial arrival rate
    double p0 = 1e-6;         // initial posterior variance
    double state_floor = 1e-10;

    void validate() const;
};

struct FilterOutput {
    double nll = 0.0;                      // negative total log-likelihood
    std::vector<double> state_estimates;   // posterior mean arrival rate
    std::vector<double> prediction_errors; // z_k minus its one-step prediction
    std::vector<double> error_variances;   // (theta^2 nu + sigma^2) xbar dt
    std::int64_t weight_resets = 0;        // all-weights-zero recoveries
};

/// SIR particle filter for VGSA with EKF proposals. Deterministic for a
/// given seed and config.
FilterOutput vgsa_pf_loglik(const LogReturnSeries& series,
                            const VgsaParams& params, double mu,
                            const PfConfig& cfg);

struct PfMleResult {
    VgsaParams params{};
    double nll = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Negative log-likelihood minimization over (sigma, nu, theta, kappa, eta,
/// lambda) with positivity on all but theta. Every objective evaluation
/// reuses the same seed, so Nelder-Mead sees a deterministic surface.
PfMleResult pf_mle(const LogReturnSeries& series, const VgsaParams& start,
                   double mu, const PfConfig& cfg, const NmOptions& nm = {});

} // namespace levyq
