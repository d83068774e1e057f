#pragma once

#include "levyq/models.hpp"

#include <string>
#include <vector>

// Deterministic pricers: analytic Black-Scholes and VG calls, the Carr-Madan
// FFT strip pricer with optimal damping, and the Fourier-cosine pricer with
// cumulant-based truncation.

namespace levyq {

enum class OptionKind { Call, Put };

enum class Quadrature { Trapezoid, Simpson };

struct FftConfig {
    int n = 1 << 9;          // grid size, power of two
    double eta = 50.0 / 512; // frequency spacing; upper limit B = n * eta
    double alpha = 0.0;      // damping; <= 0 means use optimal_damping
    Quadrature quadrature = Quadrature::Simpson;

    void validate() const;
};

struct CosConfig {
    int n = 1 << 7; // number of cosine terms
    double L = 10.0; // truncation width multiplier

    void validate() const;
};

struct PriceStrip {
    std::vector<double> strikes;  // ascending
    std::vector<double> premiums; // same length
    std::string method;
};

/// Black-Scholes-Merton European call, dividend yield folded in as
/// S -> S exp(-q tau).
double bs_call(const MarketEnv& env, double K, double T, double sigma);

/// Black-Scholes European put (parity complement of bs_call).
double bs_put(const MarketEnv& env, double K, double T, double sigma);

/// Closed-form VG call approximation (valid for large T/nu), transcribed
/// with alpha = -theta/sigma. Throws std::domain_error when a fractional
/// power would see a negative base.
double vg_call_analytic(const MarketEnv& env, double K, double T,
                        const VgParams& params);

/// Payoff-independent damping parameter for the Carr-Madan pricer. Returns
/// the closed forms for BS and VG clamped into the cf domain; falls back to
/// 1.5 whenever the formula yields a nonpositive or out-of-domain value.
double optimal_damping(const ModelParams& model, const MarketEnv& env,
                       double K, double T, double eta);

/// Carr-Madan FFT call premiums on the full log-strike grid
/// k_m = ln S0 - N lambda / 2 + (m-1) lambda.
PriceStrip fft_price_strip(const ModelParams& model, const MarketEnv& env,
                           double T, const FftConfig& cfg);

/// Single-strike readout of the Carr-Madan grid: linear interpolation in
/// log-strike between the two neighbouring grid premiums.
double fft_price(const ModelParams& model, const MarketEnv& env, double K,
                 double T, const FftConfig& cfg);

/// COS truncation interval [a, b] = c1 -+ L sqrt(c2 + sqrt(c4)), cumulants
/// closed-form where available and finite-difference for VGSA. Throws if the
/// interval does not straddle 0 (the payoff split needs a < 0 < b).
std::pair<double, double> cos_truncation_range(const ModelParams& model,
                                               const MarketEnv& env, double T,
                                               double L);

/// Cosine coefficients of exp(y) over [c, d] within the expansion
/// interval [a, b].
std::vector<double> cos_chi(int n, double a, double b, double c, double d);

/// Cosine coefficients of 1 over [c, d]; the k = 0 branch is d - c.
std::vector<double> cos_psi(int n, double a, double b, double c, double d);

/// Payoff cosine coefficients V_k: calls integrate K(e^y - 1) over (0, b),
/// puts integrate K(1 - e^y) over (a, 0).
std::vector<double> cos_payoff_coeffs(OptionKind kind, double a, double b,
                                      double K, int n);

/// Fourier-cosine premium. Strikes with |ln(S0/K)| beyond 80% of the
/// truncation half-width are rejected with a diagnostic instead of returning
/// a silently skewed value.
double cos_price(const ModelParams& model, const MarketEnv& env, double K,
                 double T, const CosConfig& cfg,
                 OptionKind kind = OptionKind::Call);

} // namespace levyq
