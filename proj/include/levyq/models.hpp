#pragma once

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

// Exponential Levy model parameter sets and the transforms every pricer,
// simulator, calibrator and filter consumes: characteristic functions,
// martingale corrections, cumulants and discretized Levy measures.

namespace levyq {

using cplx = std::complex<double>;

enum class ModelKind { BS, VG, VGSA, CGMY };

std::string to_string(ModelKind kind);

struct BsParams {
    double sigma; // volatility, 1/sqrt(year)
};

struct VgParams {
    double sigma; // diffusion scale of the subordinated BM
    double nu;    // variance rate of the gamma subordinator, years
    double theta; // drift of the subordinated BM, 1/year
};

struct VgsaParams {
    double sigma;
    double nu;
    double theta;
    double kappa;  // mean-reversion rate of the clock, 1/year
    double eta;    // long-run clock rate
    double lambda; // clock volatility
};

struct CgmyParams {
    double C; // activity
    double G; // tempering of the negative-jump tail in the cf convention
    double M; // tempering of the positive-jump tail in the cf convention
    double Y; // stability, < 2 (Y = 0 and Y = 1 are Gamma poles, excluded)
};

/// Tagged union of per-model parameter sets. Construct through the factory
/// functions; validate() enforces the domain restrictions shared by all
/// consumers.
class ModelParams {
public:
    static ModelParams bs(double sigma);
    static ModelParams vg(double sigma, double nu, double theta);
    static ModelParams vgsa(double sigma, double nu, double theta, double kappa,
                            double eta, double lambda);
    static ModelParams cgmy(double C, double G, double M, double Y);

    ModelKind kind() const;
    const BsParams& as_bs() const;
    const VgParams& as_vg() const;
    const VgsaParams& as_vgsa() const;
    const CgmyParams& as_cgmy() const;

    /// Throws std::domain_error on any violated parameter restriction.
    void validate() const;

private:
    std::variant<BsParams, VgParams, VgsaParams, CgmyParams> value_;
};

/// Risk-neutral frame shared by all pricing: spot, short rate, dividend yield.
struct MarketEnv {
    double S0 = 100.0;
    double r = 0.0;
    double q = 0.0;

    void validate() const; // S0 > 0
};

/// First, second and fourth cumulant of the log asset at maturity plus the
/// per-unit-time martingale correction w.
struct CumulantSet {
    double c1 = 0.0;
    double c2 = 0.0;
    double c4 = 0.0;
    double w = 0.0;
};

/// Levy measure discretized to point masses p_k at log-jump sizes x_k, plus
/// the diffusion coefficient A (sigma^2) and drift b of the triplet. Pairwise
/// entropy computations require identical grids.
struct DiscreteLevyMeasure {
    std::vector<double> x; // strictly increasing, excludes 0
    std::vector<double> p; // nonnegative masses
    double diffusion = 0.0;
    double drift = 0.0;
};

/// E[exp(i u X_t)] of the centered (drift-free, uncorrected) process.
/// BS is the pure diffusion exp(-sigma^2 u^2 t / 2); VG and CGMY are the
/// closed forms; VGSA composes the integrated-CIR clock transform with the
/// unit-time VG log-cf at unit initial clock rate.
cplx characteristic_function(const ModelParams& model, cplx u, double t);

/// Per-unit-time martingale correction w with exp(w t) E[exp(X_t)] = 1 for
/// VG and CGMY. BS returns 0 (its -sigma^2/2 drift lives inside
/// log_price_cf); VGSA needs no scalar correction because its log-price cf
/// self-normalizes through the ratio form.
double martingale_correction(const ModelParams& model);

/// E[exp(i u ln S_T)] under the risk-neutral measure, drift and martingale
/// correction included, so that log_price_cf(-i) = S0 exp((r-q)T).
cplx log_price_cf(const ModelParams& model, const MarketEnv& env, cplx u,
                  double T);

/// Closed-form cumulants of ln(S_T/S0) for BS, VG and CGMY, with the drift
/// mu taken as r - q + w. VGSA has no closed form; use cumulants_fd.
CumulantSet cumulants(const ModelParams& model, const MarketEnv& env, double T);

/// Finite-difference cumulants of the cumulant generating function
/// G(w) = ln E[(S_T/S0)^w]. The requested step is a floor: each order uses
/// at least its own noise-optimal step, because fourth differences at the
/// nominal h = 1e-6 sit far below double-precision noise.
CumulantSet cumulants_fd(const ModelParams& model, const MarketEnv& env,
                         double T, double h = 1e-6);

/// Levy density of the jump part, defined for VG and CGMY. x != 0.
double levy_density(const ModelParams& model, double x);

/// Midpoint-rule discretization of the Levy density on the given grid.
/// The grid must exclude 0 (the density is singular there).
DiscreteLevyMeasure discretize_levy_measure(const ModelParams& model,
                                            std::span<const double> grid);

/// Default calibration grid: 201 points spanning [-1, 1] with a symmetric
/// hole of width 2e-3 around the origin.
std::vector<double> default_levy_grid();

} // namespace levyq
