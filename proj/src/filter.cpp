#include "levyq/filter.hpp"

#include "levyq/rng.hpp"
#include "levyq/specfun.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace levyq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTiny = 1e-300;

double vg_omega(const VgParams& p) {
    const double arg = 1.0 - p.theta * p.nu - 0.5 * p.sigma * p.sigma * p.nu;
    if (!(arg > 0.0))
        throw std::domain_error(
            "vg density: 1 - theta nu - sigma^2 nu / 2 must be > 0");
    return std::log(arg) / p.nu;
}

// Shared core: h_shape enters the gamma-shape and exponent positions,
// h_drift scales the martingale-correction part of x_h, h_cal the mu drift.
double vg_log_density_core(double z, double h_shape, double h_cal, double mu,
                           const VgParams& p) {
    if (!(h_shape > 0.0 && h_cal > 0.0))
        throw std::domain_error("vg density: horizons must be > 0");
    if (!(p.sigma > 0.0 && p.nu > 0.0))
        throw std::domain_error("vg density: requires sigma, nu > 0");
    const double omega = vg_omega(p);
    const double s2 = p.sigma * p.sigma;
    double xh = z - mu * h_cal - h_shape * omega;
    // The density is integrably singular at xh = 0; a floor keeps it finite.
    if (std::fabs(xh) < 1e-12) xh = (xh < 0.0) ? -1e-12 : 1e-12;
    const double shape = h_shape / p.nu;
    const double scale2 = 2.0 * s2 / p.nu + p.theta * p.theta;
    const double bessel_arg = std::sqrt(xh * xh * scale2) / s2;
    const double bessel_order = shape - 0.5;
    return std::log(2.0) + p.theta * xh / s2 - shape * std::log(p.nu) -
           0.5 * std::log(2.0 * kPi) - std::log(p.sigma) -
           specfun::log_gamma(shape) +
           (0.5 * shape - 0.25) * std::log(xh * xh / scale2) +
           specfun::log_bessel_k(bessel_order, bessel_arg);
}

} // namespace

double vg_log_density(double z, double h, double mu, const VgParams& params) {
    return vg_log_density_core(z, h, h, mu, params);
}

double vg_density(double z, double h, const VgParams& params,
                  const MarketEnv& env) {
    return std::exp(vg_log_density(z, h, env.r - env.q, params));
}

double vgsa_conditional_log_density(double z, double h_star, double h,
                                    double mu, const VgsaParams& params) {
    const VgParams vg{params.sigma, params.nu, params.theta};
    return vg_log_density_core(z, h_star, h, mu, vg);
}

double vgsa_conditional_density(double z, double h_star, double h,
                                const VgsaParams& params,
                                const MarketEnv& env) {
    return std::exp(
        vgsa_conditional_log_density(z, h_star, h, env.r - env.q, params));
}

void LogReturnSeries::validate() const {
    if (log_prices.size() < 2)
        throw std::domain_error("LogReturnSeries: need at least 2 prices");
    if (!(dt > 0.0)) throw std::domain_error("LogReturnSeries: dt must be > 0");
}

EkfState ekf_step(double x_prev, double p_prev, double z,
                  const VgsaParams& params, double mu, double dt,
                  double state_floor) {
    if (!(x_prev >= state_floor))
        throw std::domain_error("ekf_step: state below floor");
    const VgParams vg{params.sigma, params.nu, params.theta};
    const double omega = vg_omega(vg);
    EkfState out;
    out.x_prior =
        std::max(state_floor, x_prev + params.kappa * (params.eta - x_prev) * dt);
    const double a = 1.0 - params.kappa * dt; // d f / d x of the CIR drift map
    const double w = params.lambda * std::sqrt(x_prev * dt);
    out.p_prior = a * p_prev * a + w * w;
    const double h_jac = params.theta * dt;
    const double u = std::sqrt(params.theta * params.theta * params.nu +
                               params.sigma * params.sigma) *
                     std::sqrt(out.x_prior * dt);
    const double gain =
        out.p_prior * h_jac / (h_jac * out.p_prior * h_jac + u * u);
    const double predicted = (mu + omega + params.theta * out.x_prior) * dt;
    out.x_post = std::max(state_floor, out.x_prior + gain * (z - predicted));
    out.p_post = (1.0 - gain * h_jac) * out.p_prior;
    return out;
}

std::vector<std::size_t> sir_resample_indices(std::span<const double> weights,
                                              std::span<const double> draws) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::domain_error("sir_resample: no particles");
    if (draws.size() != n)
        throw std::domain_error("sir_resample: need one draw per slot");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::domain_error("sir_resample: negative weight");
        total += w;
    }
    if (!(total > 0.0))
        throw std::domain_error("sir_resample: all weights are zero");
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::domain_error("sir_resample: weights must sum to 1");
    std::vector<std::size_t> out(n);
    std::size_t i = 0;
    double cum = weights[0];
    for (std::size_t j = 0; j < n; ++j) {
        const double u = (draws[j] + static_cast<double>(j)) /
                         static_cast<double>(n);
        while (cum < u && i + 1 < n) {
            ++i;
            cum += weights[i];
        }
        out[j] = i;
    }
    return out;
}

std::vector<double> sir_resample(std::span<const double> weights,
                                 std::span<const double> states,
                                 std::span<const double> draws) {
    if (states.size() != weights.size())
        throw std::domain_error("sir_resample: states/weights mismatch");
    const auto idx = sir_resample_indices(weights, draws);
    std::vector<double> out(states.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = states[idx[j]];
    return out;
}

void PfConfig::validate() const {
    if (num_particles < 1)
        throw std::domain_error("PfConfig: num_particles must be >= 1");
    if (!(p0 >= 0.0)) throw std::domain_error("PfConfig: p0 must be >= 0");
    if (!(state_floor > 0.0))
        throw std::domain_error("PfConfig: state_floor must be > 0");
}

FilterOutput vgsa_pf_loglik(const LogReturnSeries& series,
                            const VgsaParams& params, double mu,
                            const PfConfig& cfg) {
    series.validate();
    cfg.validate();
    const double dt = series.dt;
    const VgParams vg{params.sigma, params.nu, params.theta};
    const double omega = vg_omega(vg);
    const int n = cfg.num_particles;
    Rng rng(cfg.seed);

    std::vector<double> x(n), p(n, cfg.p0), w(n, 1.0 / n);
    for (int i = 0; i < n; ++i)
        x[i] = std::max(cfg.state_floor,
                        cfg.x0 + std::sqrt(cfg.p0) * rng.normal());

    const std::size_t steps = series.num_returns();
    FilterOutput out;
    out.state_estimates.resize(steps);
    out.prediction_errors.resize(steps);
    out.error_variances.resize(steps);

    std::vector<double> x_new(n), p_new(n), w_new(n), draws(n);
    double logl = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double z = series.log_prices[k + 1] - series.log_prices[k];
        double prior_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const EkfState ekf =
                ekf_step(x[i], p[i], z, params, mu, dt, cfg.state_floor);
            prior_sum += ekf.x_prior;
            const double prop_std = std::max(std::sqrt(ekf.p_post), kTiny);
            const double x_sim = std::max(
                cfg.state_floor, ekf.x_post + prop_std * rng.normal());
            // proposal density q = N(x_post, sqrt(p_post))
            const double dq = (x_sim - ekf.x_post) / prop_std;
            const double q_dens =
                std::exp(-0.5 * dq * dq) / (prop_std * std::sqrt(2.0 * kPi));
            // transition density from this particle's own previous state
            const double m_tr = x[i] + params.kappa * (params.eta - x[i]) * dt;
            const double s_tr =
                std::max(params.lambda * std::sqrt(x[i] * dt), kTiny);
            const double dtr = (x_sim - m_tr) / s_tr;
            const double p_tr =
                std::exp(-0.5 * dtr * dtr) / (s_tr * std::sqrt(2.0 * kPi));
            const double log_pz = vgsa_conditional_log_density(
                z, dt * x_sim, dt, mu, params);
            const double pz = std::exp(log_pz);
            x_new[i] = x_sim;
            p_new[i] = ekf.p_post;
            w_new[i] = w[i] * pz * p_tr / std::max(q_dens, kTiny);
            if (!std::isfinite(w_new[i])) w_new[i] = 0.0;
        }
        const double xbar = prior_sum / n;
        out.prediction_errors[k] =
            z - (mu + omega + params.theta * xbar) * dt;
        out.error_variances[k] =
            (params.theta * params.theta * params.nu +
             params.sigma * params.sigma) *
            xbar * dt;

        double sumw = std::accumulate(w_new.begin(), w_new.end(), 0.0);
        if (!(sumw > 0.0) || !std::isfinite(sumw)) {
            // every particle died; restart from uniform weights and skip this
            // step's likelihood contribution
            ++out.weight_resets;
            std::fill(w_new.begin(), w_new.end(), 1.0 / n);
            sumw = 0.0;
        } else {
            logl += std::log(sumw);
            for (auto& v : w_new) v /= sumw;
        }

        double post_mean = 0.0;
        for (int i = 0; i < n; ++i) post_mean += w_new[i] * x_new[i];
        out.state_estimates[k] = post_mean;

        for (auto& d : draws) d = rng.uniform();
        const auto idx = sir_resample_indices(w_new, draws);
        for (int i = 0; i < n; ++i) {
            x[i] = x_new[idx[i]];
            p[i] = p_new[idx[i]];
        }
        std::fill(w.begin(), w.end(), 1.0 / n);
    }
    out.nll = -logl;
    return out;
}

PfMleResult pf_mle(const LogReturnSeries& series, const VgsaParams& start,
                   double mu, const PfConfig& cfg, const NmOptions& nm) {
    series.validate();
    cfg.validate();
    auto objective = [&](std::span<const double> v) {
        const VgsaParams p{v[0], v[1], v[2], v[3], v[4], v[5]};
        // common random numbers: identical seed on every evaluation
        return vgsa_pf_loglik(series, p, mu, cfg).nll;
    };
    const std::vector<double> x0{start.sigma, start.nu,  start.theta,
                                 start.kappa, start.eta, start.lambda};
    const std::vector<bool> mask{true, true, false, true, true, true};
    const NmResult res = nelder_mead(objective, x0, mask, nm);
    PfMleResult out;
    out.params = VgsaParams{res.x[0], res.x[1], res.x[2],
                            res.x[3], res.x[4], res.x[5]};
    out.nll = res.fx;
    out.iterations = res.iterations;
    out.converged = res.converged;
    return out;
}

} // namespace levyq
