#include "levyq/pricing.hpp"

#include "levyq/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace levyq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, forward transform with the
// exp(-2 pi i j m / N) sign convention.
void fft_forward(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Largest damping alpha keeping E[S_T^(1+alpha)] finite, with a safety margin.
double max_damping(const ModelParams& model) {
    switch (model.kind()) {
        case ModelKind::BS:
            return 50.0;
        case ModelKind::VG:
        case ModelKind::VGSA: {
            double sigma, nu, theta;
            if (model.kind() == ModelKind::VG) {
                const auto& p = model.as_vg();
                sigma = p.sigma; nu = p.nu; theta = p.theta;
            } else {
                const auto& p = model.as_vgsa();
                sigma = p.sigma; nu = p.nu; theta = p.theta;
            }
            const double a = 0.5 * sigma * sigma * nu;
            const double b = theta * nu;
            const double beta_max = (-b + std::sqrt(b * b + 4.0 * a)) / (2.0 * a);
            return 0.99 * beta_max - 1.0;
        }
        case ModelKind::CGMY:
            return 0.99 * (model.as_cgmy().M - 1.0);
    }
    return 1.5;
}

} // namespace

void FftConfig::validate() const {
    if (!is_power_of_two(n))
        throw std::domain_error("FftConfig: n must be a power of two");
    if (!(eta > 0.0)) throw std::domain_error("FftConfig: eta must be > 0");
}

void CosConfig::validate() const {
    if (n < 16) throw std::domain_error("CosConfig: n must be at least 16");
    if (!(L > 0.0)) throw std::domain_error("CosConfig: L must be > 0");
}

double bs_call(const MarketEnv& env, double K, double T, double sigma) {
    env.validate();
    if (!(K > 0.0 && T > 0.0 && sigma > 0.0))
        throw std::domain_error("bs_call: requires K, T, sigma > 0");
    const double fwd_spot = env.S0 * std::exp(-env.q * T);
    const double vol = sigma * std::sqrt(T);
    const double d_plus =
        (std::log(env.S0 / K) + (env.r - env.q + 0.5 * sigma * sigma) * T) / vol;
    const double d_minus = d_plus - vol;
    return fwd_spot * specfun::norm_cdf(d_plus) -
           K * std::exp(-env.r * T) * specfun::norm_cdf(d_minus);
}

double bs_put(const MarketEnv& env, double K, double T, double sigma) {
    return bs_call(env, K, T, sigma) - env.S0 * std::exp(-env.q * T) +
           K * std::exp(-env.r * T);
}

double vg_call_analytic(const MarketEnv& env, double K, double T,
                        const VgParams& params) {
    env.validate();
    if (!(K > 0.0 && T > 0.0))
        throw std::domain_error("vg_call_analytic: requires K, T > 0");
    if (!(params.sigma > 0.0 && params.nu > 0.0))
        throw std::domain_error("vg_call_analytic: requires sigma, nu > 0");
    const double alpha = -params.theta / params.sigma;
    const double a = (alpha + params.sigma) * (alpha + params.sigma);
    const double num = 1.0 - params.nu * a / 2.0;
    const double den = 1.0 - params.nu * alpha * alpha / 2.0;
    if (!(num > 0.0 && den > 0.0))
        throw std::domain_error(
            "vg_call_analytic: fractional power base must stay positive "
            "(1 - nu (alpha+sigma)^2 / 2 and 1 - nu alpha^2 / 2)");
    const double S = env.S0 * std::exp(-env.q * T);
    const double r = env.r;
    const double sqT = std::sqrt(T);
    const double d1 =
        std::log(S / K) / (params.sigma * sqT) +
        ((r + std::log(num / den) / params.nu) / params.sigma + alpha +
         params.sigma) *
            sqT;
    const double d2 = d1 - params.sigma * sqT;
    return S * std::exp(a * T / 2.0) * std::pow(num, T / params.nu) *
               specfun::norm_cdf(d1) -
           K * std::exp(-r * T + alpha * alpha * T / 2.0) *
               std::pow(den, T / params.nu) * specfun::norm_cdf(d2);
}

double optimal_damping(const ModelParams& model, const MarketEnv& env,
                       double K, double T, double eta) {
    model.validate();
    env.validate();
    const double alpha_max = max_damping(model);
    if (!(alpha_max > 0.0))
        throw std::domain_error(
            "optimal_damping: no admissible damping, E[S_T^(1+alpha)] "
            "diverges for every alpha > 0");
    double value = std::numeric_limits<double>::quiet_NaN();
    const double tau = T;
    if (model.kind() == ModelKind::BS) {
        const double sigma = model.as_bs().sigma;
        const double d_plus =
            (std::log(env.S0 / K) +
             (env.r + sigma * sigma / std::sqrt(2.0)) * tau) /
            (sigma * std::sqrt(tau));
        value = -d_plus / (eta * std::sqrt(tau));
    } else if (model.kind() == ModelKind::VG) {
        const auto& p = model.as_vg();
        const double omega = martingale_correction(model);
        const double f = std::log(env.S0) + (env.r - env.q) * tau;
        const double m = f - std::log(K) - omega * tau; // log-moneyness proxy
        const double s2 = p.sigma * p.sigma;
        if (m != 0.0) {
            const double sgn = (m > 0.0) ? 1.0 : -1.0;
            value = -p.theta / s2 - 1.0 + tau / (p.nu * m) -
                    sgn * std::sqrt(p.theta * p.theta / s2 +
                                    2.0 / (p.nu * s2) +
                                    tau * tau / (p.nu * p.nu * m * m));
        }
    }
    if (!std::isfinite(value) || value <= 0.0) value = 1.5;
    return std::min(value, alpha_max);
}

PriceStrip fft_price_strip(const ModelParams& model, const MarketEnv& env,
                           double T, const FftConfig& cfg) {
    model.validate();
    env.validate();
    cfg.validate();
    if (!(T > 0.0)) throw std::domain_error("fft_price_strip: T must be > 0");
    const int n = cfg.n;
    const double eta = cfg.eta;
    const double lambda = 2.0 * kPi / (n * eta);
    const double beta = std::log(env.S0) - 0.5 * n * lambda;
    const double alpha =
        cfg.alpha > 0.0
            ? cfg.alpha
            : optimal_damping(model, env, env.S0, T, eta); // at-the-money
    const double disc = std::exp(-env.r * T);

    std::vector<cplx> x(n);
    for (int j = 0; j < n; ++j) {
        const double vj = j * eta;
        double w;
        if (cfg.quadrature == Quadrature::Simpson) {
            w = (3.0 + ((j % 2 == 0) ? -1.0 : 1.0) - (j == 0 ? 1.0 : 0.0)) / 3.0;
        } else {
            w = (j == 0) ? 0.5 : 1.0;
        }
        cplx phi;
        try {
            phi = log_price_cf(model, env, cplx(vj, -(alpha + 1.0)), T);
        } catch (const std::overflow_error&) {
            throw std::runtime_error(
                "fft_price_strip: characteristic function overflow at "
                "frequency index " + std::to_string(j));
        }
        const cplx denom = (alpha + kI * vj) * (alpha + 1.0 + kI * vj);
        x[j] = eta * w * disc * phi / denom * std::exp(-kI * beta * vj);
        if (!std::isfinite(x[j].real()) || !std::isfinite(x[j].imag())) {
            throw std::runtime_error(
                "fft_price_strip: non-finite integrand at frequency index " +
                std::to_string(j));
        }
    }
    fft_forward(x);

    PriceStrip strip;
    strip.method = "fft";
    strip.strikes.resize(n);
    strip.premiums.resize(n);
    for (int m = 0; m < n; ++m) {
        const double km = beta + m * lambda;
        strip.strikes[m] = std::exp(km);
        strip.premiums[m] = std::exp(-alpha * km) * x[m].real() / kPi;
    }
    return strip;
}

double fft_price(const ModelParams& model, const MarketEnv& env, double K,
                 double T, const FftConfig& cfg) {
    if (!(K > 0.0)) throw std::domain_error("fft_price: K must be > 0");
    const PriceStrip strip = fft_price_strip(model, env, T, cfg);
    const double lambda = 2.0 * kPi / (cfg.n * cfg.eta);
    const double beta = std::log(env.S0) - 0.5 * cfg.n * lambda;
    const double lnK = std::log(K);
    const double pos = (lnK - beta) / lambda;
    const int lo = static_cast<int>(std::floor(pos));
    if (lo < 0 || lo + 1 >= cfg.n)
        throw std::domain_error("fft_price: strike outside the FFT grid");
    const double t = pos - lo;
    return (1.0 - t) * strip.premiums[lo] + t * strip.premiums[lo + 1];
}

std::pair<double, double> cos_truncation_range(const ModelParams& model,
                                               const MarketEnv& env, double T,
                                               double L) {
    const CumulantSet c = (model.kind() == ModelKind::VGSA)
                              ? cumulants_fd(model, env, T)
                              : cumulants(model, env, T);
    const double width = L * std::sqrt(c.c2 + std::sqrt(std::max(c.c4, 0.0)));
    const double a = c.c1 - width;
    const double b = c.c1 + width;
    if (!(a < 0.0 && b > 0.0))
        throw std::domain_error(
            "cos_truncation_range: interval [" + std::to_string(a) + ", " +
            std::to_string(b) +
            "] does not straddle 0; widen L so the payoff split is valid");
    return {a, b};
}

std::vector<double> cos_chi(int n, double a, double b, double c, double d) {
    std::vector<double> out(n);
    const double w = b - a;
    const double ec = std::exp(c), ed = std::exp(d);
    for (int k = 0; k < n; ++k) {
        const double f = k * kPi / w;
        const double cd = std::cos(f * (d - a)), sd = std::sin(f * (d - a));
        const double cc = std::cos(f * (c - a)), sc = std::sin(f * (c - a));
        out[k] = (cd * ed - cc * ec + f * (sd * ed - sc * ec)) / (1.0 + f * f);
    }
    return out;
}

std::vector<double> cos_psi(int n, double a, double b, double c, double d) {
    std::vector<double> out(n);
    const double w = b - a;
    out[0] = d - c;
    for (int k = 1; k < n; ++k) {
        const double f = k * kPi / w;
        out[k] = (std::sin(f * (d - a)) - std::sin(f * (c - a))) / f;
    }
    return out;
}

std::vector<double> cos_payoff_coeffs(OptionKind kind, double a, double b,
                                      double K, int n) {
    if (!(a < 0.0 && b > 0.0))
        throw std::domain_error("cos_payoff_coeffs: requires a < 0 < b");
    std::vector<double> out(n);
    const double scale = 2.0 / (b - a) * K;
    if (kind == OptionKind::Call) {
        const auto chi = cos_chi(n, a, b, 0.0, b);
        const auto psi = cos_psi(n, a, b, 0.0, b);
        for (int k = 0; k < n; ++k) out[k] = scale * (chi[k] - psi[k]);
    } else {
        const auto chi = cos_chi(n, a, b, a, 0.0);
        const auto psi = cos_psi(n, a, b, a, 0.0);
        for (int k = 0; k < n; ++k) out[k] = scale * (-chi[k] + psi[k]);
    }
    return out;
}

double cos_price(const ModelParams& model, const MarketEnv& env, double K,
                 double T, const CosConfig& cfg, OptionKind kind) {
    model.validate();
    env.validate();
    cfg.validate();
    if (!(K > 0.0 && T > 0.0))
        throw std::domain_error("cos_price: requires K, T > 0");
    const auto [a, b] = cos_truncation_range(model, env, T, cfg.L);
    const double x = std::log(env.S0 / K);
    if (std::fabs(x) > 0.8 * 0.5 * (b - a)) {
        throw std::runtime_error(
            "cos_price: strike too far out of the money for the truncation "
            "range (|ln(S0/K)| = " + std::to_string(std::fabs(x)) +
            " > 80% of half-width " + std::to_string(0.5 * (b - a)) + ")");
    }
    const auto v = cos_payoff_coeffs(kind, a, b, K, cfg.n);
    const double lnS0 = std::log(env.S0);
    const double w = b - a;
    double sum = 0.0;
    for (int k = 0; k < cfg.n; ++k) {
        const double u = k * kPi / w;
        // cf of the log return ln(S_T/S0)
        const cplx phi = log_price_cf(model, env, cplx(u, 0.0), T) *
                         std::exp(-kI * u * lnS0);
        const cplx term = phi * std::exp(kI * u * (x - a));
        sum += (k == 0 ? 0.5 : 1.0) * term.real() * v[k];
    }
    return std::exp(-env.r * T) * sum;
}

} // namespace levyq
