#include "levyq/mc.hpp"

#include "levyq/parallel.hpp"
#include "levyq/specfun.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace levyq {

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* cap = std::getenv("LEVYQ_THREADS")) {
        const int c = std::atoi(cap);
        if (c > 0 && c < n) n = c;
    }
    return n;
}

void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const int workers = worker_count();
    if (workers == 1 || n < 128) {
        fn(0, n);
        return;
    }
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

void McConfig::validate() const {
    if (num_paths < 2)
        throw std::domain_error("McConfig: num_paths must be at least 2");
    if (steps < 1) throw std::domain_error("McConfig: steps must be >= 1");
    if (antithetic && num_paths % 2 != 0)
        throw std::domain_error(
            "McConfig: antithetic pairing needs an even num_paths");
    if (!(cgmy_epsilon > 0.0 && cgmy_epsilon <= 1e-2))
        throw std::domain_error("McConfig: cgmy_epsilon must be in (0, 1e-2]");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct AtomicStats {
    std::atomic<std::int64_t> cir_floor{0};
    std::atomic<std::int64_t> clamps{0};
    std::atomic<std::int64_t> proposals{0};

    void flush(McStats* out) const {
        if (!out) return;
        out->cir_floor_events += cir_floor.load();
        out->acceptance_clamps += clamps.load();
        out->acceptance_proposals += proposals.load();
    }
};

// One leg pair of terminal log prices. sign = +1 / -1 selects the Gaussian
// orientation; all other draws come premade from the shared step data.
struct VgStepDraws {
    double z;
    double g;
};

// ---- VG --------------------------------------------------------------

double vg_terminal_from_draws(const MarketEnv& env, const VgParams& p, double T,
                              int steps, std::span<const VgStepDraws> draws,
                              double omega, double sign) {
    const double h = T / steps;
    double lnS = std::log(env.S0);
    const double drift = (env.r - env.q + omega) * h;
    for (int i = 0; i < steps; ++i) {
        const double g = draws[i].g;
        lnS += drift + p.theta * g +
               p.sigma * std::sqrt(g) * (sign * draws[i].z);
    }
    return lnS;
}

void vg_fill_draws(Rng& rng, const VgParams& p, double h,
                   std::span<VgStepDraws> out) {
    for (auto& d : out) {
        d.z = rng.normal();
        d.g = rng.gamma(h / p.nu, p.nu);
    }
}

// ---- VGSA ------------------------------------------------------------

// Per-step martingale corrections, identical across paths:
// dw_j = ln E[e^Z(t_j)] - ln E[e^Z(t_{j+1})].
std::vector<double> vgsa_step_corrections(const ModelParams& model, double T,
                                          int steps) {
    std::vector<double> logphi(steps + 1, 0.0);
    for (int j = 1; j <= steps; ++j) {
        const cplx v = characteristic_function(model, cplx(0.0, -1.0),
                                               T * j / steps);
        logphi[j] = std::log(v.real());
    }
    std::vector<double> dw(steps);
    for (int j = 0; j < steps; ++j) dw[j] = logphi[j] - logphi[j + 1];
    return dw;
}

struct VgsaStepDraws {
    double z_clock;
    double z_diff;
};

// The clock Gaussians are shared between antithetic legs (the gamma draws
// depend on the realized clock, so only the diffusion Gaussian is negated);
// gamma sampling happens inline because its shape follows the clock.
double vgsa_terminal_from_clock(Rng& gamma_rng, const MarketEnv& env,
                                const VgsaParams& p, double T, int steps,
                                std::span<const VgsaStepDraws> draws,
                                std::span<const double> dw, double sign,
                                AtomicStats* stats) {
    const double h = T / steps;
    double lnS = std::log(env.S0);
    double y = 1.0; // unit initial clock rate
    std::int64_t floors = 0;
    for (int j = 0; j < steps; ++j) {
        const double zc = draws[j].z_clock;
        double ynext = y + p.kappa * (p.eta - y) * h +
                       p.lambda * std::sqrt(y * h) * zc +
                       0.25 * p.lambda * p.lambda * h * (zc * zc - 1.0);
        if (ynext < 0.0) {
            ynext = 0.0;
            ++floors;
        }
        const double tau = 0.5 * h * (y + ynext); // trapezoidal clock increment
        y = ynext;
        const double g = gamma_rng.gamma(tau / p.nu, p.nu);
        lnS += (env.r - env.q) * h + dw[j] + p.theta * g +
               p.sigma * std::sqrt(g) * (sign * draws[j].z_diff);
    }
    if (stats && floors) stats->cir_floor.fetch_add(floors);
    return lnS;
}

// ---- CGMY ------------------------------------------------------------

struct CgmyJump {
    double time;
    double size; // accepted jumps only
};

// Simulates the truncated stable subordinator with Rosinski thinning.
// Returns accepted jumps in time order; H(t) = d*t + sum of accepted sizes.
std::vector<CgmyJump> cgmy_jumps(Rng& rng, const CgmyParams& p, double T,
                                 double epsilon, double rate,
                                 AtomicStats* stats) {
    const double B = 0.5 * (p.G + p.M);
    std::vector<CgmyJump> jumps;
    double t = rng.exponential(rate);
    std::int64_t proposals = 0, clamps = 0;
    while (t < T) {
        const double u = rng.uniform();
        const double y = epsilon / std::pow(1.0 - u, 2.0 / p.Y);
        const double u3 = rng.uniform();
        ++proposals;
        McStats local;
        const double acc = cgmy_acceptance(y, p.Y, B, &local);
        clamps += local.acceptance_clamps;
        if (acc > u3) jumps.push_back({t, y});
        t += rng.exponential(rate);
    }
    if (stats) {
        stats->proposals.fetch_add(proposals);
        stats->clamps.fetch_add(clamps);
    }
    return jumps;
}

} // namespace

double cgmy_acceptance(double y, double Y, double B, McStats* stats) {
    if (!(y > 0.0)) throw std::domain_error("cgmy_acceptance: y must be > 0");
    if (!(Y > 0.0 && Y < 2.0))
        throw std::domain_error("cgmy_acceptance: Y must be in (0, 2)");
    if (!(B > 0.0)) throw std::domain_error("cgmy_acceptance: B must be > 0");
    // h(y) = e^{-B^2 y/2} Gamma((Y+1)/2)/(Gamma(Y) sqrt(pi)) 2^Y
    //        (B^2 y/2)^{Y/2} I(Y, B^2 y, B^2 y/2)
    // with I(Y,a,l) = (2l)^{-Y/2} Gamma(Y) e^{a^2/(8l)} D_{-Y}(a/sqrt(2l)).
    // The exponent of (2l) follows the reference loop, not the displayed
    // formula: only the -Y/2 orientation keeps h inside [0,1]. Collapsing the
    // cancelling factors (Gamma(Y), powers of B^2 y, the exponentials) leaves
    //   h(y) = e^{-z^2/4} Gamma((Y+1)/2)/sqrt(pi) 2^{Y/2} D_{-Y}(z),
    // z = B sqrt(y), which cannot overflow for large jumps.
    const double z = B * std::sqrt(y);
    const double prefactor = specfun::gamma(0.5 * (Y + 1.0)) / std::sqrt(kPi) *
                             std::pow(2.0, 0.5 * Y);
    const double d = specfun::parabolic_cylinder_d(-Y, z);
    double raw = std::exp(-0.25 * z * z) * prefactor * d;
    if (stats) ++stats->acceptance_proposals;
    if (!std::isfinite(raw) || raw < 0.0 || raw > 1.0) {
        if (stats) ++stats->acceptance_clamps;
        if (!std::isfinite(raw)) return 0.0;
        raw = std::min(1.0, std::max(0.0, raw));
    }
    return raw;
}

namespace {

// Path-indexed generation: with antithetic pairing, work unit i covers the
// adjacent pair (2i, 2i+1); without, one path each.
template <typename Fn>
void generate_units(const McConfig& cfg, std::int64_t units, Fn&& fn) {
    parallel_for(units, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(i));
            fn(i, rng);
        }
    });
}

std::vector<double> terminal_bs(const MarketEnv& env, const BsParams& p,
                                double T, const McConfig& cfg) {
    std::vector<double> out(cfg.num_paths);
    const double h = T / cfg.steps;
    const double drift = (env.r - env.q - 0.5 * p.sigma * p.sigma) * h;
    const double vol = p.sigma * std::sqrt(h);
    const double lnS0 = std::log(env.S0);
    if (cfg.antithetic) {
        generate_units(cfg, cfg.num_paths / 2, [&](std::int64_t i, Rng& rng) {
            double a = lnS0, b = lnS0;
            for (int s = 0; s < cfg.steps; ++s) {
                const double z = rng.normal();
                a += drift + vol * z;
                b += drift - vol * z;
            }
            out[2 * i] = a;
            out[2 * i + 1] = b;
        });
    } else {
        generate_units(cfg, cfg.num_paths, [&](std::int64_t i, Rng& rng) {
            double a = lnS0;
            for (int s = 0; s < cfg.steps; ++s)
                a += drift + vol * rng.normal();
            out[i] = a;
        });
    }
    return out;
}

std::vector<double> terminal_vg(const MarketEnv& env, const VgParams& p,
                                double T, const McConfig& cfg) {
    std::vector<double> out(cfg.num_paths);
    const ModelParams model = ModelParams::vg(p.sigma, p.nu, p.theta);
    const double omega = martingale_correction(model);
    const double h = T / cfg.steps;
    if (cfg.antithetic) {
        generate_units(cfg, cfg.num_paths / 2, [&](std::int64_t i, Rng& rng) {
            std::vector<VgStepDraws> draws(cfg.steps);
            vg_fill_draws(rng, p, h, draws);
            out[2 * i] = vg_terminal_from_draws(env, p, T, cfg.steps, draws,
                                                omega, +1.0);
            out[2 * i + 1] = vg_terminal_from_draws(env, p, T, cfg.steps, draws,
                                                    omega, -1.0);
        });
    } else {
        generate_units(cfg, cfg.num_paths, [&](std::int64_t i, Rng& rng) {
            std::vector<VgStepDraws> draws(cfg.steps);
            vg_fill_draws(rng, p, h, draws);
            out[i] = vg_terminal_from_draws(env, p, T, cfg.steps, draws, omega,
                                            +1.0);
        });
    }
    return out;
}

std::vector<double> terminal_vgsa(const MarketEnv& env, const VgsaParams& p,
                                  double T, const McConfig& cfg,
                                  AtomicStats* stats) {
    std::vector<double> out(cfg.num_paths);
    const ModelParams model =
        ModelParams::vgsa(p.sigma, p.nu, p.theta, p.kappa, p.eta, p.lambda);
    const auto dw = vgsa_step_corrections(model, T, cfg.steps);
    if (cfg.antithetic) {
        generate_units(cfg, cfg.num_paths / 2, [&](std::int64_t i, Rng& rng) {
            std::vector<VgsaStepDraws> draws(cfg.steps);
            for (auto& d : draws) {
                d.z_clock = rng.normal();
                d.z_diff = rng.normal();
            }
            // Both legs replay the same clock and gamma stream.
            Rng gamma_a = Rng::substream(cfg.seed ^ 0x5bd1e995u,
                                         static_cast<std::uint64_t>(i));
            Rng gamma_b = gamma_a;
            out[2 * i] = vgsa_terminal_from_clock(gamma_a, env, p, T, cfg.steps,
                                                  draws, dw, +1.0, stats);
            out[2 * i + 1] = vgsa_terminal_from_clock(
                gamma_b, env, p, T, cfg.steps, draws, dw, -1.0, nullptr);
        });
    } else {
        generate_units(cfg, cfg.num_paths, [&](std::int64_t i, Rng& rng) {
            std::vector<VgsaStepDraws> draws(cfg.steps);
            for (auto& d : draws) {
                d.z_clock = rng.normal();
                d.z_diff = rng.normal();
            }
            Rng gamma_rng = Rng::substream(cfg.seed ^ 0x5bd1e995u,
                                           static_cast<std::uint64_t>(i));
            out[i] = vgsa_terminal_from_clock(gamma_rng, env, p, T, cfg.steps,
                                              draws, dw, +1.0, stats);
        });
    }
    return out;
}

std::vector<double> terminal_cgmy(const MarketEnv& env, const CgmyParams& p,
                                  double T, const McConfig& cfg,
                                  AtomicStats* stats) {
    if (!(p.Y > 0.0 && p.Y < 2.0))
        throw std::domain_error(
            "simulate_cgmy: the stable subordinator representation needs "
            "0 < Y < 2");
    const ModelParams model = ModelParams::cgmy(p.C, p.G, p.M, p.Y);
    const double w = martingale_correction(model);
    const double eps = cfg.cgmy_epsilon;
    const double d_drift = std::pow(eps, 1.0 - 0.5 * p.Y) / (1.0 - 0.5 * p.Y);
    const double rate = 2.0 / (p.Y * std::pow(eps, 0.5 * p.Y));
    if (rate * T > cfg.max_expected_jumps) {
        throw std::runtime_error(
            "simulate_cgmy: expected jump count " + std::to_string(rate * T) +
            " exceeds the configured budget " +
            std::to_string(cfg.max_expected_jumps));
    }
    const double A = 0.5 * (p.G - p.M);
    const double lnS0 = std::log(env.S0);
    const double drift_T = (env.r - env.q + w) * T;
    std::vector<double> out(cfg.num_paths);
    auto one_pair = [&](std::int64_t i, Rng& rng, bool pair) {
        const auto jumps = cgmy_jumps(rng, p, T, eps, rate, stats);
        double H = d_drift * T;
        for (const auto& j : jumps) H += j.size;
        const double z = rng.normal();
        const double base = lnS0 + drift_T + A * H;
        const double diff = std::sqrt(H) * z;
        if (pair) {
            out[2 * i] = base + diff;
            out[2 * i + 1] = base - diff;
        } else {
            out[i] = base + diff;
        }
    };
    if (cfg.antithetic) {
        generate_units(cfg, cfg.num_paths / 2,
                       [&](std::int64_t i, Rng& rng) { one_pair(i, rng, true); });
    } else {
        generate_units(cfg, cfg.num_paths,
                       [&](std::int64_t i, Rng& rng) { one_pair(i, rng, false); });
    }
    return out;
}

} // namespace

std::vector<double> mc_terminal_log_prices(const ModelParams& model,
                                           const MarketEnv& env, double T,
                                           const McConfig& cfg,
                                           McStats* stats) {
    model.validate();
    env.validate();
    cfg.validate();
    if (!(T > 0.0))
        throw std::domain_error("mc_terminal_log_prices: T must be > 0");
    AtomicStats atomic;
    std::vector<double> out;
    switch (model.kind()) {
        case ModelKind::BS:
            out = terminal_bs(env, model.as_bs(), T, cfg);
            break;
        case ModelKind::VG:
            out = terminal_vg(env, model.as_vg(), T, cfg);
            break;
        case ModelKind::VGSA:
            out = terminal_vgsa(env, model.as_vgsa(), T, cfg, &atomic);
            break;
        case ModelKind::CGMY:
            out = terminal_cgmy(env, model.as_cgmy(), T, cfg, &atomic);
            break;
    }
    atomic.flush(stats);
    return out;
}

namespace {

std::vector<double> path_times(double T, int steps) {
    std::vector<double> t(steps + 1);
    for (int i = 0; i <= steps; ++i) t[i] = T * i / steps;
    return t;
}

} // namespace

std::vector<PricePath> simulate_vg(const MarketEnv& env, const VgParams& params,
                                   double T, const McConfig& cfg) {
    env.validate();
    cfg.validate();
    const ModelParams model = ModelParams::vg(params.sigma, params.nu,
                                              params.theta);
    model.validate();
    const double omega = martingale_correction(model);
    const double h = T / cfg.steps;
    const auto times = path_times(T, cfg.steps);
    std::vector<PricePath> paths(cfg.num_paths);
    auto build = [&](std::int64_t slot, std::span<const VgStepDraws> draws,
                     double sign) {
        PricePath& path = paths[slot];
        path.times = times;
        path.log_prices.resize(cfg.steps + 1);
        path.log_prices[0] = std::log(env.S0);
        double lnS = path.log_prices[0];
        for (int s = 0; s < cfg.steps; ++s) {
            const double g = draws[s].g;
            lnS += (env.r - env.q + omega) * h + params.theta * g +
                   params.sigma * std::sqrt(g) * (sign * draws[s].z);
            path.log_prices[s + 1] = lnS;
        }
    };
    if (cfg.antithetic) {
        generate_units(cfg, cfg.num_paths / 2, [&](std::int64_t i, Rng& rng) {
            std::vector<VgStepDraws> draws(cfg.steps);
            vg_fill_draws(rng, params, h, draws);
            build(2 * i, draws, +1.0);
            build(2 * i + 1, draws, -1.0);
        });
    } else {
        generate_units(cfg, cfg.num_paths, [&](std::int64_t i, Rng& rng) {
            std::vector<VgStepDraws> draws(cfg.steps);
            vg_fill_draws(rng, params, h, draws);
            build(i, draws, +1.0);
        });
    }
    return paths;
}

std::vector<PricePath> simulate_vgsa(const MarketEnv& env,
                                     const VgsaParams& params, double T,
                                     const McConfig& cfg, McStats* stats) {
    env.validate();
    cfg.validate();
    const ModelParams model = ModelParams::vgsa(
        params.sigma, params.nu, params.theta, params.kappa, params.eta,
        params.lambda);
    model.validate();
    const auto dw = vgsa_step_corrections(model, T, cfg.steps);
    const double h = T / cfg.steps;
    const auto times = path_times(T, cfg.steps);
    AtomicStats atomic;
    std::vector<PricePath> paths(cfg.num_paths);
    auto build = [&](std::int64_t slot, Rng gamma_rng,
                     std::span<const VgsaStepDraws> draws, double sign,
                     bool count) {
        PricePath& path = paths[slot];
        path.times = times;
        path.log_prices.resize(cfg.steps + 1);
        path.log_prices[0] = std::log(env.S0);
        double lnS = path.log_prices[0];
        double y = 1.0;
        std::int64_t floors = 0;
        for (int j = 0; j < cfg.steps; ++j) {
            const double zc = draws[j].z_clock;
            double ynext = y + params.kappa * (params.eta - y) * h +
                           params.lambda * std::sqrt(y * h) * zc +
                           0.25 * params.lambda * params.lambda * h *
                               (zc * zc - 1.0);
            if (ynext < 0.0) {
                ynext = 0.0;
                ++floors;
            }
            const double tau = 0.5 * h * (y + ynext);
            y = ynext;
            const double g = gamma_rng.gamma(tau / params.nu, params.nu);
            lnS += (env.r - env.q) * h + dw[j] + params.theta * g +
                   params.sigma * std::sqrt(g) * (sign * draws[j].z_diff);
            path.log_prices[j + 1] = lnS;
        }
        if (count && floors) atomic.cir_floor.fetch_add(floors);
    };
    const std::int64_t units = cfg.antithetic ? cfg.num_paths / 2 : cfg.num_paths;
    generate_units(cfg, units, [&](std::int64_t i, Rng& rng) {
        std::vector<VgsaStepDraws> draws(cfg.steps);
        for (auto& d : draws) {
            d.z_clock = rng.normal();
            d.z_diff = rng.normal();
        }
        Rng gamma_rng = Rng::substream(cfg.seed ^ 0x5bd1e995u,
                                       static_cast<std::uint64_t>(i));
        if (cfg.antithetic) {
            build(2 * i, gamma_rng, draws, +1.0, true);
            build(2 * i + 1, gamma_rng, draws, -1.0, false);
        } else {
            build(i, gamma_rng, draws, +1.0, true);
        }
    });
    atomic.flush(stats);
    return paths;
}

std::vector<PricePath> simulate_cgmy(const MarketEnv& env,
                                     const CgmyParams& params, double T,
                                     const McConfig& cfg, McStats* stats) {
    env.validate();
    cfg.validate();
    const ModelParams model = ModelParams::cgmy(params.C, params.G, params.M,
                                                params.Y);
    model.validate();
    if (!(params.Y > 0.0 && params.Y < 2.0))
        throw std::domain_error(
            "simulate_cgmy: the stable subordinator representation needs "
            "0 < Y < 2");
    const double w = martingale_correction(model);
    const double eps = cfg.cgmy_epsilon;
    const double d_drift =
        std::pow(eps, 1.0 - 0.5 * params.Y) / (1.0 - 0.5 * params.Y);
    const double rate = 2.0 / (params.Y * std::pow(eps, 0.5 * params.Y));
    if (rate * T > cfg.max_expected_jumps) {
        throw std::runtime_error(
            "simulate_cgmy: expected jump count " + std::to_string(rate * T) +
            " exceeds the configured budget " +
            std::to_string(cfg.max_expected_jumps));
    }
    const double A = 0.5 * (params.G - params.M);
    const auto times = path_times(T, cfg.steps);
    AtomicStats atomic;
    std::vector<PricePath> paths(cfg.num_paths);
    auto build = [&](std::int64_t slot, std::span<const double> H_grid,
                     std::span<const double> z, double sign) {
        PricePath& path = paths[slot];
        path.times = times;
        path.log_prices.resize(cfg.steps + 1);
        path.log_prices[0] = std::log(env.S0);
        double wiener = 0.0;
        for (int s = 1; s <= cfg.steps; ++s) {
            const double dH = H_grid[s] - H_grid[s - 1];
            wiener += std::sqrt(dH) * (sign * z[s - 1]);
            path.log_prices[s] = path.log_prices[0] +
                                 (env.r - env.q + w) * times[s] +
                                 A * H_grid[s] + wiener;
        }
    };
    const std::int64_t units = cfg.antithetic ? cfg.num_paths / 2 : cfg.num_paths;
    generate_units(cfg, units, [&](std::int64_t i, Rng& rng) {
        const auto jumps = cgmy_jumps(rng, params, T, eps, rate, &atomic);
        std::vector<double> H(cfg.steps + 1, 0.0);
        std::size_t jidx = 0;
        double accum = 0.0;
        for (int s = 1; s <= cfg.steps; ++s) {
            while (jidx < jumps.size() && jumps[jidx].time < times[s]) {
                accum += jumps[jidx].size;
                ++jidx;
            }
            H[s] = d_drift * times[s] + accum;
        }
        std::vector<double> z(cfg.steps);
        for (auto& v : z) v = rng.normal();
        if (cfg.antithetic) {
            build(2 * i, H, z, +1.0);
            build(2 * i + 1, H, z, -1.0);
        } else {
            build(i, H, z, +1.0);
        }
    });
    atomic.flush(stats);
    return paths;
}

std::vector<PricePath> simulate_paths(const ModelParams& model,
                                      const MarketEnv& env, double T,
                                      const McConfig& cfg, McStats* stats) {
    model.validate();
    switch (model.kind()) {
        case ModelKind::BS: {
            // exact GBM increments
            env.validate();
            cfg.validate();
            const double sigma = model.as_bs().sigma;
            const double h = T / cfg.steps;
            const double drift = (env.r - env.q - 0.5 * sigma * sigma) * h;
            const double vol = sigma * std::sqrt(h);
            const auto times = path_times(T, cfg.steps);
            std::vector<PricePath> paths(cfg.num_paths);
            auto build = [&](std::int64_t slot, std::span<const double> z,
                             double sign) {
                PricePath& path = paths[slot];
                path.times = times;
                path.log_prices.resize(cfg.steps + 1);
                path.log_prices[0] = std::log(env.S0);
                for (int s = 0; s < cfg.steps; ++s)
                    path.log_prices[s + 1] =
                        path.log_prices[s] + drift + vol * sign * z[s];
            };
            const std::int64_t units =
                cfg.antithetic ? cfg.num_paths / 2 : cfg.num_paths;
            generate_units(cfg, units, [&](std::int64_t i, Rng& rng) {
                std::vector<double> z(cfg.steps);
                for (auto& v : z) v = rng.normal();
                if (cfg.antithetic) {
                    build(2 * i, z, +1.0);
                    build(2 * i + 1, z, -1.0);
                } else {
                    build(i, z, +1.0);
                }
            });
            return paths;
        }
        case ModelKind::VG:
            return simulate_vg(env, model.as_vg(), T, cfg);
        case ModelKind::VGSA:
            return simulate_vgsa(env, model.as_vgsa(), T, cfg, stats);
        case ModelKind::CGMY:
            return simulate_cgmy(env, model.as_cgmy(), T, cfg, stats);
    }
    throw std::domain_error("simulate_paths: unknown model");
}

McPrice mc_price(std::span<const double> terminal_log_prices, OptionKind kind,
                 double K, const MarketEnv& env, double T, bool antithetic) {
    const std::size_t n = terminal_log_prices.size();
    if (n < 2) throw std::domain_error("mc_price: need at least 2 paths");
    if (antithetic && n % 2 != 0)
        throw std::domain_error("mc_price: antithetic needs an even count");
    if (K < 0.0) throw std::domain_error("mc_price: K must be >= 0");
    auto payoff = [&](double lnS) {
        const double s = std::exp(lnS);
        return (kind == OptionKind::Call) ? std::max(s - K, 0.0)
                                          : std::max(K - s, 0.0);
    };
    const std::size_t samples = antithetic ? n / 2 : n;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double v;
        if (antithetic) {
            v = 0.5 * (payoff(terminal_log_prices[2 * i]) +
                       payoff(terminal_log_prices[2 * i + 1]));
        } else {
            v = payoff(terminal_log_prices[i]);
        }
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double disc = std::exp(-env.r * T);
    McPrice out;
    out.num_paths_effective = static_cast<std::int64_t>(samples);
    out.premium = disc * mean;
    if (samples > 1) {
        const double var = m2 / static_cast<double>(samples - 1);
        out.standard_error =
            disc * std::sqrt(var / static_cast<double>(samples));
    }
    return out;
}

McPrice mc_price(const std::vector<PricePath>& paths, OptionKind kind,
                 double K, const MarketEnv& env, double T, bool antithetic) {
    std::vector<double> terminals(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (paths[i].log_prices.empty())
            throw std::domain_error("mc_price: empty path");
        terminals[i] = paths[i].log_prices.back();
    }
    return mc_price(terminals, kind, K, env, T, antithetic);
}

} // namespace levyq
