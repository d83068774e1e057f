#include "levyq/calib.hpp"

#include "levyq/parallel.hpp"
#include "levyq/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace levyq {

void OptionChain::validate() const {
    env.validate();
    if (quotes.empty()) throw std::domain_error("OptionChain: empty chain");
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        const auto& q = quotes[i];
        const std::string at = " (quote " + std::to_string(i) + ")";
        if (!(q.strike > 0.0))
            throw std::domain_error("OptionChain: strike must be > 0" + at);
        if (!(q.maturity > 0.0))
            throw std::domain_error("OptionChain: maturity must be > 0" + at);
        if (q.bid && q.ask && !(*q.bid <= *q.ask))
            throw std::domain_error("OptionChain: bid > ask" + at);
        if (q.bid && !(*q.bid <= q.mid))
            throw std::domain_error("OptionChain: bid > mid" + at);
        if (q.ask && !(q.mid <= *q.ask))
            throw std::domain_error("OptionChain: mid > ask" + at);
    }
}

double vega(const MarketEnv& env, double K, double T, double sigma,
            double eps) {
    env.validate();
    if (!(K > 0.0 && T > 0.0 && sigma > 0.0))
        throw std::domain_error("vega: requires K, T, sigma > 0");
    const double vol = sigma * std::sqrt(T);
    const double d_minus =
        (std::log(env.S0 / K) + (env.r - env.q - 0.5 * sigma * sigma) * T) /
        vol;
    const double v = std::fabs(K * std::exp(-env.r * T) *
                               specfun::norm_cdf(d_minus) * std::sqrt(T));
    return std::max(v, eps);
}

std::vector<double> vega_weights(const OptionChain& chain, double sigma,
                                 double eps) {
    chain.validate();
    std::vector<double> w(chain.quotes.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& q = chain.quotes[i];
        if (q.weight) {
            w[i] = *q.weight;
        } else {
            const double v = vega(chain.env, q.strike, q.maturity, sigma, eps);
            w[i] = 1.0 / (v * v);
        }
    }
    return w;
}

Pricer cos_pricer(const CosConfig& cfg) {
    return [cfg](const ModelParams& model, const MarketEnv& env, double K,
                 double T) { return cos_price(model, env, K, T, cfg); };
}

double weighted_sq_error(const ModelParams& model, const OptionChain& chain,
                         std::span<const double> weights,
                         const Pricer& pricer) {
    chain.validate();
    if (weights.size() != chain.quotes.size())
        throw std::domain_error(
            "weighted_sq_error: weights and quotes length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < chain.quotes.size(); ++i) {
        const auto& q = chain.quotes[i];
        double price;
        try {
            price = pricer(model, chain.env, q.strike, q.maturity);
        } catch (const std::exception& e) {
            throw std::runtime_error(
                "weighted_sq_error: pricer failed on quote " +
                std::to_string(i) + " (K=" + std::to_string(q.strike) +
                ", T=" + std::to_string(q.maturity) + "): " + e.what());
        }
        const double diff = q.mid - price;
        sum += weights[i] * diff * diff;
    }
    return sum;
}

double rmse(const ModelParams& model, const OptionChain& chain,
            const Pricer& pricer) {
    const std::vector<double> unit(chain.quotes.size(), 1.0);
    const double sq = weighted_sq_error(model, chain, unit, pricer);
    return std::sqrt(sq / static_cast<double>(chain.quotes.size()));
}

namespace {

void check_same_grid(const DiscreteLevyMeasure& q,
                     const DiscreteLevyMeasure& p) {
    if (q.x.size() != p.x.size())
        throw std::domain_error("relative_entropy: grids differ in size");
    for (std::size_t k = 0; k < q.x.size(); ++k) {
        if (std::fabs(q.x[k] - p.x[k]) > 1e-12)
            throw std::domain_error("relative_entropy: grids differ at index " +
                                    std::to_string(k));
    }
    if (std::fabs(q.diffusion - p.diffusion) > 1e-12)
        throw std::domain_error(
            "relative_entropy: diffusion coefficients differ");
}

} // namespace

EntropyTerms entropy_terms(const DiscreteLevyMeasure& q,
                           const DiscreteLevyMeasure& p) {
    check_same_grid(q, p);
    EntropyTerms out;
    for (std::size_t k = 0; k < q.x.size(); ++k) {
        const double qk = q.p[k], pk = p.p[k];
        if (qk > 0.0 && !(pk > 0.0))
            throw std::domain_error(
                "relative_entropy: absolute continuity violated at x = " +
                std::to_string(q.x[k]));
        if (qk > 0.0) {
            out.jump += qk * std::log(qk / pk) + pk - qk;
        } else {
            out.jump += pk; // 0 ln 0 := 0
        }
    }
    const double A = p.diffusion;
    if (A != 0.0) {
        double bracket = 0.5 * A + p.drift;
        for (std::size_t k = 0; k < q.x.size(); ++k)
            bracket += (std::exp(q.x[k]) - 1.0) * q.p[k];
        out.drift = bracket * bracket / (2.0 * A);
    }
    return out;
}

double relative_entropy(const DiscreteLevyMeasure& q,
                        const DiscreteLevyMeasure& p, double T) {
    if (!(T > 0.0)) throw std::domain_error("relative_entropy: T must be > 0");
    const EntropyTerms terms = entropy_terms(q, p);
    return T * (terms.drift + terms.jump);
}

namespace {

// VGSA has no Levy measure of its own; its entropy regularizer acts on the
// VG component only.
ModelParams entropy_component(const ModelParams& model) {
    if (model.kind() == ModelKind::VGSA) {
        const auto& p = model.as_vgsa();
        return ModelParams::vg(p.sigma, p.nu, p.theta);
    }
    return model;
}

double chain_horizon(const OptionChain& chain) {
    double t = 0.0;
    for (const auto& q : chain.quotes) t = std::max(t, q.maturity);
    return t;
}

} // namespace

double rmemc_objective(const ModelParams& model, const OptionChain& chain,
                       const ModelParams& prior, double alpha,
                       std::span<const double> grid,
                       std::span<const double> weights, const Pricer& pricer) {
    if (alpha < 0.0)
        throw std::domain_error("rmemc_objective: alpha must be >= 0");
    const double wsq = weighted_sq_error(model, chain, weights, pricer);
    if (alpha == 0.0) return wsq;
    const auto q = discretize_levy_measure(entropy_component(model), grid);
    const auto p = discretize_levy_measure(entropy_component(prior), grid);
    return wsq + alpha * relative_entropy(q, p, chain_horizon(chain));
}

double choose_alpha(const OptionChain& chain, const MarketEnv& env,
                    double scale_A, double sigma) {
    chain.validate();
    if (scale_A < 0.0)
        throw std::domain_error("choose_alpha: scale_A must be >= 0");
    if (scale_A == 0.0) return 0.0;
    std::vector<double> vegas;
    vegas.reserve(chain.quotes.size());
    for (const auto& q : chain.quotes)
        vegas.push_back(vega(env, q.strike, q.maturity, sigma));
    std::sort(vegas.begin(), vegas.end());
    const std::size_t n = vegas.size();
    const double median = (n % 2 == 1)
                              ? vegas[n / 2]
                              : 0.5 * (vegas[n / 2 - 1] + vegas[n / 2]);
    return scale_A * median;
}

NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::span<const double> x0,
                     std::span<const bool> positive_mask,
                     const NmOptions& opts) {
    const std::size_t dim = x0.size();
    if (dim == 0) throw std::domain_error("nelder_mead: empty start");
    if (positive_mask.size() != dim)
        throw std::domain_error("nelder_mead: mask length mismatch");
    for (std::size_t i = 0; i < dim; ++i) {
        if (positive_mask[i] && !(x0[i] > 0.0))
            throw std::domain_error(
                "nelder_mead: start coordinate " + std::to_string(i) +
                " must be positive for the log reparameterization");
    }
    auto to_z = [&](std::span<const double> x) {
        std::vector<double> z(dim);
        for (std::size_t i = 0; i < dim; ++i)
            z[i] = positive_mask[i] ? std::log(x[i]) : x[i];
        return z;
    };
    auto to_x = [&](std::span<const double> z) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i)
            x[i] = positive_mask[i] ? std::exp(z[i]) : z[i];
        return x;
    };
    auto eval = [&](std::span<const double> z) {
        const auto x = to_x(z);
        double v;
        try {
            v = f(x);
        } catch (const std::exception&) {
            return 1e300; // invalid region; the simplex moves away
        }
        if (std::isnan(v)) return 1e300;
        return v;
    };

    std::vector<std::vector<double>> verts(dim + 1, to_z(x0));
    for (std::size_t i = 0; i < dim; ++i) {
        // fminsearch-style initial displacement
        if (verts[i + 1][i] != 0.0)
            verts[i + 1][i] *= 1.05;
        else
            verts[i + 1][i] = 0.00025;
    }
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(verts[i]);
    if (!std::isfinite(f(to_x(verts[0]))))
        throw std::domain_error(
            "nelder_mead: objective not finite at the start point");

    NmResult result;
    const double refl = 1.0, expa = 2.0, contr = 0.5, shrink = 0.5;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        // order vertices by objective
        std::vector<std::size_t> idx(dim + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> vs(dim + 1);
            std::vector<double> fs(dim + 1);
            for (std::size_t i = 0; i <= dim; ++i) {
                vs[i] = verts[idx[i]];
                fs[i] = fv[idx[i]];
            }
            verts.swap(vs);
            fv.swap(fs);
        }
        result.trace.push_back(fv[0]);

        double spread_f = 0.0, spread_x = 0.0;
        for (std::size_t i = 1; i <= dim; ++i) {
            spread_f = std::max(spread_f, std::fabs(fv[i] - fv[0]));
            for (std::size_t j = 0; j < dim; ++j)
                spread_x = std::max(spread_x,
                                    std::fabs(verts[i][j] - verts[0][j]));
        }
        if (spread_x <= opts.tol && spread_f <= opts.tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                centroid[j] += verts[i][j] / static_cast<double>(dim);

        auto affine = [&](double t) {
            std::vector<double> p(dim);
            for (std::size_t j = 0; j < dim; ++j)
                p[j] = centroid[j] + t * (centroid[j] - verts[dim][j]);
            return p;
        };

        const auto xr = affine(refl);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            const auto xe = affine(expa);
            const double fe = eval(xe);
            if (fe < fr) {
                verts[dim] = xe;
                fv[dim] = fe;
            } else {
                verts[dim] = xr;
                fv[dim] = fr;
            }
        } else if (fr < fv[dim - 1]) {
            verts[dim] = xr;
            fv[dim] = fr;
        } else {
            if (fr < fv[dim]) {
                const auto xc = affine(contr);
                const double fc = eval(xc);
                if (fc <= fr) {
                    verts[dim] = xc;
                    fv[dim] = fc;
                    continue;
                }
            } else {
                std::vector<double> xc(dim);
                for (std::size_t j = 0; j < dim; ++j)
                    xc[j] = centroid[j] - contr * (centroid[j] - verts[dim][j]);
                const double fc = eval(xc);
                if (fc < fv[dim]) {
                    verts[dim] = xc;
                    fv[dim] = fc;
                    continue;
                }
            }
            for (std::size_t i = 1; i <= dim; ++i) {
                for (std::size_t j = 0; j < dim; ++j)
                    verts[i][j] =
                        verts[0][j] + shrink * (verts[i][j] - verts[0][j]);
                fv[i] = eval(verts[i]);
            }
        }
    }
    result.iterations = iter;
    result.x = to_x(verts[0]);
    result.fx = fv[0];
    return result;
}

ModelParams model_from_vector(ModelKind family, std::span<const double> x) {
    switch (family) {
        case ModelKind::BS:
            if (x.size() != 1) break;
            return ModelParams::bs(x[0]);
        case ModelKind::VG:
            if (x.size() != 3) break;
            return ModelParams::vg(x[0], x[1], x[2]);
        case ModelKind::VGSA:
            if (x.size() != 6) break;
            return ModelParams::vgsa(x[0], x[1], x[2], x[3], x[4], x[5]);
        case ModelKind::CGMY:
            if (x.size() != 4) break;
            return ModelParams::cgmy(x[0], x[1], x[2], x[3]);
    }
    throw std::domain_error("model_from_vector: wrong vector length for " +
                            to_string(family));
}

std::vector<double> vector_from_model(const ModelParams& model) {
    switch (model.kind()) {
        case ModelKind::BS:
            return {model.as_bs().sigma};
        case ModelKind::VG: {
            const auto& p = model.as_vg();
            return {p.sigma, p.nu, p.theta};
        }
        case ModelKind::VGSA: {
            const auto& p = model.as_vgsa();
            return {p.sigma, p.nu, p.theta, p.kappa, p.eta, p.lambda};
        }
        case ModelKind::CGMY: {
            const auto& p = model.as_cgmy();
            return {p.C, p.G, p.M, p.Y};
        }
    }
    throw std::domain_error("vector_from_model: unknown model");
}

std::vector<bool> positivity_mask(ModelKind family) {
    switch (family) {
        case ModelKind::BS: return {true};
        case ModelKind::VG: return {true, true, false};
        case ModelKind::VGSA:
            return {true, true, false, true, true, true};
        case ModelKind::CGMY: return {true, true, true, false};
    }
    throw std::domain_error("positivity_mask: unknown family");
}

CalibrationResult multistart_calibrate(
    const CalibSetup& setup, const std::vector<std::vector<double>>& starts) {
    if (starts.empty())
        throw std::domain_error("multistart_calibrate: empty start grid");
    setup.chain.validate();
    if (setup.alpha > 0.0 && !setup.prior)
        throw std::domain_error(
            "multistart_calibrate: alpha > 0 requires a prior model");

    const Pricer pricer = setup.pricer ? setup.pricer : cos_pricer();
    const std::vector<double> weights =
        setup.weights.empty()
            ? std::vector<double>(setup.chain.quotes.size(), 1.0)
            : setup.weights;
    const std::vector<double> grid =
        setup.grid.empty() ? default_levy_grid() : setup.grid;
    const auto mask = positivity_mask(setup.family);

    std::optional<DiscreteLevyMeasure> prior_measure;
    if (setup.alpha > 0.0) {
        prior_measure =
            discretize_levy_measure(entropy_component(*setup.prior), grid);
    }
    const double horizon = chain_horizon(setup.chain);

    auto objective = [&](std::span<const double> x) {
        const ModelParams model = model_from_vector(setup.family, x);
        double value = weighted_sq_error(model, setup.chain, weights, pricer);
        if (setup.alpha > 0.0) {
            const auto q =
                discretize_levy_measure(entropy_component(model), grid);
            value += setup.alpha *
                     relative_entropy(q, *prior_measure, horizon);
        }
        return value;
    };

    struct StartOutcome {
        bool ok = false;
        std::string error;
        NmResult nm;
    };
    std::vector<StartOutcome> outcomes(starts.size());
    parallel_for(static_cast<std::int64_t>(starts.size()),
                 [&](std::int64_t lo, std::int64_t hi) {
                     for (std::int64_t i = lo; i < hi; ++i) {
                         try {
                             outcomes[i].nm = nelder_mead(objective, starts[i],
                                                          mask, setup.nm);
                             outcomes[i].ok = true;
                         } catch (const std::exception& e) {
                             outcomes[i].error = e.what();
                         }
                     }
                 });

    int best = -1;
    double best_entropy = 0.0;
    auto entropy_of = [&](const NmResult& nm) {
        if (setup.alpha <= 0.0) return 0.0;
        const ModelParams m = model_from_vector(setup.family, nm.x);
        const auto q = discretize_levy_measure(entropy_component(m), grid);
        return relative_entropy(q, *prior_measure, horizon);
    };
    std::vector<double> entropies(starts.size(), 0.0);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].ok || !std::isfinite(outcomes[i].nm.fx)) continue;
        entropies[i] = entropy_of(outcomes[i].nm);
        if (best < 0) {
            best = static_cast<int>(i);
            best_entropy = entropies[i];
            continue;
        }
        const auto& cur = outcomes[i].nm;
        const auto& champ = outcomes[best].nm;
        if (cur.fx < champ.fx ||
            (cur.fx == champ.fx && (entropies[i] < best_entropy))) {
            best = static_cast<int>(i);
            best_entropy = entropies[i];
        }
    }
    if (best < 0) {
        std::string detail = "multistart_calibrate: all starts failed:";
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            detail += "\n  start " + std::to_string(i) + ": " +
                      (outcomes[i].error.empty() ? "non-finite objective"
                                                 : outcomes[i].error);
        throw std::runtime_error(detail);
    }

    const auto& nm = outcomes[best].nm;
    CalibrationResult out;
    out.params = model_from_vector(setup.family, nm.x);
    out.weighted_sq =
        weighted_sq_error(out.params, setup.chain, weights, pricer);
    out.entropy = entropies[best];
    out.alpha = setup.alpha;
    out.objective = out.weighted_sq + setup.alpha * out.entropy;
    out.rmse = rmse(out.params, setup.chain, pricer);
    out.iterations = nm.iterations;
    out.start_id = best;
    out.converged = nm.converged;
    return out;
}

} // namespace levyq
