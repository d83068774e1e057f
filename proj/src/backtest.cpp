#include "levyq/backtest.hpp"

#include <cmath>
#include <stdexcept>

namespace levyq {

std::vector<double> strike_strip(double S0, int count, double span) {
    if (count < 2) throw std::domain_error("strike_strip: count must be >= 2");
    std::vector<double> strikes(count);
    const double lo = S0 * (1.0 - span), hi = S0 * (1.0 + span);
    for (int i = 0; i < count; ++i)
        strikes[i] = lo + (hi - lo) * i / (count - 1);
    return strikes;
}

OptionChain synthetic_chain(const ModelParams& model, const MarketEnv& env,
                            double T, std::span<const double> strikes) {
    OptionChain chain;
    chain.env = env;
    const CosConfig cfg;
    for (double K : strikes) {
        OptionQuote q;
        q.strike = K;
        q.maturity = T;
        q.mid = cos_price(model, env, K, T, cfg);
        chain.quotes.push_back(q);
    }
    chain.validate();
    return chain;
}

std::vector<RmemcDay> backtest_rmemc(const RmemcBacktestConfig& cfg,
                                     const std::vector<OptionChain>& days) {
    if (days.empty()) throw std::domain_error("backtest_rmemc: no days");
    std::vector<RmemcDay> out;
    std::optional<ModelParams> prior;
    for (std::size_t d = 0; d < days.size(); ++d) {
        RmemcDay day;
        day.day = static_cast<int>(d);
        try {
            CalibSetup setup;
            setup.family = cfg.family;
            setup.chain = days[d];
            setup.nm = cfg.nm;
            setup.alpha = prior ? cfg.alpha : 0.0; // day 1 has no prior yet
            setup.prior = prior;
            std::vector<std::vector<double>> starts;
            if (prior) {
                starts.push_back(vector_from_model(*prior));
            } else {
                starts = cfg.starts;
            }
            day.result = multistart_calibrate(setup, starts);
            day.ok = true;
            prior = day.result.params;
            // strip repricing error against the day's quotes
            double sse = 0.0;
            const CosConfig cos_cfg;
            for (const auto& q : days[d].quotes) {
                const double p = cos_price(day.result.params, days[d].env,
                                           q.strike, q.maturity, cos_cfg);
                sse += (p - q.mid) * (p - q.mid);
            }
            day.sse_vs_actual = sse;
        } catch (const std::exception& e) {
            day.ok = false;
            day.error = e.what();
        }
        out.push_back(std::move(day));
    }
    return out;
}

CompareReport compare_premiums(const ModelParams& ls_model,
                               const ModelParams& pf_model,
                               const MarketEnv& env, double T,
                               std::span<const double> strikes,
                               std::span<const double> actual_premiums,
                               const McConfig& mc_cfg) {
    if (strikes.size() != actual_premiums.size())
        throw std::domain_error(
            "compare_premiums: strikes/actual premiums length mismatch");
    // one set of terminal prices per model, shared seed
    const auto ls_terminals = mc_terminal_log_prices(ls_model, env, T, mc_cfg);
    const auto pf_terminals = mc_terminal_log_prices(pf_model, env, T, mc_cfg);
    const CosConfig cos_cfg;
    CompareReport report;
    double ls_pf = 0.0, ls_act = 0.0, pf_act = 0.0;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        CompareRow row;
        row.strike = strikes[i];
        row.actual = actual_premiums[i];
        row.ls_mc = mc_price(ls_terminals, OptionKind::Call, row.strike, env, T,
                             mc_cfg.antithetic)
                        .premium;
        row.pf_mc = mc_price(pf_terminals, OptionKind::Call, row.strike, env, T,
                             mc_cfg.antithetic)
                        .premium;
        row.ls_cos = cos_price(ls_model, env, row.strike, T, cos_cfg);
        row.pf_cos = cos_price(pf_model, env, row.strike, T, cos_cfg);
        ls_pf += std::fabs(row.ls_mc - row.pf_mc);
        ls_act += std::fabs(row.ls_mc - row.actual);
        pf_act += std::fabs(row.pf_mc - row.actual);
        report.rows.push_back(row);
    }
    const double n = static_cast<double>(strikes.size());
    report.mean_abs_ls_pf = ls_pf / n;
    report.mean_abs_ls_actual = ls_act / n;
    report.mean_abs_pf_actual = pf_act / n;
    return report;
}

} // namespace levyq
