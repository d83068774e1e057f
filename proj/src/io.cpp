#include "levyq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levyq {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& field, const std::string& path,
                    std::size_t line_no, const std::string& column) {
    const std::string t = trim(field);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cannot parse " + column + " value '" +
                                 field + "'");
    }
}

// `# env S0=90.692 r=0.0179 q=0` with space or comma separated k=v pairs
bool parse_env_line(const std::string& line, MarketEnv& env) {
    std::string body = trim(line.substr(1));
    if (body.rfind("env", 0) != 0) return false;
    body = trim(body.substr(3));
    for (auto& c : body)
        if (c == ',') c = ' ';
    std::istringstream is(body);
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const double v = std::stod(tok.substr(eq + 1));
        if (key == "S0") env.S0 = v;
        else if (key == "r") env.r = v;
        else if (key == "q") env.q = v;
    }
    return true;
}

} // namespace

OptionChain load_option_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_option_chain: cannot open " + path);
    OptionChain chain;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<std::string> columns;
    std::vector<std::string> violations;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (line[0] == '#') {
            parse_env_line(line, chain.env);
            continue;
        }
        const auto fields = split(line, ',');
        if (!header_seen) {
            columns.clear();
            for (const auto& f : fields) columns.push_back(trim(f));
            if (columns.size() < 3 || columns[0] != "strike" ||
                columns[1] != "maturity" || columns[2] != "mid") {
                throw std::runtime_error(
                    path + ":" + std::to_string(line_no) +
                    ": expected header strike,maturity,mid[,bid,ask]");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() < 3) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected at least 3 fields");
        }
        OptionQuote q;
        q.strike = parse_number(fields[0], path, line_no, "strike");
        q.maturity = parse_number(fields[1], path, line_no, "maturity");
        q.mid = parse_number(fields[2], path, line_no, "mid");
        for (std::size_t c = 3; c < fields.size() && c < columns.size(); ++c) {
            if (trim(fields[c]).empty()) continue;
            const double v = parse_number(fields[c], path, line_no, columns[c]);
            if (columns[c] == "bid") q.bid = v;
            else if (columns[c] == "ask") q.ask = v;
            else if (columns[c] == "weight") q.weight = v;
        }
        const std::string row = "row " + std::to_string(line_no);
        if (!(q.strike > 0.0)) violations.push_back(row + ": strike <= 0");
        if (!(q.maturity > 0.0)) violations.push_back(row + ": maturity <= 0");
        if (q.bid && q.ask && *q.bid > *q.ask)
            violations.push_back(row + ": bid > ask");
        if (q.bid && *q.bid > q.mid) violations.push_back(row + ": bid > mid");
        if (q.ask && q.mid > *q.ask) violations.push_back(row + ": mid > ask");
        chain.quotes.push_back(q);
    }
    if (!header_seen)
        throw std::runtime_error("load_option_chain: no header in " + path);
    if (!violations.empty()) {
        std::string msg = "load_option_chain: invalid quotes in " + path + ":";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::runtime_error(msg);
    }
    if (chain.quotes.empty())
        throw std::runtime_error("load_option_chain: no quotes in " + path);
    return chain;
}

void save_option_chain(const OptionChain& chain, const std::string& path,
                       const std::vector<std::string>& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_option_chain: cannot write " + path);
    for (const auto& m : metadata) out << "# " << m << "\n";
    out << "# env S0=" << format_double(chain.env.S0)
        << " r=" << format_double(chain.env.r)
        << " q=" << format_double(chain.env.q) << "\n";
    const bool has_ba = std::any_of(
        chain.quotes.begin(), chain.quotes.end(),
        [](const OptionQuote& q) { return q.bid || q.ask; });
    out << (has_ba ? "strike,maturity,mid,bid,ask" : "strike,maturity,mid")
        << "\n";
    for (const auto& q : chain.quotes) {
        out << format_double(q.strike) << ',' << format_double(q.maturity)
            << ',' << format_double(q.mid);
        if (has_ba) {
            out << ',' << (q.bid ? format_double(*q.bid) : std::string())
                << ',' << (q.ask ? format_double(*q.ask) : std::string());
        }
        out << "\n";
    }
}

LogReturnSeries load_price_series(const std::string& path, double dt) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_price_series: cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> times, prices;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto fields = split(line, ',');
        if (!header_seen) {
            if (fields.size() < 2 || trim(fields[0]) != "time" ||
                trim(fields[1]) != "price") {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected header time,price");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() < 2)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 2 fields");
        const double t = parse_number(fields[0], path, line_no, "time");
        const double p = parse_number(fields[1], path, line_no, "price");
        if (!(p > 0.0))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": nonpositive price");
        if (!times.empty() && !(t > times.back()))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": timestamps must be ascending");
        times.push_back(t);
        prices.push_back(p);
    }
    if (times.size() < 2)
        throw std::runtime_error("load_price_series: need at least 2 rows in " +
                                 path);
    const double spacing = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i) {
        const double d = times[i] - times[i - 1];
        if (std::fabs(d - spacing) > 1e-9 * std::max(std::fabs(spacing), 1.0))
            throw std::runtime_error(
                "load_price_series: nonuniform spacing at row " +
                std::to_string(i) + " in " + path);
    }
    LogReturnSeries series;
    series.dt = (dt > 0.0) ? dt : spacing;
    series.log_prices.resize(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i)
        series.log_prices[i] = std::log(prices[i]);
    series.validate();
    return series;
}

void save_price_series(const std::vector<double>& times,
                       const std::vector<double>& prices,
                       const std::string& path,
                       const std::vector<std::string>& metadata) {
    if (times.size() != prices.size())
        throw std::domain_error("save_price_series: length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_price_series: cannot write " + path);
    for (const auto& m : metadata) out << "# " << m << "\n";
    out << "time,price\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out << format_double(times[i]) << ',' << format_double(prices[i])
            << "\n";
}

} // namespace levyq
