#pragma once

#include "levyq/calib.hpp"
#include "levyq/filter.hpp"
#include "levyq/mc.hpp"

#include <string>
#include <vector>

// CSV ingestion and emission. Numbers are written with 17 significant digits
// so every emitted file reloads to bit-identical doubles. Lines starting
// with '#' are metadata comments; loaders skip them, except the env sidecar
// line which load_option_chain parses into the MarketEnv.

namespace levyq {

/// Reads a chain CSV with header strike,maturity,mid[,bid,ask]. An optional
/// sidecar line of the form `# env S0=... r=... q=...` (before the header)
/// fills the MarketEnv. Parse errors carry the 1-based line number;
/// invariant violations are listed exhaustively.
OptionChain load_option_chain(const std::string& path);

void save_option_chain(const OptionChain& chain, const std::string& path,
                       const std::vector<std::string>& metadata = {});

/// Reads a series CSV with header time,price (time in years, ascending,
/// uniformly spaced within 1e-9 relative; prices > 0). When dt > 0 it
/// overrides the spacing read from the file.
LogReturnSeries load_price_series(const std::string& path, double dt = 0.0);

void save_price_series(const std::vector<double>& times,
                       const std::vector<double>& prices,
                       const std::string& path,
                       const std::vector<std::string>& metadata = {});

/// Full-precision decimal formatting (round-trips through strtod).
std::string format_double(double v);

} // namespace levyq
