#pragma once

#include <iosfwd>
#include <string>

#include "hfair/core.hpp"
#include "hfair/happiness.hpp"

namespace hfair::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Resolves equal-funding | statistical-parity | overall-accuracy |
// equalized-odds | adult | financial | expr:<text>[;<text>...].
// `reference` supplies p(y|z) for equalized odds.
HappinessSpec happiness_by_name(const std::string& name, const Dataset& reference);

} // namespace hfair::cli
