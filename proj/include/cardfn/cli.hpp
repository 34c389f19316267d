#ifndef CARDFN_CLI_HPP
#define CARDFN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cardfn/counter.hpp"

namespace cardfn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBudget = 2;

// Budget defaults: built-in values, then the JSON file named by
// CARDFN_CONFIG (keys budget, bit_cap, witnesses, refinements), then
// CARDFN_BUDGET. Command-line flags override all of these.
CountOptions default_count_options();

// args excludes the program name. Reports go to `out` unless --out is given;
// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cardfn

#endif  // CARDFN_CLI_HPP
