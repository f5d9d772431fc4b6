#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptts {

// Process exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBuildIncomplete = 3;
inline constexpr int kExitProviderFailure = 4;

// Routes argv to the subcommands (seeds validate, templates export,
// corpus build, corpus stats, diversity report, eval run, export sft).
// Errors print one machine-parsable line to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace ptts
