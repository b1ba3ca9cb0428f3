#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "coolgraph/exomol.hpp"

namespace coolgraph::cli {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;

/// Column schema used for a states file: the explicit schema file when given,
/// else the file's header row, else id,energy,c3,...
StatesSchema resolve_states_schema(const std::string& states_path, const std::string& schema_path = {});

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coolgraph::cli
