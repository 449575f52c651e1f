#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chpt::cli {

/// Exit codes; a failing run also prints one JSON object
/// {"error": <category>, "message": ...} to the error stream.
enum ExitCode : int {
    ok = 0,
    usage = 2,    // bad flags or flag values
    input = 3,    // malformed input data
    io = 4,       // cannot read or write a file
    numeric = 5,  // non-finite intermediate results
};

/// Reads a flat `key = value` manifest. '#' starts a comment; a key may repeat
/// or carry comma-separated values for repeatable flags.
std::multimap<std::string, std::string> read_config_file(const std::string& path);

/// Expands --config into explicit flags. Keys already given on the command
/// line are dropped from the file, so flags override the manifest.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

/// Parses "3", "3..18" or "3,5,7" style tau lists.
std::vector<int> parse_tau_list(const std::vector<std::string>& tokens);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chpt::cli
