#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqp/qlin.hpp"

namespace cqp::cli {

enum ExitCode : int {
    kOk = 0,
    kSyntaxError = 1,
    kTypeError = 2,
    kBudgetExceeded = 3,
    kNotBisimilar = 4,
    kInterfaceMismatch = 5,
    kIoError = 10,
    kUsage = 64,
    kInternal = 70,
};

struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::optional<int> dim;
    std::string values;          // "0..3" or "0,2,5"; empty means 0..d-1
    std::string family = "default";  // basis | basis+hadamard | random:k:seed | default
    std::string format;          // text | json | dot; empty picks the command's default
    std::size_t max_nodes = 200000;
    unsigned long long seed = 2024;
    std::string out;             // empty means stdout
    std::vector<int> dims;       // teleport-demo
    bool sequential = false;
};

/// Value domain from "lo..hi" or "a,b,c"; throws std::invalid_argument.
std::vector<long long> parse_values(const std::string &text, int d);

/// Input-state family from a preset name; throws std::invalid_argument.
std::vector<qlin::PureState> parse_family(const std::string &text, int d, unsigned long long seed);

/// Full command line, including argv[0]. Writes results to `out` (or the
/// --out file) and diagnostics to `err`; returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

int execute(const RunConfig &cfg, std::ostream &out, std::ostream &err);

}  // namespace cqp::cli
