#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rsmdp {

enum class Command { validate, reduce, solve, evaluate, simulate, oracle, gen };

struct RunConfig {
    Command command = Command::solve;
    std::string model_path;
    std::optional<std::string> policy_path;
    double tol = 1e-10;
    long max_iters = 100000;
    double cap = 1e12;
    long n_trajectories = 100000;
    std::uint64_t seed = 0;
    std::optional<int> horizon;
    std::optional<std::string> output_path;
    std::string kind = "two_state";
    /// JSON object of generator parameters, for gen.
    std::string params = "{}";
};

enum ExitStatus : int { kOk = 0, kInputError = 1, kNotConverged = 2, kOracleMismatch = 3 };

/// Oracle discrepancies above this exit with kOracleMismatch.
inline constexpr double kOracleMismatchTolerance = 1e-8;

/// Runs one subcommand. The report goes to `out` (or config.output_path),
/// diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig; returns an exit status if parsing should stop the program.
std::optional<int> parse_command_line(int argc, const char* const* argv, RunConfig& config, std::ostream& out,
                                      std::ostream& err);

}  // namespace rsmdp
