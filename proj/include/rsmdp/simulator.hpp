#pragma once

#include "rsmdp/ctmdp_model.hpp"
#include "rsmdp/extreal.hpp"
#include "rsmdp/philox.hpp"
#include "rsmdp/reduction.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rsmdp {

struct Jump {
    Index state;
    Index action;
    double holding_time;
};

enum class Terminal { absorbed, truncated };

/**
 * One simulated path of the jump process under a stationary policy.
 *
 * `jumps` lists the finite sojourns in order. An absorbed path ends in
 * `final_state`, whose total rate under the policy is zero; its infinite
 * sojourn adds inf to the cost when the cost rate there is positive.
 */
struct Trajectory {
    std::vector<Jump> jumps;
    Index final_state = 0;
    Terminal terminal = Terminal::truncated;
    ExtReal accumulated_cost;
    double elapsed_time = 0.0;
};

struct McEstimate {
    ExtReal mean;
    /// Absent when a sample is infinite or the tail check fails.
    std::optional<double> std_error;
    long n_trajectories = 0;
    double truncated_fraction = 0.0;
    /// Truncated paths contribute e^{cost so far}; inf if any sample is inf.
    double lower_bound_mean = 0.0;
    std::uint64_t seed = 0;
};

/// Simulates from x0 until absorption or `max_jumps` finite sojourns.
Trajectory sample_trajectory(const CtmdpModel& model, const StationaryPolicy& policy, Index x0,
                             RngStream& rng, long max_jumps);

struct McOptions {
    long n = 100000;
    std::uint64_t master_seed = 0;
    /// Jumps (CTMDP) or steps (DTMDP) before a path is truncated.
    long max_jumps = 10000;
    /// 0 means std::thread::hardware_concurrency().
    unsigned workers = 0;
};

/**
 * Monte Carlo estimate of E[e^{int c dt}] from x0 under `policy`.
 *
 * Trajectory i draws from RngStream(master_seed, i) and samples are reduced in
 * index order, so the result does not depend on `workers`. Truncated paths
 * count with the cost accumulated so far, as if the process stopped paying
 * at the truncation time; mean and lower_bound_mean then coincide and
 * truncated_fraction says how much of the estimate that affects.
 */
McEstimate estimate_value_mc(const CtmdpModel& model, const StationaryPolicy& policy, Index x0,
                             const McOptions& opts);

/// The same estimate from the embedded chain of a DTMDP, averaging e^{sum l}.
McEstimate estimate_dtmdp_value_mc(const DtmdpModel& model, const StationaryPolicy& policy, Index x0,
                                   const McOptions& opts);

/// Aggregates per-trajectory samples. Exposed for tests.
McEstimate summarize_samples(const std::vector<ExtReal>& samples, const std::vector<bool>& truncated,
                             std::uint64_t seed);

}  // namespace rsmdp
