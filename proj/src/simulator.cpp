#include "rsmdp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rsmdp {

namespace {

struct PathOutcome {
    ExtReal sample;  // e^{accumulated cost}
    bool truncated = false;
};

// Shared by sample_trajectory and the estimator; `record` is null when the
// estimator only needs the outcome.
PathOutcome run_ctmdp_path(const CtmdpModel& model, const StationaryPolicy& policy, Index x0, RngStream& rng,
                           long max_jumps, Trajectory* record) {
    Index x = x0;
    double cost = 0.0;
    double elapsed = 0.0;
    long jumps = 0;
    PathOutcome out;
    while (true) {
        const Index a = policy(x);
        const double q = total_rate(model, x, a);
        const double c = model.cost(x, a);
        if (q == 0.0) {
            out.sample = c > 0.0 ? ExtReal::infinity() : ext_exp(ExtReal(cost));
            if (record) {
                record->terminal = Terminal::absorbed;
                record->accumulated_cost = c > 0.0 ? ExtReal::infinity() : ExtReal(cost);
            }
            break;
        }
        if (jumps == max_jumps) {
            out.sample = ext_exp(ExtReal(cost));
            out.truncated = true;
            if (record) {
                record->terminal = Terminal::truncated;
                record->accumulated_cost = ExtReal(cost);
            }
            break;
        }
        // Inverse-CDF exponential sojourn, then a jump proportional to the off-diagonal rates.
        const double theta = -std::log(rng.uniform_open()) / q;
        cost += c * theta;
        elapsed += theta;
        ++jumps;
        if (record) record->jumps.push_back({x, a, theta});

        const double target = rng.uniform_open() * q;
        double acc = 0.0;
        Index next = -1;
        for (Index y = 0; y < model.num_states(); ++y) {
            const double r = model.rate(x, a, y);
            if (r <= 0.0) continue;
            next = y;
            acc += r;
            if (target < acc) break;
        }
        x = next;
    }
    if (record) {
        record->final_state = x;
        record->elapsed_time = elapsed;
    }
    return out;
}

PathOutcome run_dtmdp_path(const DtmdpModel& model, const StationaryPolicy& policy, Index x0, RngStream& rng,
                           long max_steps) {
    Index x = x0;
    double log_sum = 0.0;
    for (long step = 0;; ++step) {
        const Index a = policy(x);
        if (model.kernel[a](x, x) == 1.0) {
            if (model.log_cost[a](x, x) > 0.0) return {ExtReal::infinity(), false};
            return {ext_exp(ExtReal(log_sum)), false};
        }
        if (step == max_steps) return {ext_exp(ExtReal(log_sum)), true};
        const double u = rng.uniform_open();
        double acc = 0.0;
        Index next = -1;
        for (Index y = 0; y < model.num_states(); ++y) {
            const double p = model.kernel[a](x, y);
            if (p <= 0.0) continue;
            next = y;
            acc += p;
            if (u < acc) break;
        }
        log_sum += model.log_cost[a](x, next);
        x = next;
    }
}

template <class PathFn>
McEstimate run_estimate(const McOptions& opts, PathFn path) {
    if (opts.n < 1) throw std::invalid_argument("need at least one trajectory");
    if (opts.max_jumps < 1) throw std::invalid_argument("max_jumps must be >= 1");
    const std::size_t n = static_cast<std::size_t>(opts.n);
    std::vector<ExtReal> samples(n);
    std::vector<bool> truncated(n);
    std::vector<char> truncated_bytes(n, 0);  // vector<bool> is not safe for concurrent writes

    unsigned workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += workers) {
            RngStream rng(opts.master_seed, i);
            const PathOutcome o = path(rng);
            samples[i] = o.sample;
            truncated_bytes[i] = o.truncated ? 1 : 0;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < n; ++i) truncated[i] = truncated_bytes[i] != 0;
    return summarize_samples(samples, truncated, opts.master_seed);
}

}  // namespace

Trajectory sample_trajectory(const CtmdpModel& model, const StationaryPolicy& policy, Index x0, RngStream& rng,
                             long max_jumps) {
    if (max_jumps < 1) throw std::invalid_argument("max_jumps must be >= 1");
    validate_policy(model, policy);
    if (x0 < 0 || x0 >= model.num_states()) throw ModelError("initial state out of range");
    Trajectory t;
    run_ctmdp_path(model, policy, x0, rng, max_jumps, &t);
    return t;
}

McEstimate estimate_value_mc(const CtmdpModel& model, const StationaryPolicy& policy, Index x0,
                             const McOptions& opts) {
    validate_policy(model, policy);
    if (x0 < 0 || x0 >= model.num_states()) throw ModelError("initial state out of range");
    return run_estimate(opts, [&](RngStream& rng) {
        return run_ctmdp_path(model, policy, x0, rng, opts.max_jumps, nullptr);
    });
}

McEstimate estimate_dtmdp_value_mc(const DtmdpModel& model, const StationaryPolicy& policy, Index x0,
                                   const McOptions& opts) {
    if (static_cast<Index>(policy.choice.size()) != model.num_states())
        throw ModelError("policy does not cover every state");
    if (x0 < 0 || x0 >= model.num_states()) throw ModelError("initial state out of range");
    return run_estimate(opts, [&](RngStream& rng) { return run_dtmdp_path(model, policy, x0, rng, opts.max_jumps); });
}

McEstimate summarize_samples(const std::vector<ExtReal>& samples, const std::vector<bool>& truncated,
                             std::uint64_t seed) {
    McEstimate est;
    est.seed = seed;
    est.n_trajectories = static_cast<long>(samples.size());
    if (samples.empty()) return est;
    const double n = static_cast<double>(samples.size());
    est.truncated_fraction = static_cast<double>(std::count(truncated.begin(), truncated.end(), true)) / n;

    if (std::any_of(samples.begin(), samples.end(), [](ExtReal s) { return s.is_infinite(); })) {
        est.mean = ExtReal::infinity();
        est.lower_bound_mean = std::numeric_limits<double>::infinity();
        return est;
    }

    // Neumaier-compensated sum in index order.
    double sum = 0.0, comp = 0.0, max_sample = 0.0, min_sample = samples.front().value();
    for (ExtReal s : samples) {
        const double v = s.value();
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
        max_sample = std::max(max_sample, v);
        min_sample = std::min(min_sample, v);
    }
    sum += comp;
    const double mean = sum / n;
    est.mean = ExtReal(mean);
    est.lower_bound_mean = mean;

    if (max_sample == min_sample) {
        est.std_error = 0.0;
    } else if (samples.size() >= 2 && max_sample <= 0.5 * sum) {
        double ss = 0.0;
        for (ExtReal s : samples) ss += (s.value() - mean) * (s.value() - mean);
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

}  // namespace rsmdp
