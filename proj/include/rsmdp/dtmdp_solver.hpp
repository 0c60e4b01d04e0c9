#pragma once

#include "rsmdp/ctmdp_model.hpp"
#include "rsmdp/extreal.hpp"
#include "rsmdp/reduction.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rsmdp {

/// Per-state values in [1, inf].
struct ValueFunction {
    std::vector<ExtReal> values;

    static ValueFunction ones(Index n) { return {std::vector<ExtReal>(n, ExtReal::one())}; }

    Index size() const noexcept { return static_cast<Index>(values.size()); }
    ExtReal operator()(Index x) const { return values.at(x); }
    ExtReal& operator[](Index x) { return values[x]; }

    friend bool operator==(const ValueFunction&, const ValueFunction&) = default;
};

struct SolveOptions {
    double tol = 1e-10;
    long max_iters = 100000;
    double cap = 1e12;
    /// Sweeps a state must spend above `cap` while still growing before it is set to inf.
    int confirm_sweeps = 10;
    /// Called after every sweep with the sweep number (1-based) and the new iterate.
    std::function<void(long, const ValueFunction&)> on_sweep;
};

struct SolveReport {
    ValueFunction value;
    StationaryPolicy policy;
    long iterations = 0;
    /// For value_iterate: the last relative sup-norm change over finite states.
    /// solve_ctmdp() replaces it with the sup |optimality residual| against the CTMDP.
    double sup_residual = 0.0;
    std::vector<Index> infinite_states;
    bool converged = false;
    /// Sweeps in which some finite state decreased by more than roundoff.
    long monotone_violations = 0;
};

/// T v and its lowest-index argmin, with T v(x) = min_a sum_y p(y|x,a) e^{l(x,a,y)} v(y).
std::pair<ValueFunction, StationaryPolicy> bellman_apply(const DtmdpModel& model, const ValueFunction& v);

/// T_phi v: the Bellman map with the action fixed by `policy`.
ValueFunction bellman_apply_policy(const DtmdpModel& model, const StationaryPolicy& policy,
                                   const ValueFunction& v);

/**
 * Value iteration from V0 = 1.
 *
 * Stops once the largest relative change among states not classified infinite
 * drops below opts.tol and the geometric estimate of the remaining distance,
 * from the ratio of successive changes, is below opts.tol as well. A state that exceeds opts.cap and keeps growing for
 * opts.confirm_sweeps consecutive sweeps is set to inf and no longer counted.
 * Running out of sweeps returns converged = false.
 */
SolveReport value_iterate(const DtmdpModel& model, const SolveOptions& opts = {});

/// Lowest-index argmin of the Bellman map at v; lowest admissible action where v = inf.
StationaryPolicy extract_policy(const DtmdpModel& model, const ValueFunction& v);

/// V_phi by iterating T_phi from 1, with value_iterate's stopping and inf rules.
ValueFunction evaluate_policy_iterative(const DtmdpModel& model, const StationaryPolicy& policy,
                                        const SolveOptions& opts = {});

struct LinearEvaluation {
    ValueFunction value;
    bool used_fallback = false;
    /// Why the fallback was taken; empty otherwise.
    std::string diagnostics;
};

/**
 * V_phi by a direct linear solve.
 *
 * States in closed classes of the chain under phi get 1 when the class is
 * cost-free and inf otherwise; states that reach a costly closed class get
 * inf. The rest solve (I - M_TT) V_T = M_TB 1 with M = p .* e^l. A singular
 * system or a component below 1 falls back to evaluate_policy_iterative().
 */
LinearEvaluation evaluate_policy_linear(const DtmdpModel& model, const StationaryPolicy& policy,
                                        const SolveOptions& fallback_opts = {});

/**
 * min_a { c(x,a) v(x) + sum_{y != x} q(y|x,a) v(y) - q_x(a) v(x) } per state.
 * nullopt where v(x) = inf. An action with an infinite positive part counts as +inf.
 */
std::vector<std::optional<double>> optimality_residual(const CtmdpModel& model, const ValueFunction& v);

/// Largest |residual| over states where v is finite.
double sup_abs_residual(const std::vector<std::optional<double>>& residual);

/// u solves the optimality inequality (residual >= -residual_tol where u is finite)
/// and dominates `solved` pointwise.
bool check_supersolution(const CtmdpModel& model, const ValueFunction& u, const ValueFunction& solved,
                         double residual_tol = 1e-8);

class OracleGuardError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kOracleMaxHorizon = 6;
inline constexpr double kOracleMaxStrategies = 1e7;

/**
 * Optimal `horizon`-step multiplicative cost by enumerating every deterministic
 * Markov strategy (one action per state per step) and propagating its exact
 * expected cost forward. Does not use the Bellman recursion.
 * Throws OracleGuardError past kOracleMaxHorizon or kOracleMaxStrategies tables.
 */
ValueFunction finite_horizon_oracle(const DtmdpModel& model, int horizon);

/// Number of strategy tables finite_horizon_oracle() would enumerate.
double oracle_strategy_count(const DtmdpModel& model, int horizon);

/// Reduce, value-iterate, extract the policy, and measure the residual on the CTMDP.
SolveReport solve_ctmdp(const CtmdpModel& model, const SolveOptions& opts = {});

}  // namespace rsmdp
