#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsmdp {

using Index = int;

/// Invalid model, policy, or generator input. The message names the offending coordinates.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One off-diagonal rate entry of an unvalidated model.
struct RateEntry {
    std::string from;
    std::string action;
    std::string to;
    double rate = 0.0;
};

struct CostEntry {
    std::string state;
    std::string action;
    double rate = 0.0;
};

/// Untrusted, string-keyed model data as it appears in a model file.
struct RawModel {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    /// Missing states (or a missing map) default to all actions.
    std::optional<std::map<std::string, std::vector<std::string>>> admissible;
    std::vector<RateEntry> rates;
    std::vector<CostEntry> costs;
};

/**
 * A validated finite CTMDP {S, A, q, c}.
 *
 * Off-diagonal rates are stored densely per action, rates(a)(x, y) for y != x.
 * The diagonal q({x}|x,a) = -q_x(a) is implied and never stored, so every row
 * of q is conservative. Entries for inadmissible (x, a) pairs are zero.
 * Instances are immutable once constructed by validate_model().
 */
class CtmdpModel {
public:
    Index num_states() const noexcept { return static_cast<Index>(states_.size()); }
    Index num_actions() const noexcept { return static_cast<Index>(actions_.size()); }

    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::vector<std::string>& actions() const noexcept { return actions_; }
    /// Sorted admissible action indices at x; never empty.
    const std::vector<Index>& admissible(Index x) const { return admissible_.at(x); }
    bool is_admissible(Index x, Index a) const;

    /// Off-diagonal rate q({y}|x,a); zero on the diagonal.
    double rate(Index x, Index a, Index y) const { return rates_.at(a)(x, y); }
    const Eigen::MatrixXd& rate_matrix(Index a) const { return rates_.at(a); }
    double cost(Index x, Index a) const { return costs_(x, a); }

    /// max over admissible a of q_x(a).
    double max_total_rate(Index x) const { return qbar_(x); }
    /// max over admissible a of c(x, a).
    double max_cost(Index x) const { return cbar_(x); }

    Index state_index(const std::string& name) const;
    Index action_index(const std::string& name) const;

    friend bool operator==(const CtmdpModel& a, const CtmdpModel& b);

private:
    friend CtmdpModel validate_model(const RawModel& raw);

    std::vector<std::string> states_;
    std::vector<std::string> actions_;
    std::vector<std::vector<Index>> admissible_;
    std::vector<Eigen::MatrixXd> rates_;
    Eigen::MatrixXd costs_;
    Eigen::MatrixXd total_rates_;
    Eigen::VectorXd qbar_;
    Eigen::VectorXd cbar_;

    friend double total_rate(const CtmdpModel& model, Index x, Index a);
};

/// Deterministic stationary policy: one action index per state.
struct StationaryPolicy {
    std::vector<Index> choice;

    Index operator()(Index x) const { return choice.at(x); }
    friend bool operator==(const StationaryPolicy&, const StationaryPolicy&) = default;
};

/// Validates untrusted data; throws ModelError naming the offending entry.
CtmdpModel validate_model(const RawModel& raw);

/// Inverse of validate_model up to entry order: zero rates and costs are omitted.
RawModel to_raw(const CtmdpModel& model);

/// q_x(a), the total jump rate out of x under a. Throws ModelError if a is inadmissible at x.
double total_rate(const CtmdpModel& model, Index x, Index a);

/// Throws ModelError unless every state has an admissible choice.
void validate_policy(const CtmdpModel& model, const StationaryPolicy& policy);

/// Lowest-index admissible action everywhere.
StationaryPolicy first_admissible_policy(const CtmdpModel& model);

enum class ExampleKind { two_state, pure_birth, birth_death, random };

ExampleKind parse_example_kind(const std::string& name);

/**
 * Parameters for gen_example(). Unused fields are ignored for a given kind.
 *
 *   two_state    q, c
 *   pure_birth   N (1..60), kappa (cost rate at non-terminal states)
 *   birth_death  N (1..64), lambda, mu, cost
 *   random       n (2..64), m (1..8), rate_scale > 0, cost_scale >= 0, density in [0, 1]
 */
struct ExampleParams {
    double q = 4.0;
    double c = 1.0;
    int N = 4;
    double kappa = 1.0;
    double lambda = 1.0;
    double mu = 2.0;
    double cost = 0.2;
    int n = 4;
    int m = 2;
    double rate_scale = 1.0;
    double cost_scale = 0.5;
    double density = 0.5;
};

/**
 * Builds a fixture model. The result is a deterministic function of
 * (kind, params, seed); only `random` consumes the seed.
 *
 * Every kind has a zero-cost absorbing state. For pure_birth, birth_death and
 * random it is reached from every state under every policy; for two_state
 * whenever q > 0.
 */
CtmdpModel gen_example(ExampleKind kind, const ExampleParams& params, std::uint64_t seed);

}  // namespace rsmdp
