#pragma once

#include "rsmdp/ctmdp_model.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rsmdp {

/**
 * A finite DTMDP with multiplicative (exponential-utility) cost.
 *
 * kernel(a)(x, y) = p(y|x,a) and log_cost(a)(x, y) = l(x,a,y) >= 0, finite.
 * One step from x under a multiplies the utility by e^{l(x,a,y)}.
 * Rows for inadmissible (x, a) are ignored by every algorithm.
 */
struct DtmdpModel {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::vector<Index>> admissible;
    std::vector<Eigen::MatrixXd> kernel;
    std::vector<Eigen::MatrixXd> log_cost;

    Index num_states() const noexcept { return static_cast<Index>(states.size()); }
    Index num_actions() const noexcept { return static_cast<Index>(actions.size()); }

    double p(Index x, Index a, Index y) const { return kernel[a](x, y); }
    double l(Index x, Index a, Index y) const { return log_cost[a](x, y); }

    /// True when (x, a) stays at x forever at zero cost.
    bool is_terminal(Index x, Index a) const;

    friend bool operator==(const DtmdpModel&, const DtmdpModel&) = default;
};

/// Checks shapes, admissible sets, row sums (within 1e-12) and cost signs.
/// Throws ModelError.
void validate_dtmdp(const DtmdpModel& model);

/// w(x) = 1 + max_a c(x,a) + max_a q_x(a).
Eigen::VectorXd uniformization_weight(const CtmdpModel& model);

/**
 * The equivalent exponential-utility DTMDP on the same state and action sets:
 *
 *   p(y|x,a) = q(y|x,a) / w(x) + [y == x],
 *   l(x,a,y) = ln(w(x) / (w(x) - c(x,a)))   for every y.
 */
DtmdpModel build_equivalent_dtmdp(const CtmdpModel& model);

}  // namespace rsmdp
