#include "rsmdp/reduction.hpp"

#include <cmath>
#include <string>

namespace rsmdp {

bool DtmdpModel::is_terminal(Index x, Index a) const {
    return kernel[a](x, x) == 1.0 && log_cost[a](x, x) == 0.0;
}

void validate_dtmdp(const DtmdpModel& model) {
    const Index n = model.num_states();
    const Index na = model.num_actions();
    if (n == 0) throw ModelError("DTMDP has no states");
    if (na == 0) throw ModelError("DTMDP has no actions");
    if (static_cast<Index>(model.admissible.size()) != n)
        throw ModelError("DTMDP admissible table does not cover every state");
    if (static_cast<Index>(model.kernel.size()) != na || static_cast<Index>(model.log_cost.size()) != na)
        throw ModelError("DTMDP kernel or cost does not cover every action");
    for (Index a = 0; a < na; ++a) {
        if (model.kernel[a].rows() != n || model.kernel[a].cols() != n || model.log_cost[a].rows() != n ||
            model.log_cost[a].cols() != n)
            throw ModelError("DTMDP matrices for action '" + model.actions[a] + "' have the wrong shape");
    }
    for (Index x = 0; x < n; ++x) {
        const auto& adm = model.admissible[x];
        if (adm.empty()) throw ModelError("empty admissible set for state '" + model.states[x] + "'");
        for (std::size_t k = 0; k < adm.size(); ++k) {
            const Index a = adm[k];
            if (a < 0 || a >= na || (k > 0 && adm[k - 1] >= a))
                throw ModelError("admissible actions of state '" + model.states[x] +
                                 "' must be sorted valid indices");
            const std::string where = "(state '" + model.states[x] + "', action '" + model.actions[a] + "')";
            double sum = 0.0;
            for (Index y = 0; y < n; ++y) {
                const double p = model.kernel[a](x, y);
                const double l = model.log_cost[a](x, y);
                if (!(p >= 0.0) || !std::isfinite(p)) throw ModelError("invalid probability at " + where);
                if (!(l >= 0.0) || !std::isfinite(l)) throw ModelError("invalid cost at " + where);
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw ModelError("kernel row at " + where + " sums to " + std::to_string(sum));
        }
    }
}

Eigen::VectorXd uniformization_weight(const CtmdpModel& model) {
    Eigen::VectorXd w(model.num_states());
    for (Index x = 0; x < model.num_states(); ++x) w(x) = 1.0 + model.max_cost(x) + model.max_total_rate(x);
    return w;
}

DtmdpModel build_equivalent_dtmdp(const CtmdpModel& model) {
    const Index n = model.num_states();
    const Index na = model.num_actions();
    const Eigen::VectorXd w = uniformization_weight(model);

    DtmdpModel out;
    out.states = model.states();
    out.actions = model.actions();
    out.kernel.assign(na, Eigen::MatrixXd::Zero(n, n));
    out.log_cost.assign(na, Eigen::MatrixXd::Zero(n, n));
    for (Index x = 0; x < n; ++x) {
        out.admissible.push_back(model.admissible(x));
        for (Index a : model.admissible(x)) {
            out.kernel[a].row(x) = model.rate_matrix(a).row(x) / w(x);
            out.kernel[a](x, x) = 1.0 - total_rate(model, x, a) / w(x);
            // w - c >= 1 + q_x > 0, so the log is finite and >= 0.
            const double c = model.cost(x, a);
            const double l = c == 0.0 ? 0.0 : std::log(w(x) / (w(x) - c));
            out.log_cost[a].row(x).setConstant(l);
        }
    }
    return out;
}

}  // namespace rsmdp
