#include "rsmdp/dtmdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rsmdp {

namespace {

// Relative slack below which a decrease between sweeps is attributed to roundoff.
constexpr double kMonotoneSlack = 1e-12;
constexpr double kRoundoffChange = 8 * std::numeric_limits<double>::epsilon();

/*
 * sum_y p(y) e^{l(y)} v(y), written as 1 + sum_y p(y) (e^{l(y)} v(y) - 1).
 * The two agree because rows are stochastic; the second form never drops
 * below 1 in floating point and returns exactly 1 on cost-free constant rows.
 * Zero-probability terms are skipped, which is 0 * inf = 0.
 */
ExtReal action_value(const DtmdpModel& model, Index x, Index a, const ValueFunction& v) {
    ExtReal excess;
    for (Index y = 0; y < model.num_states(); ++y) {
        const double p = model.kernel[a](x, y);
        if (p == 0.0) continue;
        const ExtReal u = ExtReal(std::exp(model.log_cost[a](x, y))) * v(y);
        excess += ExtReal(p) * ext_sub_clamped(u, ExtReal::one());
    }
    return ExtReal::one() + excess;
}

template <class Apply>
SolveReport iterate(const DtmdpModel& model, const SolveOptions& opts, Apply apply) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (!(opts.cap > 1.0)) throw std::invalid_argument("cap must be > 1");

    const Index n = model.num_states();
    SolveReport report;
    ValueFunction v = ValueFunction::ones(n);
    std::vector<bool> infinite(n, false);
    std::vector<int> above_cap(n, 0);
    double previous_change = 0.0;

    for (long sweep = 1; sweep <= opts.max_iters; ++sweep) {
        ValueFunction next = apply(v);
        double change = 0.0;
        bool decreased = false;
        for (Index x = 0; x < n; ++x) {
            if (infinite[x]) {
                next[x] = ExtReal::infinity();
                continue;
            }
            if (next(x).is_infinite()) {
                infinite[x] = true;
                continue;
            }
            const double now = next(x).value();
            const double before = v(x).value();
            if (now < before * (1.0 - kMonotoneSlack)) decreased = true;
            above_cap[x] = (now > opts.cap && now > before) ? above_cap[x] + 1 : 0;
            if (above_cap[x] >= opts.confirm_sweeps) {
                infinite[x] = true;
                next[x] = ExtReal::infinity();
                continue;
            }
            change = std::max(change, std::abs(now - before) / before);
        }
        if (decreased) ++report.monotone_violations;
        v = std::move(next);
        report.iterations = sweep;
        report.sup_residual = change;
        if (opts.on_sweep) opts.on_sweep(sweep, v);
        // A small step is not enough when the iteration contracts slowly: the
        // distance still to go is about change * rho / (1 - rho).
        const double rho = previous_change > 0.0 ? change / previous_change : 0.0;
        const double remaining = rho < 1.0 ? change * rho / (1.0 - rho) : change * 1e12;
        previous_change = change;
        if (change < opts.tol && (remaining < opts.tol || change <= kRoundoffChange)) {
            report.converged = true;
            break;
        }
    }
    for (Index x = 0; x < n; ++x)
        if (v(x).is_infinite()) report.infinite_states.push_back(x);
    report.value = std::move(v);
    return report;
}

// Tarjan's algorithm over the positive-probability edges of `m`.
std::vector<int> strongly_connected_components(const Eigen::MatrixXd& m, int& count) {
    const int n = static_cast<int>(m.rows());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int next_index = 0;
    count = 0;
    std::function<void(int)> visit = [&](int x) {
        index[x] = low[x] = next_index++;
        stack.push_back(x);
        on_stack[x] = true;
        for (int y = 0; y < n; ++y) {
            if (m(x, y) <= 0.0) continue;
            if (index[y] < 0) {
                visit(y);
                low[x] = std::min(low[x], low[y]);
            } else if (on_stack[y]) {
                low[x] = std::min(low[x], index[y]);
            }
        }
        if (low[x] == index[x]) {
            int y;
            do {
                y = stack.back();
                stack.pop_back();
                on_stack[y] = false;
                comp[y] = count;
            } while (y != x);
            ++count;
        }
    };
    for (int x = 0; x < n; ++x)
        if (index[x] < 0) visit(x);
    return comp;
}

}  // namespace

std::pair<ValueFunction, StationaryPolicy> bellman_apply(const DtmdpModel& model, const ValueFunction& v) {
    const Index n = model.num_states();
    ValueFunction out{std::vector<ExtReal>(n)};
    StationaryPolicy policy{std::vector<Index>(n)};
    for (Index x = 0; x < n; ++x) {
        const auto& adm = model.admissible[x];
        ExtReal best = action_value(model, x, adm.front(), v);
        Index arg = adm.front();
        for (std::size_t k = 1; k < adm.size(); ++k) {
            const ExtReal q = action_value(model, x, adm[k], v);
            if (q < best) {
                best = q;
                arg = adm[k];
            }
        }
        out[x] = best;
        policy.choice[x] = arg;
    }
    return {std::move(out), std::move(policy)};
}

ValueFunction bellman_apply_policy(const DtmdpModel& model, const StationaryPolicy& policy,
                                   const ValueFunction& v) {
    const Index n = model.num_states();
    ValueFunction out{std::vector<ExtReal>(n)};
    for (Index x = 0; x < n; ++x) out[x] = action_value(model, x, policy(x), v);
    return out;
}

SolveReport value_iterate(const DtmdpModel& model, const SolveOptions& opts) {
    SolveReport report =
        iterate(model, opts, [&](const ValueFunction& v) { return bellman_apply(model, v).first; });
    report.policy = extract_policy(model, report.value);
    return report;
}

StationaryPolicy extract_policy(const DtmdpModel& model, const ValueFunction& v) {
    StationaryPolicy policy = bellman_apply(model, v).second;
    for (Index x = 0; x < model.num_states(); ++x)
        if (v(x).is_infinite()) policy.choice[x] = model.admissible[x].front();
    return policy;
}

ValueFunction evaluate_policy_iterative(const DtmdpModel& model, const StationaryPolicy& policy,
                                        const SolveOptions& opts) {
    return iterate(model, opts,
                   [&](const ValueFunction& v) { return bellman_apply_policy(model, policy, v); })
        .value;
}

LinearEvaluation evaluate_policy_linear(const DtmdpModel& model, const StationaryPolicy& policy,
                                        const SolveOptions& fallback_opts) {
    const Index n = model.num_states();
    Eigen::MatrixXd m(n, n);
    Eigen::MatrixXd costly = Eigen::MatrixXd::Zero(n, n);
    for (Index x = 0; x < n; ++x) {
        const Index a = policy(x);
        for (Index y = 0; y < n; ++y) {
            const double p = model.kernel[a](x, y);
            m(x, y) = p == 0.0 ? 0.0 : p * std::exp(model.log_cost[a](x, y));
            costly(x, y) = (p > 0.0 && model.log_cost[a](x, y) > 0.0) ? 1.0 : 0.0;
        }
    }

    int ncomp = 0;
    const std::vector<int> comp = strongly_connected_components(m, ncomp);
    std::vector<bool> closed(ncomp, true), has_cost(ncomp, false);
    for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y) {
            if (m(x, y) <= 0.0) continue;
            if (comp[y] != comp[x]) closed[comp[x]] = false;
            if (costly(x, y) > 0.0) has_cost[comp[x]] = true;
        }

    enum class Kind { boundary, divergent, transient };
    std::vector<Kind> kind(n, Kind::transient);
    std::vector<Index> frontier;
    for (Index x = 0; x < n; ++x) {
        if (!closed[comp[x]]) continue;
        if (has_cost[comp[x]]) {
            kind[x] = Kind::divergent;
            frontier.push_back(x);
        } else {
            kind[x] = Kind::boundary;
        }
    }
    // Anything that reaches a costly closed class with positive probability is inf.
    while (!frontier.empty()) {
        const Index y = frontier.back();
        frontier.pop_back();
        for (Index x = 0; x < n; ++x)
            if (m(x, y) > 0.0 && kind[x] == Kind::transient) {
                kind[x] = Kind::divergent;
                frontier.push_back(x);
            }
    }

    LinearEvaluation out;
    out.value = ValueFunction::ones(n);
    std::vector<Index> transient;
    for (Index x = 0; x < n; ++x) {
        if (kind[x] == Kind::divergent) out.value[x] = ExtReal::infinity();
        if (kind[x] == Kind::transient) transient.push_back(x);
    }
    if (transient.empty()) return out;

    const Index nt = static_cast<Index>(transient.size());
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(nt, nt);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt);
    for (Index i = 0; i < nt; ++i) {
        for (Index j = 0; j < nt; ++j) lhs(i, j) -= m(transient[i], transient[j]);
        for (Index y = 0; y < n; ++y)
            if (kind[y] == Kind::boundary) rhs(i) += m(transient[i], y);
    }

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    std::ostringstream why;
    if (!lu.isInvertible()) {
        why << "singular transient system of size " << nt;
    } else {
        const Eigen::VectorXd sol = lu.solve(rhs);
        for (Index i = 0; i < nt; ++i) {
            if (!std::isfinite(sol(i)) || sol(i) < 1.0 - 1e-9) {
                why << "transient solution " << sol(i) << " at state '" << model.states[transient[i]]
                    << "' is below 1";
                break;
            }
            out.value[transient[i]] = ExtReal(std::max(sol(i), 1.0));
        }
    }
    if (why.str().empty()) return out;

    out.value = evaluate_policy_iterative(model, policy, fallback_opts);
    out.used_fallback = true;
    out.diagnostics = why.str() + "; used iterative evaluation";
    return out;
}

std::vector<std::optional<double>> optimality_residual(const CtmdpModel& model, const ValueFunction& v) {
    const Index n = model.num_states();
    std::vector<std::optional<double>> out(n);
    for (Index x = 0; x < n; ++x) {
        if (v(x).is_infinite()) continue;
        const double vx = v(x).value();
        double best = std::numeric_limits<double>::infinity();
        for (Index a : model.admissible(x)) {
            ExtReal positive = ExtReal(model.cost(x, a)) * v(x);
            for (Index y = 0; y < n; ++y) {
                const double r = model.rate(x, a, y);
                if (r > 0.0) positive += ExtReal(r) * v(y);
            }
            if (positive.is_infinite()) continue;
            best = std::min(best, positive.value() - total_rate(model, x, a) * vx);
        }
        out[x] = best;
    }
    return out;
}

double sup_abs_residual(const std::vector<std::optional<double>>& residual) {
    double sup = 0.0;
    for (const auto& r : residual)
        if (r) sup = std::max(sup, std::abs(*r));
    return sup;
}

bool check_supersolution(const CtmdpModel& model, const ValueFunction& u, const ValueFunction& solved,
                         double residual_tol) {
    if (u.size() != model.num_states() || solved.size() != model.num_states())
        throw std::invalid_argument("value function size does not match the model");
    const auto residual = optimality_residual(model, u);
    for (Index x = 0; x < model.num_states(); ++x) {
        if (residual[x] && *residual[x] < -residual_tol) return false;
        if (u(x) < solved(x)) return false;
    }
    return true;
}

double oracle_strategy_count(const DtmdpModel& model, int horizon) {
    double count = 1.0;
    for (Index x = 0; x < model.num_states(); ++x)
        count *= std::pow(static_cast<double>(model.admissible[x].size()), horizon);
    return count;
}

ValueFunction finite_horizon_oracle(const DtmdpModel& model, int horizon) {
    if (horizon < 0 || horizon > kOracleMaxHorizon)
        throw OracleGuardError("oracle horizon must be in [0, " + std::to_string(kOracleMaxHorizon) + "]");
    const double count = oracle_strategy_count(model, horizon);
    if (count > kOracleMaxStrategies) {
        std::ostringstream msg;
        msg << "oracle would enumerate " << count << " strategies (limit " << kOracleMaxStrategies << ")";
        throw OracleGuardError(msg.str());
    }

    const Index n = model.num_states();
    std::vector<Eigen::MatrixXd> weight(model.num_actions());
    for (Index a = 0; a < model.num_actions(); ++a)
        weight[a] = model.kernel[a].array() * model.log_cost[a].array().exp();

    // digit[k * n + x] indexes the admissible action taken at state x on step k.
    const std::size_t digits = static_cast<std::size_t>(horizon) * n;
    std::vector<std::size_t> digit(digits, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    Eigen::MatrixXd mass(n, n), next(n, n);
    while (true) {
        mass.setIdentity();  // row i: expected weight of paths from i, by current state
        for (int k = 0; k < horizon; ++k) {
            next.setZero();
            for (Index x = 0; x < n; ++x) {
                const Index a = model.admissible[x][digit[k * n + x]];
                for (Index y = 0; y < n; ++y) {
                    const double w = weight[a](x, y);
                    if (w == 0.0) continue;
                    for (Index i = 0; i < n; ++i) next(i, y) += mass(i, x) * w;
                }
            }
            std::swap(mass, next);
        }
        for (Index i = 0; i < n; ++i) best[i] = std::min(best[i], mass.row(i).sum());

        std::size_t pos = 0;
        for (; pos < digits; ++pos) {
            const Index x = static_cast<Index>(pos % n);
            if (++digit[pos] < model.admissible[x].size()) break;
            digit[pos] = 0;
        }
        if (pos == digits) break;
    }

    ValueFunction out{std::vector<ExtReal>(n)};
    for (Index i = 0; i < n; ++i) out[i] = ExtReal(best[i]);
    return out;
}

SolveReport solve_ctmdp(const CtmdpModel& model, const SolveOptions& opts) {
    const DtmdpModel reduced = build_equivalent_dtmdp(model);
    SolveReport report = value_iterate(reduced, opts);
    report.sup_residual = sup_abs_residual(optimality_residual(model, report.value));
    return report;
}

}  // namespace rsmdp
