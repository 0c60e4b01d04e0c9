#include "rsmdp/ctmdp_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>
#include <unordered_map>

namespace rsmdp {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ModelError(what); }

std::unordered_map<std::string, Index> index_names(const std::vector<std::string>& names,
                                                   const char* kind) {
    std::unordered_map<std::string, Index> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!out.emplace(names[i], static_cast<Index>(i)).second)
            fail(std::string("duplicate ") + kind + " '" + names[i] + "'");
    }
    return out;
}

Index lookup(const std::unordered_map<std::string, Index>& table, const std::string& name,
             const char* kind, const std::string& where) {
    auto it = table.find(name);
    if (it == table.end()) fail("unknown " + std::string(kind) + " '" + name + "' in " + where);
    return it->second;
}

std::string coords(const std::string& x, const std::string& a) {
    return "(state '" + x + "', action '" + a + "')";
}

std::string coords(const std::string& x, const std::string& a, const std::string& y) {
    return "(from '" + x + "', action '" + a + "', to '" + y + "')";
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries,
// unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::vector<std::string> numbered(const std::string& prefix, int count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

void require(bool ok, const std::string& what) {
    if (!ok) fail("gen_example: " + what);
}

}  // namespace

bool CtmdpModel::is_admissible(Index x, Index a) const {
    const auto& adm = admissible_.at(x);
    return std::binary_search(adm.begin(), adm.end(), a);
}

Index CtmdpModel::state_index(const std::string& name) const {
    auto it = std::find(states_.begin(), states_.end(), name);
    if (it == states_.end()) fail("unknown state '" + name + "'");
    return static_cast<Index>(it - states_.begin());
}

Index CtmdpModel::action_index(const std::string& name) const {
    auto it = std::find(actions_.begin(), actions_.end(), name);
    if (it == actions_.end()) fail("unknown action '" + name + "'");
    return static_cast<Index>(it - actions_.begin());
}

bool operator==(const CtmdpModel& a, const CtmdpModel& b) {
    if (a.states_ != b.states_ || a.actions_ != b.actions_ || a.admissible_ != b.admissible_)
        return false;
    for (std::size_t k = 0; k < a.rates_.size(); ++k)
        if (a.rates_[k] != b.rates_[k]) return false;
    return a.costs_ == b.costs_;
}

CtmdpModel validate_model(const RawModel& raw) {
    if (raw.states.empty()) fail("model has no states");
    if (raw.actions.empty()) fail("model has no actions");
    const auto state_ids = index_names(raw.states, "state");
    const auto action_ids = index_names(raw.actions, "action");

    CtmdpModel m;
    m.states_ = raw.states;
    m.actions_ = raw.actions;
    const Index n = m.num_states();
    const Index na = m.num_actions();

    std::vector<Index> all(na);
    for (Index a = 0; a < na; ++a) all[a] = a;
    m.admissible_.assign(n, all);
    if (raw.admissible) {
        for (const auto& [state, acts] : *raw.admissible) {
            const Index x = lookup(state_ids, state, "state", "admissible");
            std::set<Index> chosen;
            for (const auto& act : acts)
                chosen.insert(lookup(action_ids, act, "action", "admissible of state '" + state + "'"));
            if (chosen.empty()) fail("empty admissible set for state '" + state + "'");
            m.admissible_[x].assign(chosen.begin(), chosen.end());
        }
    }

    m.rates_.assign(na, Eigen::MatrixXd::Zero(n, n));
    std::set<std::tuple<Index, Index, Index>> seen_rates;
    for (const auto& e : raw.rates) {
        const std::string where = coords(e.from, e.action, e.to);
        const Index x = lookup(state_ids, e.from, "state", "rate " + where);
        const Index a = lookup(action_ids, e.action, "action", "rate " + where);
        const Index y = lookup(state_ids, e.to, "state", "rate " + where);
        if (x == y) fail("explicit self-loop rate at " + where + "; the diagonal is implied");
        if (std::isnan(e.rate) || e.rate < 0.0) fail("negative rate at " + where);
        if (!std::isfinite(e.rate)) fail("infinite rate at " + where);
        if (!m.is_admissible(x, a)) fail("rate for inadmissible action at " + where);
        if (!seen_rates.emplace(x, a, y).second) fail("duplicate rate entry at " + where);
        m.rates_[a](x, y) = e.rate;
    }

    m.costs_ = Eigen::MatrixXd::Zero(n, na);
    std::set<std::pair<Index, Index>> seen_costs;
    for (const auto& e : raw.costs) {
        const std::string where = coords(e.state, e.action);
        const Index x = lookup(state_ids, e.state, "state", "cost " + where);
        const Index a = lookup(action_ids, e.action, "action", "cost " + where);
        if (std::isnan(e.rate) || e.rate < 0.0) fail("negative cost at " + where);
        if (!std::isfinite(e.rate)) fail("infinite cost at " + where);
        if (!m.is_admissible(x, a)) fail("cost for inadmissible action at " + where);
        if (!seen_costs.emplace(x, a).second) fail("duplicate cost entry at " + where);
        m.costs_(x, a) = e.rate;
    }

    m.total_rates_ = Eigen::MatrixXd::Zero(n, na);
    m.qbar_ = Eigen::VectorXd::Zero(n);
    m.cbar_ = Eigen::VectorXd::Zero(n);
    for (Index x = 0; x < n; ++x) {
        for (Index a : m.admissible_[x]) {
            const double qx = m.rates_[a].row(x).sum();
            m.total_rates_(x, a) = qx;
            m.qbar_(x) = std::max(m.qbar_(x), qx);
            m.cbar_(x) = std::max(m.cbar_(x), m.costs_(x, a));
        }
        if (!std::isfinite(m.qbar_(x))) fail("total rate overflows at state '" + m.states_[x] + "'");
    }
    return m;
}

RawModel to_raw(const CtmdpModel& model) {
    RawModel raw;
    raw.states = model.states();
    raw.actions = model.actions();
    std::map<std::string, std::vector<std::string>> adm;
    bool restricted = false;
    for (Index x = 0; x < model.num_states(); ++x) {
        auto& names = adm[model.states()[x]];
        for (Index a : model.admissible(x)) names.push_back(model.actions()[a]);
        restricted = restricted || model.admissible(x).size() != model.actions().size();
    }
    if (restricted) raw.admissible = std::move(adm);
    for (Index x = 0; x < model.num_states(); ++x) {
        for (Index a : model.admissible(x)) {
            for (Index y = 0; y < model.num_states(); ++y) {
                const double r = model.rate(x, a, y);
                if (r > 0.0) raw.rates.push_back({model.states()[x], model.actions()[a], model.states()[y], r});
            }
            if (model.cost(x, a) > 0.0)
                raw.costs.push_back({model.states()[x], model.actions()[a], model.cost(x, a)});
        }
    }
    return raw;
}

double total_rate(const CtmdpModel& model, Index x, Index a) {
    if (x < 0 || x >= model.num_states()) fail("state index " + std::to_string(x) + " out of range");
    if (a < 0 || a >= model.num_actions() || !model.is_admissible(x, a))
        fail("inadmissible action index " + std::to_string(a) + " at state '" + model.states()[x] + "'");
    return model.total_rates_(x, a);
}

void validate_policy(const CtmdpModel& model, const StationaryPolicy& policy) {
    if (static_cast<Index>(policy.choice.size()) != model.num_states())
        fail("policy covers " + std::to_string(policy.choice.size()) + " states, model has " +
             std::to_string(model.num_states()));
    for (Index x = 0; x < model.num_states(); ++x) {
        const Index a = policy.choice[x];
        if (a < 0 || a >= model.num_actions() || !model.is_admissible(x, a))
            fail("policy chooses inadmissible action at state '" + model.states()[x] + "'");
    }
}

StationaryPolicy first_admissible_policy(const CtmdpModel& model) {
    StationaryPolicy p;
    for (Index x = 0; x < model.num_states(); ++x) p.choice.push_back(model.admissible(x).front());
    return p;
}

ExampleKind parse_example_kind(const std::string& name) {
    if (name == "two_state") return ExampleKind::two_state;
    if (name == "pure_birth") return ExampleKind::pure_birth;
    if (name == "birth_death") return ExampleKind::birth_death;
    if (name == "random") return ExampleKind::random;
    fail("unknown example kind '" + name + "'");
}

CtmdpModel gen_example(ExampleKind kind, const ExampleParams& p, std::uint64_t seed) {
    RawModel raw;
    switch (kind) {
    case ExampleKind::two_state: {
        require(std::isfinite(p.q) && p.q >= 0.0, "two_state needs finite q >= 0");
        require(std::isfinite(p.c) && p.c >= 0.0, "two_state needs finite c >= 0");
        raw.states = {"absorb", "work"};
        raw.actions = {"a0"};
        raw.rates.push_back({"work", "a0", "absorb", p.q});
        raw.costs.push_back({"work", "a0", p.c});
        break;
    }
    case ExampleKind::pure_birth: {
        require(p.N >= 1 && p.N <= 60, "pure_birth needs 1 <= N <= 60");
        require(std::isfinite(p.kappa) && p.kappa >= 0.0, "pure_birth needs finite kappa >= 0");
        raw.states = numbered("", p.N + 1);
        raw.actions = {"a0"};
        for (int k = 0; k < p.N; ++k) {
            raw.rates.push_back({raw.states[k], "a0", raw.states[k + 1], std::ldexp(1.0, k + 1)});
            raw.costs.push_back({raw.states[k], "a0", p.kappa});
        }
        break;
    }
    case ExampleKind::birth_death: {
        require(p.N >= 1 && p.N <= 64, "birth_death needs 1 <= N <= 64");
        require(std::isfinite(p.lambda) && p.lambda >= 0.0, "birth_death needs finite lambda >= 0");
        require(std::isfinite(p.mu) && p.mu > 0.0, "birth_death needs finite mu > 0");
        require(std::isfinite(p.cost) && p.cost >= 0.0, "birth_death needs finite cost >= 0");
        // State 0 is empty and absorbing. "slow" serves at mu for cost rate `cost`,
        // "fast" serves at 2 mu for twice the cost.
        raw.states = numbered("", p.N + 1);
        raw.actions = {"slow", "fast"};
        for (int k = 1; k <= p.N; ++k) {
            const auto& here = raw.states[k];
            raw.rates.push_back({here, "slow", raw.states[k - 1], p.mu});
            raw.rates.push_back({here, "fast", raw.states[k - 1], 2.0 * p.mu});
            if (k < p.N && p.lambda > 0.0) {
                raw.rates.push_back({here, "slow", raw.states[k + 1], p.lambda});
                raw.rates.push_back({here, "fast", raw.states[k + 1], p.lambda});
            }
            raw.costs.push_back({here, "slow", p.cost});
            raw.costs.push_back({here, "fast", 2.0 * p.cost});
        }
        break;
    }
    case ExampleKind::random: {
        require(p.n >= 2 && p.n <= 64, "random needs 2 <= n <= 64");
        require(p.m >= 1 && p.m <= 8, "random needs 1 <= m <= 8");
        require(std::isfinite(p.rate_scale) && p.rate_scale > 0.0, "random needs finite rate_scale > 0");
        require(std::isfinite(p.cost_scale) && p.cost_scale >= 0.0, "random needs finite cost_scale >= 0");
        require(p.density >= 0.0 && p.density <= 1.0, "random needs density in [0, 1]");
        std::mt19937_64 gen(seed);
        raw.states = numbered("s", p.n);
        raw.actions = numbered("a", p.m);
        // s0 absorbs at zero cost. Every other (x, a) has a positive rate to a
        // lower-indexed state, so s0 is reached under every policy.
        for (int x = 1; x < p.n; ++x) {
            for (int a = 0; a < p.m; ++a) {
                const int down = static_cast<int>(gen() % static_cast<std::uint64_t>(x));
                for (int y = 0; y < p.n; ++y) {
                    if (y == x) continue;
                    const double u = unit_uniform(gen);
                    const double r = unit_uniform(gen);
                    double rate = 0.0;
                    if (y == down)
                        rate = p.rate_scale * (0.5 + r);
                    else if (u < p.density)
                        rate = p.rate_scale * r;
                    if (rate > 0.0) raw.rates.push_back({raw.states[x], raw.actions[a], raw.states[y], rate});
                }
                const double c = p.cost_scale * unit_uniform(gen);
                if (c > 0.0) raw.costs.push_back({raw.states[x], raw.actions[a], c});
            }
        }
        break;
    }
    }
    return validate_model(raw);
}

}  // namespace rsmdp
