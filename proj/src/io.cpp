#include "rsmdp/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rsmdp {

namespace {

[[noreturn]] void schema(const std::string& what) { throw ModelError("schema: " + what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) schema(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema(where + " is missing \"" + key + "\"");
    return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_string()) schema(where + ".\"" + key + "\" must be a string");
    return v.get<std::string>();
}

double number_field(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_number()) schema(where + ".\"" + key + "\" must be a number");
    return v.get<double>();
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
    if (!j.is_array()) schema(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) schema(where + " must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

const Json& array_or_empty(const Json& obj, const char* key, const std::string& where) {
    static const Json empty = Json::array();
    auto it = obj.find(key);
    if (it == obj.end()) return empty;
    if (!it->is_array()) schema(where + ".\"" + key + "\" must be an array");
    return *it;
}

std::optional<std::map<std::string, std::vector<std::string>>> admissible_from_json(const Json& j) {
    auto it = j.find("admissible");
    if (it == j.end()) return std::nullopt;
    if (!it->is_object()) schema("\"admissible\" must be an object");
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [state, acts] : it->items())
        out[state] = string_list(acts, "admissible[\"" + state + "\"]");
    return out;
}

Json admissible_to_json(const std::vector<std::string>& states, const std::vector<std::string>& actions,
                        const std::vector<std::vector<Index>>& admissible) {
    Json adm = Json::object();
    for (std::size_t x = 0; x < states.size(); ++x) {
        Json names = Json::array();
        for (Index a : admissible[x]) names.push_back(actions[a]);
        adm[states[x]] = std::move(names);
    }
    return adm;
}

bool restricted(const std::vector<std::vector<Index>>& admissible, std::size_t num_actions) {
    for (const auto& adm : admissible)
        if (adm.size() != num_actions) return true;
    return false;
}

}  // namespace

Json extreal_to_json(ExtReal x) {
    if (x.is_infinite()) return "inf";
    return x.value();
}

ExtReal extreal_from_json(const Json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return ExtReal::infinity();
    if (!j.is_number()) schema("expected a number or \"inf\"");
    const double v = j.get<double>();
    if (v < 0.0) schema("expected a nonnegative value");
    return ExtReal(v);
}

RawModel raw_model_from_json(const Json& j) {
    if (!j.is_object()) schema("model must be a JSON object");
    RawModel raw;
    raw.states = string_list(field(j, "states", "model"), "\"states\"");
    raw.actions = string_list(field(j, "actions", "model"), "\"actions\"");
    raw.admissible = admissible_from_json(j);
    std::size_t k = 0;
    for (const auto& e : array_or_empty(j, "rates", "model")) {
        const std::string where = "rates[" + std::to_string(k++) + "]";
        raw.rates.push_back({string_field(e, "from", where), string_field(e, "action", where),
                             string_field(e, "to", where), number_field(e, "rate", where)});
    }
    k = 0;
    for (const auto& e : array_or_empty(j, "costs", "model")) {
        const std::string where = "costs[" + std::to_string(k++) + "]";
        raw.costs.push_back(
            {string_field(e, "state", where), string_field(e, "action", where), number_field(e, "rate", where)});
    }
    return raw;
}

Json raw_model_to_json(const RawModel& raw) {
    Json j;
    j["states"] = raw.states;
    j["actions"] = raw.actions;
    if (raw.admissible) {
        Json adm = Json::object();
        for (const auto& s : raw.states) {
            auto it = raw.admissible->find(s);
            if (it != raw.admissible->end()) adm[s] = it->second;
        }
        j["admissible"] = std::move(adm);
    }
    j["rates"] = Json::array();
    for (const auto& e : raw.rates)
        j["rates"].push_back({{"from", e.from}, {"action", e.action}, {"to", e.to}, {"rate", e.rate}});
    j["costs"] = Json::array();
    for (const auto& e : raw.costs)
        j["costs"].push_back({{"state", e.state}, {"action", e.action}, {"rate", e.rate}});
    return j;
}

CtmdpModel model_from_json(const Json& j) { return validate_model(raw_model_from_json(j)); }

Json model_to_json(const CtmdpModel& model) { return raw_model_to_json(to_raw(model)); }

StationaryPolicy policy_from_json(const Json& j, const CtmdpModel& model) {
    const Json& map = field(j, "policy", "policy file");
    if (!map.is_object()) schema("\"policy\" must be an object");
    StationaryPolicy policy{std::vector<Index>(model.num_states(), -1)};
    for (const auto& [state, action] : map.items()) {
        if (!action.is_string()) schema("policy[\"" + state + "\"] must be an action name");
        policy.choice[model.state_index(state)] = model.action_index(action.get<std::string>());
    }
    for (Index x = 0; x < model.num_states(); ++x)
        if (policy.choice[x] < 0) throw ModelError("policy has no action for state '" + model.states()[x] + "'");
    validate_policy(model, policy);
    return policy;
}

Json policy_to_json(const StationaryPolicy& policy, const std::vector<std::string>& states,
                    const std::vector<std::string>& actions) {
    Json map = Json::object();
    for (std::size_t x = 0; x < states.size(); ++x) map[states[x]] = actions.at(policy.choice.at(x));
    return map;
}

Json dtmdp_to_json(const DtmdpModel& model) {
    Json j;
    j["states"] = model.states;
    j["actions"] = model.actions;
    if (restricted(model.admissible, model.actions.size()))
        j["admissible"] = admissible_to_json(model.states, model.actions, model.admissible);
    j["kernel"] = Json::array();
    j["log_cost"] = Json::array();
    for (Index x = 0; x < model.num_states(); ++x) {
        for (Index a : model.admissible[x]) {
            const auto& from = model.states[x];
            const auto& act = model.actions[a];
            for (Index y = 0; y < model.num_states(); ++y)
                if (model.p(x, a, y) > 0.0)
                    j["kernel"].push_back({{"from", from}, {"action", act}, {"to", model.states[y]}, {"p", model.p(x, a, y)}});
            const auto row = model.log_cost[a].row(x);
            if ((row.array() == row(0)).all()) {
                if (row(0) > 0.0) j["log_cost"].push_back({{"state", from}, {"action", act}, {"value", row(0)}});
            } else {
                for (Index y = 0; y < model.num_states(); ++y)
                    if (row(y) > 0.0)
                        j["log_cost"].push_back(
                            {{"state", from}, {"action", act}, {"to", model.states[y]}, {"value", row(y)}});
            }
        }
    }
    return j;
}

DtmdpModel dtmdp_from_json(const Json& j) {
    if (!j.is_object()) schema("DTMDP must be a JSON object");
    DtmdpModel m;
    m.states = string_list(field(j, "states", "DTMDP"), "\"states\"");
    m.actions = string_list(field(j, "actions", "DTMDP"), "\"actions\"");
    // Reuse the CTMDP name checks for states, actions and admissible sets.
    RawModel names;
    names.states = m.states;
    names.actions = m.actions;
    names.admissible = admissible_from_json(j);
    const CtmdpModel shape = validate_model(names);
    const Index n = shape.num_states();
    for (Index x = 0; x < n; ++x) m.admissible.push_back(shape.admissible(x));
    m.kernel.assign(m.actions.size(), Eigen::MatrixXd::Zero(n, n));
    m.log_cost.assign(m.actions.size(), Eigen::MatrixXd::Zero(n, n));

    std::size_t k = 0;
    for (const auto& e : array_or_empty(j, "kernel", "DTMDP")) {
        const std::string where = "kernel[" + std::to_string(k++) + "]";
        const Index x = shape.state_index(string_field(e, "from", where));
        const Index a = shape.action_index(string_field(e, "action", where));
        const Index y = shape.state_index(string_field(e, "to", where));
        m.kernel[a](x, y) = number_field(e, "p", where);
    }
    k = 0;
    for (const auto& e : array_or_empty(j, "log_cost", "DTMDP")) {
        const std::string where = "log_cost[" + std::to_string(k++) + "]";
        const Index x = shape.state_index(string_field(e, "state", where));
        const Index a = shape.action_index(string_field(e, "action", where));
        const double v = number_field(e, "value", where);
        if (e.contains("to"))
            m.log_cost[a](x, shape.state_index(string_field(e, "to", where))) = v;
        else
            m.log_cost[a].row(x).setConstant(v);
    }
    validate_dtmdp(m);
    return m;
}

Json value_to_json(const ValueFunction& v, const std::vector<std::string>& states) {
    Json j = Json::object();
    for (std::size_t x = 0; x < states.size(); ++x) j[states[x]] = extreal_to_json(v.values.at(x));
    return j;
}

Json solve_report_to_json(const SolveReport& report, const CtmdpModel& model) {
    Json j;
    j["value"] = value_to_json(report.value, model.states());
    j["policy"] = policy_to_json(report.policy, model.states(), model.actions());
    j["iterations"] = report.iterations;
    j["sup_residual"] = report.sup_residual;
    j["infinite_states"] = Json::array();
    for (Index x : report.infinite_states) j["infinite_states"].push_back(model.states()[x]);
    j["converged"] = report.converged;
    j["monotone_violations"] = report.monotone_violations;
    return j;
}

Json mc_estimate_to_json(const McEstimate& est) {
    Json j;
    j["mean"] = extreal_to_json(est.mean);
    j["std_error"] = est.std_error ? Json(*est.std_error) : Json(nullptr);
    j["n"] = est.n_trajectories;
    j["truncated_fraction"] = est.truncated_fraction;
    j["lower_bound_mean"] = std::isfinite(est.lower_bound_mean) ? Json(est.lower_bound_mean) : Json("inf");
    j["seed"] = est.seed;
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot read file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace rsmdp
