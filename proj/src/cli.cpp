#include "rsmdp/cli.hpp"

#include "rsmdp/ctmdp_model.hpp"
#include "rsmdp/dtmdp_solver.hpp"
#include "rsmdp/io.hpp"
#include "rsmdp/reduction.hpp"
#include "rsmdp/simulator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace rsmdp {

namespace {

// Path length limits for `simulate`; the flag set is fixed, so these are not configurable.
constexpr long kSimulateMaxJumps = 10000;
constexpr long kSimulateMaxSteps = 1000000;

SolveOptions solve_options(const RunConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw ModelError("--tol must be > 0");
    if (!(cfg.cap > 1.0)) throw ModelError("--cap must be > 1");
    if (cfg.max_iters < 1) throw ModelError("--max-iters must be >= 1");
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iters = cfg.max_iters;
    opts.cap = cfg.cap;
    return opts;
}

CtmdpModel load_model(const RunConfig& cfg) {
    if (cfg.model_path.empty()) throw ModelError("a model file is required");
    return model_from_json(read_json_file(cfg.model_path));
}

ExampleParams params_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(std::string("--params is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ModelError("--params must be a JSON object");
    ExampleParams p;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw ModelError("--params: \"" + key + "\" must be a number");
        const double v = value.get<double>();
        auto as_int = [&] {
            if (v != std::floor(v) || std::abs(v) > 1e6) throw ModelError("--params: \"" + key + "\" must be an integer");
            return static_cast<int>(v);
        };
        if (key == "q") p.q = v;
        else if (key == "c") p.c = v;
        else if (key == "N") p.N = as_int();
        else if (key == "kappa") p.kappa = v;
        else if (key == "lambda") p.lambda = v;
        else if (key == "mu") p.mu = v;
        else if (key == "cost") p.cost = v;
        else if (key == "n") p.n = as_int();
        else if (key == "m") p.m = as_int();
        else if (key == "rate_scale") p.rate_scale = v;
        else if (key == "cost_scale") p.cost_scale = v;
        else if (key == "density") p.density = v;
        else throw ModelError("--params: unknown key \"" + key + "\"");
    }
    return p;
}

// Largest |a - b| where both are finite; sets `agree` false if inf-classification differs.
double max_discrepancy(const ValueFunction& a, const ValueFunction& b, bool& agree) {
    double d = 0.0;
    agree = true;
    for (Index x = 0; x < a.size(); ++x) {
        if (a(x).is_infinite() != b(x).is_infinite()) {
            agree = false;
            continue;
        }
        if (a(x).is_finite()) d = std::max(d, std::abs(a(x).value() - b(x).value()));
    }
    return d;
}

StationaryPolicy policy_for(const RunConfig& cfg, const CtmdpModel& model) {
    if (cfg.policy_path) return policy_from_json(read_json_file(*cfg.policy_path), model);
    return solve_ctmdp(model, solve_options(cfg)).policy;
}

int cmd_validate(const RunConfig& cfg, Json& report) {
    report = model_to_json(load_model(cfg));
    return kOk;
}

int cmd_reduce(const RunConfig& cfg, Json& report) {
    report = dtmdp_to_json(build_equivalent_dtmdp(load_model(cfg)));
    return kOk;
}

int cmd_solve(const RunConfig& cfg, Json& report, std::ostream& err) {
    const CtmdpModel model = load_model(cfg);
    const SolveReport result = solve_ctmdp(model, solve_options(cfg));
    report = solve_report_to_json(result, model);
    if (!result.converged) {
        err << "value iteration did not converge in " << result.iterations << " sweeps\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg, Json& report) {
    const CtmdpModel model = load_model(cfg);
    if (!cfg.policy_path) throw ModelError("evaluate needs --policy");
    const StationaryPolicy policy = policy_from_json(read_json_file(*cfg.policy_path), model);
    const DtmdpModel reduced = build_equivalent_dtmdp(model);
    const SolveOptions opts = solve_options(cfg);
    const LinearEvaluation linear = evaluate_policy_linear(reduced, policy, opts);
    const ValueFunction iterative = evaluate_policy_iterative(reduced, policy, opts);
    bool agree = true;
    const double gap = max_discrepancy(linear.value, iterative, agree);

    report["policy"] = policy_to_json(policy, model.states(), model.actions());
    report["linear"] = {{"value", value_to_json(linear.value, model.states())},
                        {"used_fallback", linear.used_fallback},
                        {"diagnostics", linear.diagnostics}};
    report["iterative"] = {{"value", value_to_json(iterative, model.states())}};
    report["max_discrepancy"] = gap;
    report["classification_agrees"] = agree;
    return kOk;
}

int cmd_simulate(const RunConfig& cfg, Json& report) {
    const CtmdpModel model = load_model(cfg);
    if (cfg.n_trajectories < 1) throw ModelError("--n must be >= 1");
    const StationaryPolicy policy = policy_for(cfg, model);
    const DtmdpModel reduced = build_equivalent_dtmdp(model);
    const ValueFunction evaluated = evaluate_policy_linear(reduced, policy, solve_options(cfg)).value;

    McOptions opts;
    opts.n = cfg.n_trajectories;
    opts.master_seed = cfg.seed;
    report["policy"] = policy_to_json(policy, model.states(), model.actions());
    report["estimates"] = Json::object();
    for (Index x = 0; x < model.num_states(); ++x) {
        opts.max_jumps = kSimulateMaxJumps;
        const McEstimate ct = estimate_value_mc(model, policy, x, opts);
        opts.max_jumps = kSimulateMaxSteps;
        const McEstimate dt = estimate_dtmdp_value_mc(reduced, policy, x, opts);

        Json entry;
        entry["evaluated"] = extreal_to_json(evaluated(x));
        for (const auto& [name, est] : {std::pair{"ctmdp", ct}, std::pair{"dtmdp", dt}}) {
            Json e = mc_estimate_to_json(est);
            if (est.mean.is_finite() && evaluated(x).is_finite()) {
                const double dev = est.mean.value() - evaluated(x).value();
                e["deviation"] = dev;
                e["deviation_std_errors"] =
                    est.std_error && *est.std_error > 0.0 ? Json(dev / *est.std_error) : Json(nullptr);
            } else {
                e["deviation"] = nullptr;
                e["deviation_std_errors"] = nullptr;
            }
            entry[name] = std::move(e);
        }
        report["estimates"][model.states()[x]] = std::move(entry);
    }
    return kOk;
}

int cmd_oracle(const RunConfig& cfg, Json& report, std::ostream& err) {
    const CtmdpModel model = load_model(cfg);
    if (!cfg.horizon) throw ModelError("oracle needs --horizon");
    const int horizon = *cfg.horizon;
    if (horizon < 0 || horizon > kOracleMaxHorizon)
        throw ModelError("--horizon must be in [0, " + std::to_string(kOracleMaxHorizon) + "]");
    const DtmdpModel reduced = build_equivalent_dtmdp(model);

    double worst = 0.0;
    Json rows = Json::array();
    ValueFunction sweep = ValueFunction::ones(reduced.num_states());
    for (int h = 1; h <= horizon; ++h) {
        sweep = bellman_apply(reduced, sweep).first;
        const ValueFunction brute = finite_horizon_oracle(reduced, h);
        double gap = 0.0;
        for (Index x = 0; x < reduced.num_states(); ++x)
            gap = std::max(gap, std::abs(sweep(x).value() - brute(x).value()));
        worst = std::max(worst, gap);
        rows.push_back({{"horizon", h},
                        {"value_iteration", value_to_json(sweep, model.states())},
                        {"oracle", value_to_json(brute, model.states())},
                        {"max_discrepancy", gap}});
    }
    report["horizon"] = horizon;
    report["sweeps"] = std::move(rows);
    report["max_discrepancy"] = worst;
    if (worst > kOracleMismatchTolerance) {
        err << "oracle mismatch: " << worst << " exceeds " << kOracleMismatchTolerance << "\n";
        return kOracleMismatch;
    }
    return kOk;
}

int cmd_gen(const RunConfig& cfg, Json& report) {
    report = model_to_json(gen_example(parse_example_kind(cfg.kind), params_from_json(cfg.params), cfg.seed));
    return kOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Json report;
    int status = kOk;
    try {
        switch (cfg.command) {
        case Command::validate: status = cmd_validate(cfg, report); break;
        case Command::reduce: status = cmd_reduce(cfg, report); break;
        case Command::solve: status = cmd_solve(cfg, report, err); break;
        case Command::evaluate: status = cmd_evaluate(cfg, report); break;
        case Command::simulate: status = cmd_simulate(cfg, report); break;
        case Command::oracle: status = cmd_oracle(cfg, report, err); break;
        case Command::gen: status = cmd_gen(cfg, report); break;
        }
    } catch (const std::exception& e) {
        // ModelError, OracleGuardError and ExtReal domain errors all mean bad input here.
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    const std::string text = dump_json(report);
    if (cfg.output_path) {
        std::ofstream file(*cfg.output_path);
        if (!file || !(file << text)) {
            err << "error: cannot write '" << *cfg.output_path << "'\n";
            return kInputError;
        }
    } else {
        out << text;
    }
    return status;
}

std::optional<int> parse_command_line(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out,
                                      std::ostream& err) {
    CLI::App app{"Risk-sensitive CTMDP solver with exponential utility of total cost"};
    app.require_subcommand(1);

    std::string policy, output;
    int horizon = -1;
    auto common = [&](CLI::App* sub, bool needs_model) {
        if (needs_model) sub->add_option("model", cfg.model_path, "Model file (JSON)")->required();
        sub->add_option("--out", output, "Write the report here instead of standard output");
    };
    auto solver_flags = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "Relative stopping tolerance")->capture_default_str();
        sub->add_option("--max-iters", cfg.max_iters, "Sweep limit")->capture_default_str();
        sub->add_option("--cap", cfg.cap, "Values above this that keep growing are classified inf")
            ->capture_default_str();
    };

    struct Entry {
        const char* name;
        Command command;
        const char* help;
    };
    const Entry entries[] = {
        {"validate", Command::validate, "Validate a model and print it in normal form"},
        {"reduce", Command::reduce, "Print the equivalent discrete-time model"},
        {"solve", Command::solve, "Value iteration, optimal policy and optimality residual"},
        {"evaluate", Command::evaluate, "Evaluate a policy by linear solve and by iteration"},
        {"simulate", Command::simulate, "Monte Carlo estimates of a policy's value from every state"},
        {"oracle", Command::oracle, "Compare value-iteration sweeps with brute-force enumeration"},
        {"gen", Command::gen, "Write a fixture model"},
    };
    std::vector<std::pair<CLI::App*, Command>> subs;
    for (const auto& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        subs.emplace_back(sub, e.command);
        common(sub, e.command != Command::gen);
        switch (e.command) {
        case Command::solve:
            solver_flags(sub);
            break;
        case Command::evaluate:
            solver_flags(sub);
            sub->add_option("--policy", policy, "Policy file (JSON)")->required();
            break;
        case Command::simulate:
            solver_flags(sub);
            sub->add_option("--policy", policy, "Policy file (JSON); defaults to the optimal policy");
            sub->add_option("--n", cfg.n_trajectories, "Trajectories per state")->capture_default_str();
            sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
            break;
        case Command::oracle:
            sub->add_option("--horizon", horizon, "Largest horizon to check")->required();
            break;
        case Command::gen:
            sub->add_option("--kind", cfg.kind, "two_state | pure_birth | birth_death | random")
                ->capture_default_str();
            sub->add_option("--params", cfg.params, "Generator parameters as a JSON object");
            sub->add_option("--seed", cfg.seed, "Seed for random instances")->capture_default_str();
            break;
        default:
            break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }
    for (const auto& [sub, command] : subs)
        if (sub->parsed()) cfg.command = command;
    if (!policy.empty()) cfg.policy_path = policy;
    if (!output.empty()) cfg.output_path = output;
    if (horizon >= 0 || cfg.command == Command::oracle) cfg.horizon = horizon;
    return std::nullopt;
}

}  // namespace rsmdp
