// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "fixtures.hpp"
#include "rsmdp/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace rsmdp;
using namespace rsmdp::testing;

namespace {

constexpr std::uint64_t kMcSeed = 20261015;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Random instances for the property criteria. Criterion 4 instances are kept
// within the oracle's strategy guard at horizon 4.
std::vector<CtmdpModel> monotone_instances() {
    std::vector<CtmdpModel> out;
    for (std::uint64_t seed = 0; seed < 200; ++seed) out.push_back(random_instance(100000 + seed, 8, 3));
    return out;
}

std::vector<CtmdpModel> oracle_instances() {
    std::vector<CtmdpModel> out;
    for (std::uint64_t seed = 0; out.size() < 50; ++seed) {
        CtmdpModel m = random_instance(200000 + seed, 4, 3);
        if (oracle_strategy_count(build_equivalent_dtmdp(m), 4) <= kOracleMaxStrategies) out.push_back(std::move(m));
    }
    return out;
}

Outcome closed_form_value() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const CtmdpModel m = two_state();
    const SolveReport r = solve_ctmdp(m);
    const Index work = m.state_index("work");
    const double lin = evaluate_policy_linear(build_equivalent_dtmdp(m), r.policy).value(work).value();
    const double elapsed = seconds_since(t0);
    const double vi = r.value(work).value();
    o.require(r.converged, "value iteration converged");
    o.require(std::abs(vi - kTwoStateValue) <= 1e-9, "solve within 1e-9");
    o.require(std::abs(lin - kTwoStateValue) <= 1e-12, "linear evaluation within 1e-12");
    o.require(elapsed < 0.1, "runtime < 0.1 s");
    o.detail << "V(work) solve err " << std::abs(vi - kTwoStateValue) << ", linear err "
             << std::abs(lin - kTwoStateValue) << ", " << elapsed << " s";
    return o;
}

Outcome explosive_fixture() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const CtmdpModel m = pure_birth();
    const DtmdpModel d = build_equivalent_dtmdp(m);
    const SolveReport r = solve_ctmdp(m);
    const double vi = r.value(0).value();
    const double lin = evaluate_policy_linear(d, r.policy).value(0).value();
    const double it = evaluate_policy_iterative(d, r.policy)(0).value();
    McOptions opts;
    opts.n = 100000;
    opts.master_seed = kMcSeed;
    const McEstimate mc = estimate_value_mc(m, r.policy, 0, opts);
    const double elapsed = seconds_since(t0);
    o.require(std::abs(vi - kPureBirthValue) <= 1e-8, "value iteration within 1e-8");
    o.require(std::abs(lin - kPureBirthValue) <= 1e-8, "linear evaluation within 1e-8");
    o.require(std::abs(it - kPureBirthValue) <= 1e-8, "iterative evaluation within 1e-8");
    o.require(mc.std_error.has_value(), "MC standard error available");
    const double z = mc.std_error ? std::abs(mc.mean.value() - kPureBirthValue) / *mc.std_error : INFINITY;
    o.require(z <= 3.0, "MC within 3 std errors");
    o.require(elapsed < 5.0, "runtime < 5 s");
    o.detail << "V(0) vi/lin/iter errs " << std::abs(vi - kPureBirthValue) << "/" << std::abs(lin - kPureBirthValue)
             << "/" << std::abs(it - kPureBirthValue) << ", MC " << mc.mean.value() << " (" << z << " SE), "
             << elapsed << " s";
    return o;
}

Outcome monotone_value_iteration(const std::vector<CtmdpModel>& models) {
    Outcome o;
    long violations = 0, sweeps = 0;
    for (const auto& m : models) {
        const DtmdpModel d = build_equivalent_dtmdp(m);
        ValueFunction prev = ValueFunction::ones(m.num_states());
        SolveOptions opts;
        opts.on_sweep = [&](long, const ValueFunction& v) {
            ++sweeps;
            for (Index x = 0; x < v.size(); ++x)
                if (v(x) < prev(x)) ++violations;
            prev = v;
        };
        const SolveReport r = value_iterate(d, opts);
        o.require(r.converged, "value iteration converged");
        violations += r.monotone_violations;
    }
    o.require(violations == 0, "no decreasing component");
    o.detail << models.size() << " instances, " << sweeps << " sweeps, " << violations << " violations";
    return o;
}

Outcome oracle_equivalence(const std::vector<CtmdpModel>& models) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const auto& m : models) {
        const DtmdpModel d = build_equivalent_dtmdp(m);
        std::vector<ValueFunction> sweeps;
        SolveOptions opts;
        opts.max_iters = 4;
        opts.on_sweep = [&](long, const ValueFunction& v) { sweeps.push_back(v); };
        value_iterate(d, opts);
        for (int h = 1; h <= 4; ++h) {
            if (static_cast<int>(sweeps.size()) < h) {
                o.require(false, "value iteration stopped before sweep 4");
                break;
            }
            const ValueFunction brute = finite_horizon_oracle(d, h);
            for (Index x = 0; x < m.num_states(); ++x) {
                const ExtReal a = sweeps[h - 1](x), b = brute(x);
                if (a.is_infinite() || b.is_infinite()) {
                    o.require(a == b, "infinite classification matches");
                    continue;
                }
                worst = std::max(worst, std::abs(a.value() - b.value()));
            }
        }
    }
    const double elapsed = seconds_since(t0);
    o.require(worst <= 1e-10, "sweeps match brute force within 1e-10");
    o.require(elapsed < 60.0, "runtime < 60 s");
    o.detail << models.size() << " instances, max |sweep - oracle| " << worst << ", " << elapsed << " s";
    return o;
}

Outcome optimality_residual_check(const std::vector<CtmdpModel>& models) {
    Outcome o;
    double worst = 0.0;
    for (const auto& m : models) {
        const SolveReport r = solve_ctmdp(m);
        o.require(r.converged, "value iteration converged");
        worst = std::max(worst, r.sup_residual);
    }
    o.require(worst <= 1e-8, "sup residual <= 1e-8");
    o.detail << models.size() << " models, max sup residual " << worst;
    return o;
}

Outcome policy_verification(const std::vector<CtmdpModel>& models) {
    Outcome o;
    const SolveOptions opts;
    double worst = 0.0;
    for (const auto& m : models) {
        const DtmdpModel d = build_equivalent_dtmdp(m);
        const SolveReport r = solve_ctmdp(m, opts);
        const ValueFunction lin = evaluate_policy_linear(d, r.policy, opts).value;
        for (Index x = 0; x < m.num_states(); ++x) {
            if (lin(x).is_infinite() || r.value(x).is_infinite()) {
                o.require(lin(x) == r.value(x), "identical infinite classification");
                continue;
            }
            worst = std::max(worst, std::abs(lin(x).value() - r.value(x).value()) / r.value(x).value());
        }
    }
    o.require(worst <= 10 * opts.tol, "relative gap <= 10 tol");
    o.detail << models.size() << " instances, max relative gap " << worst << " (10 tol = " << 10 * opts.tol << ")";
    return o;
}

Outcome infinite_classification() {
    Outcome o;
    const CtmdpModel trap = costly_trap();
    const SolveReport r = solve_ctmdp(trap);
    o.require(r.value(trap.state_index("trap")).is_infinite(), "costly trap is inf");
    o.require(r.value(trap.state_index("exit")) == ExtReal(1.0), "free absorbing state is 1");

    ExampleParams p;
    p.cost = 0.0;
    for (const CtmdpModel& m : {gen_example(ExampleKind::birth_death, p, 0), all_absorbing()}) {
        long first_sweep_ones = -1;
        SolveOptions opts;
        opts.on_sweep = [&](long sweep, const ValueFunction& v) {
            if (sweep == 1) first_sweep_ones = v == ValueFunction::ones(m.num_states());
        };
        const SolveReport z = value_iterate(build_equivalent_dtmdp(m), opts);
        o.require(first_sweep_ones == 1, "zero-cost model is 1 after one sweep");
        o.require(z.value == ValueFunction::ones(m.num_states()) && z.iterations == 1, "stops at V = 1");
    }
    o.detail << "trap V = " << r.value(0) << ", zero-cost models exactly 1 after 1 sweep";
    return o;
}

Outcome supersolution_minimality() {
    Outcome o;
    int scaled_pass = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const CtmdpModel m = random_instance(300000 + seed, 8, 3);
        const SolveReport r = solve_ctmdp(m);
        const ValueFunction& v = r.value;
        o.require(check_supersolution(m, v, v), "V* passes");

        ValueFunction scaled = v;
        for (auto& x : scaled.values) x *= ExtReal(1.5);
        bool nonnegative = true;
        for (const auto& res : optimality_residual(m, scaled))
            if (res && *res < -1e-8) nonnegative = false;
        const bool passes = check_supersolution(m, scaled, v);
        o.require(passes == nonnegative, "1.5 V* passes exactly when its residual is nonnegative");
        scaled_pass += passes;

        for (Index x = 0; x < m.num_states(); ++x) {
            if (v(x).is_infinite()) continue;
            for (double eps : {1e-12, 1e-3, 0.5}) {
                ValueFunction lowered = v;
                lowered[x] = ExtReal(v(x).value() - eps);
                o.require(!check_supersolution(m, lowered, v), "V* minus a constant fails domination");
            }
        }
    }
    o.detail << "20 instances, 1.5 V* passed on " << scaled_pass;
    return o;
}

Outcome mc_cross_validation() {
    Outcome o;
    const CtmdpModel m = two_state();
    const DtmdpModel d = build_equivalent_dtmdp(m);
    const StationaryPolicy p = first_admissible_policy(m);
    const Index work = m.state_index("work");
    McOptions opts;
    opts.n = 100000;
    opts.master_seed = kMcSeed;
    std::ostringstream& out = o.detail;
    using Estimator = std::function<McEstimate(const McOptions&)>;
    const std::pair<const char*, Estimator> estimators[] = {
        {"ctmdp", [&](const McOptions& op) { return estimate_value_mc(m, p, work, op); }},
        {"dtmdp", [&](const McOptions& op) { return estimate_dtmdp_value_mc(d, p, work, op); }},
    };
    for (const auto& [name, estimate] : estimators) {
        opts.workers = 1;
        const McEstimate base = estimate(opts);
        o.require(base.std_error.has_value(), "standard error available");
        const double z = base.std_error ? std::abs(base.mean.value() - kTwoStateValue) / *base.std_error : INFINITY;
        o.require(z <= 3.0, std::string(name) + " within 3 std errors");
        for (unsigned w : {2u, 8u}) {
            opts.workers = w;
            const McEstimate e = estimate(opts);
            o.require(bit_equal(e.mean.value(), base.mean.value()) && e.std_error && base.std_error &&
                          bit_equal(*e.std_error, *base.std_error),
                      std::string(name) + " bit-identical across workers");
        }
        out << name << " " << base.mean.value() << " (" << z << " SE); ";
    }
    out << "identical for 1/2/8 workers";
    return o;
}

Outcome extreal_algebra() {
    Outcome o;
    const ExtReal zero = ExtReal::zero(), one = ExtReal::one(), inf = ExtReal::infinity();
    o.require(zero * inf == zero && inf * zero == zero, "0 * inf = 0");
    o.require(zero / zero == zero, "0 / 0 = 0");
    o.require(one / zero == inf, "1 / 0 = inf");
    o.require(ext_sub_clamped(inf, inf) == inf, "inf - inf = inf");
    o.require(inf + one == inf && inf * ExtReal(2.0) == inf, "inf absorbs");
    o.require(ext_exp(inf) == inf && ext_exp(zero) == one, "exp endpoints");
    bool threw = false;
    try {
        (void)(inf / inf);
    } catch (const ExtRealDomainError&) {
        threw = true;
    }
    o.require(threw, "inf / inf rejected");
    threw = false;
    try {
        (void)ExtReal(-1.0);
    } catch (const ExtRealDomainError&) {
        threw = true;
    }
    o.require(threw, "negative rejected");

    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    auto draw = [&] {
        const auto k = gen() % 10;
        return k == 0 ? inf : k == 1 ? zero : ExtReal(u(gen));
    };
    int pairs = 0;
    for (; pairs < 10000; ++pairs) {
        ExtReal a = draw(), b = draw();
        const ExtReal c = draw();
        if (b < a) std::swap(a, b);
        bool ok = a + c <= b + c && a * c <= b * c && ext_exp(a) <= ext_exp(b);
        if (c.is_finite() && c > zero) ok = ok && a / c <= b / c;
        o.require(ok, "monotone in each argument");
    }
    o.detail << "conventions exact, " << pairs << " monotonicity pairs";
    return o;
}

}  // namespace

int main() {
    const std::vector<CtmdpModel> monotone = monotone_instances();
    const std::vector<CtmdpModel> oracle = oracle_instances();

    std::vector<CtmdpModel> residual_models = {two_state(), pure_birth(), gen_example(ExampleKind::birth_death, {}, 0),
                                               two_action_variant(), costly_trap(), all_absorbing()};
    residual_models.insert(residual_models.end(), monotone.begin(), monotone.end());
    residual_models.insert(residual_models.end(), oracle.begin(), oracle.end());

    std::vector<CtmdpModel> verification = monotone;
    verification.insert(verification.end(), oracle.begin(), oracle.end());

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"closed-form value on TWO_STATE", closed_form_value},
        {"explosive PURE_BIRTH fixture", explosive_fixture},
        {"monotone value iteration", [&] { return monotone_value_iteration(monotone); }},
        {"finite-horizon oracle equivalence", [&] { return oracle_equivalence(oracle); }},
        {"optimality-equation residual on the CTMDP", [&] { return optimality_residual_check(residual_models); }},
        {"policy verification", [&] { return policy_verification(verification); }},
        {"infinite-value classification", infinite_classification},
        {"supersolution minimality", supersolution_minimality},
        {"Monte Carlo cross-validation", mc_cross_validation},
        {"ExtReal algebra", extreal_algebra},
    };

    int failures = 0;
    int id = 1;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("%s criterion %d: %s | %s\n", o.pass ? "PASS" : "FAIL", id++, name, o.detail.str().c_str());
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
