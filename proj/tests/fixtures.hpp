#pragma once

#include "rsmdp/ctmdp_model.hpp"
#include "rsmdp/dtmdp_solver.hpp"
#include "rsmdp/reduction.hpp"

#include <cstdint>
#include <random>

namespace rsmdp::testing {

// Closed forms from the moment generating function of an exponential
// holding time, E e^{c theta} = q / (q - c) for theta ~ Exp(q) and c < q.
// Checked against numerical quadrature when the tests were written.
inline constexpr double kTwoStateValue = 4.0 / 3.0;           // TWO_STATE(q=4, c=1)
inline constexpr double kTwoStateVariance = 2.0 / 9.0;        // E e^{2 theta} - (4/3)^2 = 2 - 16/9
inline constexpr double kPureBirthValue = 1024.0 / 315.0;     // 2 * 4/3 * 8/7 * 16/15

inline CtmdpModel two_state(double q = 4.0, double c = 1.0) {
    ExampleParams p;
    p.q = q;
    p.c = c;
    return gen_example(ExampleKind::two_state, p, 0);
}

inline CtmdpModel pure_birth(int N = 4, double kappa = 1.0) {
    ExampleParams p;
    p.N = N;
    p.kappa = kappa;
    return gen_example(ExampleKind::pure_birth, p, 0);
}

/// Random instance with sizes drawn from the seed: 2..max_states states, 1..max_actions actions.
inline CtmdpModel random_instance(std::uint64_t seed, int max_states, int max_actions, double cost_scale = 0.5) {
    std::mt19937_64 gen(seed ^ 0x5DEECE66DULL);
    ExampleParams p;
    p.n = 2 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_states - 1));
    p.m = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_actions));
    p.cost_scale = cost_scale;
    return gen_example(ExampleKind::random, p, seed);
}

/// Every state absorbing at zero cost.
inline CtmdpModel all_absorbing(int n = 3) {
    RawModel raw;
    for (int i = 0; i < n; ++i) raw.states.push_back("z" + std::to_string(i));
    raw.actions = {"a0", "a1"};
    return validate_model(raw);
}

inline CtmdpModel from_raw(RawModel raw) { return validate_model(raw); }

/// TWO_STATE with a second action at `work`: "fast" (rate 4, cost 1) and "slow" (rate 2, cost 1).
inline CtmdpModel two_action_variant() {
    RawModel raw;
    raw.states = {"absorb", "work"};
    raw.actions = {"slow", "fast"};
    raw.rates = {{"work", "slow", "absorb", 2.0}, {"work", "fast", "absorb", 4.0}};
    raw.costs = {{"work", "slow", 1.0}, {"work", "fast", 1.0}};
    return validate_model(raw);
}

/// One state paying cost rate k forever.
inline CtmdpModel costly_trap(double k = 2.0) {
    RawModel raw;
    raw.states = {"trap", "exit"};
    raw.actions = {"a0"};
    raw.admissible = std::map<std::string, std::vector<std::string>>{{"trap", {"a0"}}};
    raw.costs = {{"trap", "a0", k}};
    return validate_model(raw);
}

}  // namespace rsmdp::testing
