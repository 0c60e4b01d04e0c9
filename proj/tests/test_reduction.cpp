#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rsmdp;
using namespace rsmdp::testing;

namespace {

TEST(UniformizationWeight, Fixtures) {
    const CtmdpModel ts = two_state();
    const Eigen::VectorXd w = uniformization_weight(ts);
    EXPECT_EQ(w(ts.state_index("work")), 6.0);
    EXPECT_EQ(w(ts.state_index("absorb")), 1.0);

    const CtmdpModel pb = pure_birth();
    EXPECT_EQ(uniformization_weight(pb)(pb.state_index("2")), 10.0);

    EXPECT_TRUE(uniformization_weight(all_absorbing()).isOnes());
}

TEST(BuildEquivalentDtmdp, TwoState) {
    const CtmdpModel ts = two_state();
    const DtmdpModel d = build_equivalent_dtmdp(ts);
    const Index work = 1, absorb = 0;
    EXPECT_DOUBLE_EQ(d.p(work, 0, absorb), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(d.p(work, 0, work), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(d.l(work, 0, absorb), std::log(6.0 / 5.0));
    EXPECT_DOUBLE_EQ(d.l(work, 0, work), std::log(6.0 / 5.0));
    EXPECT_EQ(d.p(absorb, 0, absorb), 1.0);
    EXPECT_EQ(d.l(absorb, 0, absorb), 0.0);
    EXPECT_TRUE(d.is_terminal(absorb, 0));
    EXPECT_EQ(d.states, ts.states());
    EXPECT_EQ(d.actions, ts.actions());
}

TEST(BuildEquivalentDtmdp, ZeroCostMovingRow) {
    RawModel raw;
    raw.states = {"a", "b", "c"};
    raw.actions = {"go"};
    raw.rates = {{"a", "go", "b", 1.0}, {"a", "go", "c", 3.0}};
    const CtmdpModel m = validate_model(raw);
    const DtmdpModel d = build_equivalent_dtmdp(m);
    // w(a) = 1 + 0 + 4
    EXPECT_DOUBLE_EQ(d.p(0, 0, 1), 1.0 / 5.0);
    EXPECT_DOUBLE_EQ(d.p(0, 0, 2), 3.0 / 5.0);
    EXPECT_DOUBLE_EQ(d.p(0, 0, 0), 1.0 / 5.0);
    EXPECT_TRUE((d.log_cost[0].row(0).array() == 0.0).all());
}

TEST(ValidateDtmdp, RejectsNonStochasticRows) {
    DtmdpModel d = build_equivalent_dtmdp(two_state());
    EXPECT_NO_THROW(validate_dtmdp(d));
    d.kernel[0](1, 1) += 1e-9;
    EXPECT_THROW(validate_dtmdp(d), ModelError);
    d = build_equivalent_dtmdp(two_state());
    d.log_cost[0](1, 0) = -0.1;
    EXPECT_THROW(validate_dtmdp(d), ModelError);
}

// Kernel rows are probability vectors, l is nonnegative, zero exactly when c is,
// constant in y, and the reduction is a pure function.
TEST(ReductionProperty, KernelAndCostInvariants) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const CtmdpModel m = random_instance(seed, 16, 4, 2.0);
        const DtmdpModel d = build_equivalent_dtmdp(m);
        ASSERT_NO_THROW(validate_dtmdp(d));
        EXPECT_EQ(build_equivalent_dtmdp(m), d);
        const Eigen::VectorXd w = uniformization_weight(m);
        for (Index x = 0; x < m.num_states(); ++x) {
            EXPECT_GE(w(x), 1.0);
            for (Index a : m.admissible(x)) {
                EXPECT_GE(w(x) - m.cost(x, a), 1.0 + m.max_total_rate(x) - 1e-12);
                EXPECT_GE(d.kernel[a].row(x).minCoeff(), 0.0);
                EXPECT_NEAR(d.kernel[a].row(x).sum(), 1.0, 1e-12);
                const auto row = d.log_cost[a].row(x);
                EXPECT_TRUE((row.array() == row(0)).all());
                EXPECT_GE(row(0), 0.0);
                EXPECT_EQ(row(0) == 0.0, m.cost(x, a) == 0.0);
            }
        }
    }
}

}  // namespace
