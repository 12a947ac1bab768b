#include <gtest/gtest.h>

#include "support.hpp"

TEST(PermutationOracle, AdmittedOrdersPreserveBehavior) {
    auto r = testing_support::check_permutations(31337, 150, 5);
    EXPECT_EQ(r.blocks, 150u);
    EXPECT_GT(r.orders_checked, 150u);
    EXPECT_GT(r.excluded_changing, 0u);
    EXPECT_EQ(r.sampler_escapes, 0u);
    EXPECT_EQ(r.violations, 0u);
    for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 5); ++i) ADD_FAILURE() << r.failures[i];
}
