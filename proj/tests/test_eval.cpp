#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "itgc/errors.hpp"
#include "itgc/eval.hpp"
#include "itgc/rng.hpp"
#include "support/reference_metrics.hpp"

using namespace itgc;
using itgc_testing::brute_force_matched;

TEST_CASE("contingency counts and compaction") {
    Contingency c = contingency({0, 0, 1, 1}, {1, 1, 0, 0});
    REQUIRE(c.t_classes == 2);
    REQUIRE(c.p_clusters == 2);
    CHECK(c.matrix[0][0] == 0);
    CHECK(c.matrix[0][1] == 2);
    CHECK(c.matrix[1][0] == 2);
    CHECK(c.matrix[1][1] == 0);
    CHECK(c.total == 4);

    Contingency single = contingency({0}, {0});
    CHECK(single.matrix == std::vector<std::vector<long long>>{{1}});

    Contingency col = contingency({0, 1}, {0, 0});
    CHECK(col.matrix == std::vector<std::vector<long long>>{{1}, {1}});
}

TEST_CASE("contingency keeps noise as its own column") {
    Contingency c = contingency({0, 0, 1}, {-1, 0, 0});
    REQUIRE(c.p_clusters == 2);
    CHECK(c.pred_values == std::vector<int>{-1, 0});
    CHECK(c.matrix[0][0] == 1);  // class 0, noise column
    CHECK(c.matrix[0][1] == 1);
    CHECK(c.matrix[1][1] == 1);
}

TEST_CASE("contingency rejects mismatched lengths") {
    CHECK_THROWS_AS(contingency({0, 1}, {0}), LengthMismatch);
}

TEST_CASE("optimal_permutation on the trivial fixtures") {
    {
        Contingency c = contingency({0, 0, 1, 1}, {0, 0, 1, 1});
        PermutationResult r = optimal_permutation(c);
        CHECK(r.pred_to_true == std::vector<int>{0, 1});
        CHECK(r.matched == 4);
    }
    {
        Contingency c = contingency({0, 0, 1, 1}, {1, 1, 0, 0});
        PermutationResult r = optimal_permutation(c);
        CHECK(r.pred_to_true == std::vector<int>{1, 0});
        CHECK(r.matched == 4);
    }
}

TEST_CASE("optimal_permutation prefers the lexicographically smallest tie") {
    // two equally good mappings: {0->0,1->1} and {0->1,1->0}
    PermutationResult r = optimal_permutation(contingency({0, 1}, {0, 1}));
    CHECK(r.pred_to_true == std::vector<int>{0, 1});

    // every assignment matches exactly one item; smallest mapping wins
    PermutationResult flat = optimal_permutation(contingency({0, 1, 2}, {0, 1, 2}));
    CHECK(flat.matched == 3);
    CHECK(flat.pred_to_true == std::vector<int>{0, 1, 2});
}

TEST_CASE("rectangular tables zero-pad and leave extra clusters unmatched") {
    // 2 true classes, 3 predicted clusters: one cluster maps to no class
    std::vector<int> y_true = {0, 0, 1, 1, 0, 1};
    std::vector<int> y_pred = {0, 0, 1, 1, 2, 2};
    PermutationResult r = optimal_permutation(contingency(y_true, y_pred));
    REQUIRE(r.pred_to_true.size() == 3);
    CHECK(r.pred_to_true[0] == 0);
    CHECK(r.pred_to_true[1] == 1);
    CHECK(r.pred_to_true[2] == -1);
    CHECK(r.matched == 4);
}

TEST_CASE("accuracy fixtures") {
    CHECK(accuracy({0, 0, 1, 1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    CHECK(accuracy({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(0.5));
    std::vector<int> any = {2, 0, 1, 1, 2, 0, 0};
    CHECK(accuracy(any, any) == doctest::Approx(1.0));
}

TEST_CASE("accuracy error paths") {
    CHECK_THROWS_AS(accuracy({0, 1}, {0}), LengthMismatch);
    CHECK_THROWS_AS(accuracy({}, {}), EmptyInput);
}

TEST_CASE("accuracy is invariant under consistent relabelings") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 5 + rng.next_below(30);
        std::vector<int> y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.next_below(4));
            y_pred[i] = static_cast<int>(rng.next_below(4));
        }
        double base = accuracy(y_true, y_pred);

        std::vector<int> pred_relabel(y_pred);
        for (auto& l : pred_relabel) l = (l * 7 + 3) % 11;  // injective on 0..3
        CHECK(accuracy(y_true, pred_relabel) == doctest::Approx(base));

        std::vector<int> true_relabel(y_true);
        for (auto& l : true_relabel) l = 100 - l;
        CHECK(accuracy(true_relabel, y_pred) == doctest::Approx(base));
    }
}

TEST_CASE("accuracy equals brute-force enumeration on random instances") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t n = 2 + rng.next_below(39);
        int kt = 2 + static_cast<int>(rng.next_below(5));
        int kp = 2 + static_cast<int>(rng.next_below(5));
        std::vector<int> y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.next_below(kt));
            y_pred[i] = static_cast<int>(rng.next_below(kp));
        }
        long long expected = brute_force_matched(y_true, y_pred);
        double got = accuracy(y_true, y_pred);
        CHECK(got == doctest::Approx(static_cast<double>(expected) /
                                     static_cast<double>(n)));
    }
}

TEST_CASE("single predicted cluster scores the largest class share") {
    std::vector<int> y_true = {0, 0, 0, 1, 2};
    std::vector<int> y_pred(5, 0);
    CHECK(accuracy(y_true, y_pred) == doctest::Approx(3.0 / 5.0));
}
