#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "crowdbandit/rng.hpp"

using namespace crowdbandit;

TEST_CASE("same seed reproduces the same stream") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next() == b.next());
        REQUIRE(a.uniform01() == b.uniform01());
    }
}

TEST_CASE("mix_seed separates sub-streams") {
    REQUIRE(mix_seed(1, 2) != mix_seed(2, 1));
    REQUIRE(mix_seed(1, 2) != mix_seed(1, 3));
    REQUIRE(mix_seed(1, 2, 3) != mix_seed(1, 2, 4));
}

TEST_CASE("uniform01 stays in [0,1)") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("uniform_index covers the range without bias") {
    Rng rng(99);
    std::vector<int> counts(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) ++counts[rng.uniform_index(7)];
    for (int c : counts) {
        // 4 sigma around 10000 with p = 1/7
        REQUIRE(std::abs(c - draws / 7) < 4 * std::sqrt(draws * (1.0 / 7) * (6.0 / 7)));
    }
    REQUIRE_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("coin_label is a fair coin over {-1,+1}") {
    Rng rng(5);
    int positives = 0;
    for (int i = 0; i < 10000; ++i) {
        const int v = rng.coin_label();
        REQUIRE((v == -1 || v == +1));
        positives += (v == +1);
    }
    REQUIRE(std::abs(positives - 5000) < 4 * std::sqrt(10000 * 0.25));
}
