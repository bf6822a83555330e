#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "crowdbandit/aggregation.hpp"
#include "crowdbandit/rng.hpp"

using namespace crowdbandit;

namespace {

// Independent route for the margin identity: |sum w*y| / sum w in long double.
long double margin_oracle(const std::vector<int>& labels, const std::vector<double>& weights) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        num += static_cast<long double>(weights[j]) * labels[j];
        den += weights[j];
    }
    return std::abs(num) / den;
}

struct RandomInstance {
    std::vector<int> labels;
    std::vector<double> weights;
};

RandomInstance random_instance(Rng& rng, int max_workers = 50) {
    const int k = 1 + rng.uniform_index(max_workers);
    RandomInstance inst;
    for (int j = 0; j < k; ++j) {
        const int r = rng.uniform_index(3);
        inst.labels.push_back(r == 0 ? -1 : (r == 1 ? 0 : +1));
        inst.weights.push_back(1e-3 + rng.uniform01() * 10.0);
    }
    return inst;
}

} // namespace

TEST_CASE("weighted_vote follows the weighted majority") {
    Rng rng(1);
    std::vector<double> unit{1.0, 1.0, 1.0};
    REQUIRE(weighted_vote(std::vector<int>{+1, +1, -1}, unit, rng) == Label(+1));
    // (0.5 - 2.0 + 0) / 3.5 < 0
    REQUIRE(weighted_vote(std::vector<int>{+1, -1, 0}, std::vector<double>{0.5, 2.0, 1.0}, rng) ==
            Label(-1));
}

TEST_CASE("weighted_vote breaks exact ties 50/50") {
    Rng rng(42);
    std::vector<int> labels{+1, -1};
    std::vector<double> weights{1.0, 1.0};
    int positives = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) positives += (weighted_vote(labels, weights, rng).value == +1);
    REQUIRE(std::abs(positives - draws / 2) < 4 * std::sqrt(draws * 0.25));
}

TEST_CASE("weighted_vote validates its weights") {
    Rng rng(1);
    std::vector<int> labels{+1, -1};
    REQUIRE_THROWS_AS(weighted_vote(labels, std::vector<double>{1.0, 0.0}, rng),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(weighted_vote(labels, std::vector<double>{1.0, -2.0}, rng),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        weighted_vote(labels, std::vector<double>{1.0, std::numeric_limits<double>::infinity()},
                      rng),
        std::invalid_argument);
}

TEST_CASE("majority_vote is the unit-weight vote") {
    Rng rng(2);
    REQUIRE(majority_vote(std::vector<int>{+1, +1, +1}, rng) == Label(+1));
    REQUIRE(majority_vote(std::vector<int>{+1, -1, -1}, rng) == Label(-1));
    int positives = 0;
    for (int i = 0; i < 10000; ++i)
        positives += (majority_vote(std::vector<int>{0, 0, 0}, rng).value == +1);
    REQUIRE(std::abs(positives - 5000) < 4 * std::sqrt(10000 * 0.25));
}

TEST_CASE("task_scores splits the weight mass") {
    const auto scores =
        task_scores(std::vector<int>{+1, +1, -1, 0}, std::vector<double>{1, 1, 1, 1});
    REQUIRE(scores.positive == Catch::Approx(0.5));
    REQUIRE(scores.negative == Catch::Approx(0.25));

    const auto none = task_scores(std::vector<int>{0, 0, 0}, std::vector<double>{1, 1, 1});
    REQUIRE(none.positive == 0.0);
    REQUIRE(none.negative == 0.0);

    const auto unanimous =
        task_scores(std::vector<int>{+1, +1, +1}, std::vector<double>{0.4, 2.0, 7.0});
    REQUIRE(unanimous.positive == 1.0);
    REQUIRE(unanimous.negative == 0.0);
}

TEST_CASE("confidence functions") {
    REQUIRE(confidence_lc({0.5, 0.25}) == 0.5);
    REQUIRE(confidence_lc({0.0, 0.0}) == 0.0);
    REQUIRE(confidence_lc({0.3, 0.7}) == 0.7);
    REQUIRE(confidence_ms({0.5, 0.25}) == Catch::Approx(0.25));
    REQUIRE(confidence_ms({0.4, 0.4}) == 0.0);
    REQUIRE(confidence_ms({1.0, 0.0}) == 1.0);
}

TEST_CASE("margin equals the normalized absolute label sum") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inst = random_instance(rng);
        const double ms = confidence_ms(task_scores(inst.labels, inst.weights));
        REQUIRE(std::abs(ms - static_cast<double>(margin_oracle(inst.labels, inst.weights))) <
                1e-12);
    }
}

TEST_CASE("scores and decisions are invariant under weight scaling") {
    Rng rng(78);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = random_instance(rng, 20);
        const double scale = std::exp((rng.uniform01() - 0.5) * 10.0);
        auto scaled = inst.weights;
        for (double& w : scaled) w *= scale;
        const auto a = task_scores(inst.labels, inst.weights);
        const auto b = task_scores(inst.labels, scaled);
        REQUIRE(std::abs(a.positive - b.positive) < 1e-12);
        REQUIRE(std::abs(a.negative - b.negative) < 1e-12);
        REQUIRE(std::abs(confidence_lc(a) - confidence_lc(b)) < 1e-12);
        REQUIRE(std::abs(confidence_ms(a) - confidence_ms(b)) < 1e-12);
        if (a.positive != a.negative) {
            Rng tie1(1), tie2(1);
            REQUIRE(weighted_vote(inst.labels, inst.weights, tie1) ==
                    weighted_vote(inst.labels, scaled, tie2));
        }
    }
}

TEST_CASE("vote agrees with the score comparison") {
    Rng rng(79);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inst = random_instance(rng);
        const auto scores = task_scores(inst.labels, inst.weights);
        if (scores.positive == scores.negative) continue;
        Rng tie(0);
        const Label vote = weighted_vote(inst.labels, inst.weights, tie);
        REQUIRE((vote.value == +1) == (scores.positive > scores.negative));
    }
}

TEST_CASE("lc dominates ms, with equality only on one-sided evidence") {
    Rng rng(80);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inst = random_instance(rng);
        const auto scores = task_scores(inst.labels, inst.weights);
        const double lc = confidence_lc(scores);
        const double ms = confidence_ms(scores);
        REQUIRE(lc >= ms - 1e-15);
        const double lesser = std::min(scores.positive, scores.negative);
        if (lesser == 0.0)
            REQUIRE(lc == ms);
        else
            REQUIRE(lc > ms);
    }
}
