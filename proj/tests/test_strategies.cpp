#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "crowdbandit/strategies.hpp"

using namespace crowdbandit;

TEST_CASE("strategy names parse and print round-trip") {
    REQUIRE(StrategyKind::parse("lc").type == StrategyType::LeastConfidence);
    REQUIRE(StrategyKind::parse("ms").type == StrategyType::MarginSampling);
    REQUIRE(StrategyKind::parse("random").type == StrategyType::Random);
    const auto id_lc = StrategyKind::parse("id-lc:0.05");
    REQUIRE(id_lc.type == StrategyType::InfoDensityLC);
    REQUIRE(id_lc.beta == 0.05);
    REQUIRE(id_lc.name() == "id-lc:0.05");
    REQUIRE(StrategyKind::parse("id-ms:1").name() == "id-ms:1");
    REQUIRE_THROWS_AS(StrategyKind::parse("idlc"), std::invalid_argument);
    REQUIRE_THROWS_AS(StrategyKind::parse("id-lc:-1"), std::invalid_argument);
    REQUIRE_THROWS_AS(StrategyKind::parse("id-lc:abc"), std::invalid_argument);

    const auto list = parse_strategy_list("lc,ms,id-lc:0.05");
    REQUIRE(list.size() == 3);
    REQUIRE(list[2].beta == 0.05);
}

TEST_CASE("id_score matches the closed form") {
    // 0.5 * exp(0.05 * ln 0.2), frozen from a 30-digit evaluation
    REQUIRE(id_score(0.5, 20, 100, 0.05) == Catch::Approx(0.46134041729529416).epsilon(1e-12));
    // beta = 0 leaves exactly 1 - confidence
    REQUIRE(id_score(0.37, 3, 10, 0.0) == 1.0 - 0.37);
    REQUIRE(id_score(1.0, 5, 10, 2.0) == 0.0);
    REQUIRE_THROWS_AS(id_score(0.5, 0, 10, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(id_score(0.5, 11, 10, 1.0), std::invalid_argument);
}

namespace {

std::vector<TaskScores> three_task_scores() {
    // confidences: lc = {0.5, 0.1, 0.9}, ms = {0.25, 0.0, 0.9}
    return {{0.5, 0.25}, {0.1, 0.1}, {0.9, 0.0}};
}

} // namespace

TEST_CASE("lc and ms pick the least confident candidate") {
    const auto scores = three_task_scores();
    ContextAssignment contexts(1, {0, 0, 0});
    std::vector<int> candidates{0, 1, 2};
    Rng rng(1);
    REQUIRE(select_task({StrategyType::LeastConfidence, 0}, candidates, scores, contexts, rng) == 1);
    REQUIRE(select_task({StrategyType::MarginSampling, 0}, candidates, scores, contexts, rng) == 1);
    REQUIRE_THROWS_AS(
        select_task({StrategyType::LeastConfidence, 0}, std::vector<int>{}, scores, contexts, rng),
        std::invalid_argument);
}

TEST_CASE("score ties go to the smallest task id") {
    std::vector<TaskScores> scores{{0.4, 0.1}, {0.4, 0.1}, {0.4, 0.1}};
    ContextAssignment contexts(1, {0, 0, 0});
    std::vector<int> candidates{0, 1, 2};
    Rng rng(1);
    REQUIRE(select_task({StrategyType::LeastConfidence, 0}, candidates, scores, contexts, rng) == 0);
    std::vector<int> later{1, 2};
    REQUIRE(select_task({StrategyType::LeastConfidence, 0}, later, scores, contexts, rng) == 1);
}

TEST_CASE("id with beta 0 decides exactly like the base strategy") {
    Rng rng(123);
    ContextAssignment contexts(3, {0, 0, 0, 1, 1, 2, 2, 2, 2, 2});
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<TaskScores> scores;
        for (int i = 0; i < 10; ++i) {
            const double p = rng.uniform01();
            const double n = rng.uniform01() * (1.0 - p);
            scores.push_back({p, n});
        }
        std::vector<int> candidates;
        for (int i = 0; i < 10; ++i)
            if (rng.bernoulli(0.7)) candidates.push_back(i);
        if (candidates.empty()) candidates.push_back(rng.uniform_index(10));
        Rng a(0), b(0);
        REQUIRE(select_task({StrategyType::InfoDensityLC, 0.0}, candidates, scores, contexts, a) ==
                select_task({StrategyType::LeastConfidence, 0.0}, candidates, scores, contexts, b));
        REQUIRE(select_task({StrategyType::InfoDensityMS, 0.0}, candidates, scores, contexts, a) ==
                select_task({StrategyType::MarginSampling, 0.0}, candidates, scores, contexts, b));
    }
}

TEST_CASE("equal confidence with beta > 0 favors the larger context") {
    // task 0 sits in a 2-task context, task 2 in a 8-task context
    ContextAssignment contexts(2, {0, 0, 1, 1, 1, 1, 1, 1, 1, 1});
    std::vector<TaskScores> scores(10, TaskScores{0.3, 0.1});
    std::vector<int> candidates{0, 2};
    Rng rng(9);
    REQUIRE(select_task({StrategyType::InfoDensityLC, 0.5}, candidates, scores, contexts, rng) == 2);
    REQUIRE(select_task({StrategyType::InfoDensityMS, 0.5}, candidates, scores, contexts, rng) == 2);
    // equal context sizes fall back to the id tie-break
    ContextAssignment equal(2, {0, 0, 1, 1});
    std::vector<int> pair{1, 3};
    std::vector<TaskScores> same(4, TaskScores{0.3, 0.1});
    REQUIRE(select_task({StrategyType::InfoDensityLC, 0.5}, pair, same, equal, rng) == 1);
}

TEST_CASE("lc and ms agree whenever the evidence is one-sided") {
    Rng rng(321);
    ContextAssignment contexts(1, std::vector<int>(8, 0));
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<TaskScores> scores;
        for (int i = 0; i < 8; ++i) {
            const double p = rng.uniform01();
            scores.push_back(rng.bernoulli(0.5) ? TaskScores{p, 0.0} : TaskScores{0.0, p});
        }
        std::vector<int> candidates{0, 1, 2, 3, 4, 5, 6, 7};
        Rng a(0), b(0);
        REQUIRE(select_task({StrategyType::LeastConfidence, 0}, candidates, scores, contexts, a) ==
                select_task({StrategyType::MarginSampling, 0}, candidates, scores, contexts, b));
    }
}

TEST_CASE("random strategy draws uniformly") {
    const int m = 5;
    std::vector<TaskScores> scores(m);
    ContextAssignment contexts(1, std::vector<int>(m, 0));
    std::vector<int> candidates{0, 1, 2, 3, 4};
    Rng rng(2024);
    std::vector<int> counts(m, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        ++counts[select_task({StrategyType::Random, 0}, candidates, scores, contexts, rng)];
    const double expected = static_cast<double>(draws) / m;
    const double sigma = std::sqrt(draws * (1.0 / m) * (1.0 - 1.0 / m));
    for (int c : counts) REQUIRE(std::abs(c - expected) < 4 * sigma);
}
