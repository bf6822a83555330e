#include <catch2/catch_amalgamated.hpp>

#include "crowdbandit/core.hpp"

using namespace crowdbandit;

TEST_CASE("Label rejects anything but -1/+1") {
    REQUIRE(Label(+1).value == 1);
    REQUIRE(Label(-1).value == -1);
    REQUIRE_THROWS_AS(Label(0), std::invalid_argument);
    REQUIRE_THROWS_AS(Label(2), std::invalid_argument);
}

TEST_CASE("LabelMatrix only lets missing entries become definite") {
    LabelMatrix m(2, 3);
    REQUIRE(m.at(0, 0) == 0);
    m.set(0, 0, Label(+1));
    REQUIRE(m.at(0, 0) == 1);
    REQUIRE_THROWS_AS(m.set(0, 0, Label(-1)), std::logic_error);
    REQUIRE_THROWS_AS(m.set(0, 0, Label(+1)), std::logic_error);
    REQUIRE(m.labels_in_row(0) == 1);
    REQUIRE_FALSE(m.complete());
}

TEST_CASE("ContextAssignment counts per context") {
    ContextAssignment contexts(2, {0, 0, 1});
    REQUIRE(contexts.n_tasks() == 3);
    REQUIRE(contexts.count(0) == 2);
    REQUIRE(contexts.count(1) == 1);
    REQUIRE(contexts.tasks_in(0) == std::vector<int>{0, 1});
    REQUIRE_THROWS_AS(ContextAssignment(2, {0, 2}), std::out_of_range);
}

TEST_CASE("LossTable entries only grow") {
    LossTable losses(2, 2);
    losses.add(0, 1, 2.5);
    REQUIRE(losses.at(0, 1) == 2.5);
    REQUIRE_THROWS_AS(losses.add(0, 1, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(losses.add(0, 1, std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
}

TEST_CASE("validate_instance accepts a consistent instance") {
    // N=3, contexts {0,0,1} (the paper's [1,1,2]), T=45 with T1 below it
    LabelMatrix matrix(3, 3);
    ContextAssignment contexts(2, {0, 0, 1});
    BudgetLedger ledger;
    ledger.total = 45;
    ledger.exploration_spent = 6;
    ledger.context_steps = {0, 0};
    REQUIRE_FALSE(validate_instance(matrix, contexts, ledger).has_value());
}

TEST_CASE("validate_instance reports an empty context") {
    LabelMatrix matrix(2, 2);
    ContextAssignment contexts(3, {0, 1}); // context 2 never used
    BudgetLedger ledger;
    ledger.total = 10;
    const auto violation = validate_instance(matrix, contexts, ledger);
    REQUIRE(violation.has_value());
    REQUIRE(violation->find("empty context") != std::string::npos);
}

TEST_CASE("validate_instance reports an out-of-range label") {
    LabelMatrix matrix(1, 2, {2, 0});
    ContextAssignment contexts(1, {0});
    BudgetLedger ledger;
    ledger.total = 10;
    const auto violation = validate_instance(matrix, contexts, ledger);
    REQUIRE(violation.has_value());
    REQUIRE(violation->find("label out of range") != std::string::npos);
}

TEST_CASE("validate_instance reports budget problems") {
    LabelMatrix matrix(2, 2);
    ContextAssignment contexts(1, {0, 0});
    BudgetLedger ledger;
    ledger.total = 4;
    ledger.exploration_spent = 4; // T1 must stay below T
    const auto violation = validate_instance(matrix, contexts, ledger);
    REQUIRE(violation.has_value());
    REQUIRE(violation->find("budget too small") != std::string::npos);
}

TEST_CASE("validate_instance reports dimension mismatches") {
    LabelMatrix matrix(3, 2);
    ContextAssignment contexts(1, {0, 0});
    BudgetLedger ledger;
    ledger.total = 10;
    REQUIRE(validate_instance(matrix, contexts, ledger).has_value());

    ContextAssignment ok_contexts(1, {0, 0, 0});
    GroundTruth truth{{+1, -1}};
    REQUIRE(validate_instance(matrix, ok_contexts, ledger, &truth).has_value());
}
