#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cpmp/instance.hpp"
#include "cpmp/kmeans.hpp"
#include "cpmp/rng.hpp"
#include "test_util.hpp"

using namespace cpmp;
using test::make_instance;
using test::make_points;

TEST_CASE("distance matrix: pythagorean pair in both modes") {
    const auto instance = make_points({{0, 0}, {3, 4}}, 1);
    for (const auto mode :
         {DistanceMode::FloatExact, DistanceMode::PerPairFloor}) {
        const auto dm = build_distance_matrix(instance, mode);
        CHECK(dm(0, 1) == doctest::Approx(5.0));
        CHECK(dm(1, 0) == doctest::Approx(5.0));
    }
}

TEST_CASE("distance matrix: per-pair floor truncates sqrt(2)") {
    const auto instance = make_points({{0, 0}, {1, 1}}, 1);
    const auto exact =
        build_distance_matrix(instance, DistanceMode::FloatExact);
    const auto floored =
        build_distance_matrix(instance, DistanceMode::PerPairFloor);
    CHECK(exact(0, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(floored(0, 1) == 1.0);
}

TEST_CASE("distance matrix: symmetric with zero diagonal on random instances") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const auto instance = test::random_tiny(rng);
        const auto dm =
            build_distance_matrix(instance, trial % 2 == 0
                                                ? DistanceMode::FloatExact
                                                : DistanceMode::PerPairFloor);
        for (int i = 0; i < instance.n(); ++i) {
            CHECK(dm(i, i) == 0.0);
            for (int j = 0; j < instance.n(); ++j) {
                CHECK(dm(i, j) == dm(j, i));
                CHECK(dm(i, j) >= 0.0);
            }
        }
    }
}

TEST_CASE("evaluate_cost: all self-assigned is free") {
    const auto instance = make_points({{0, 0}, {5, 5}, {9, 1}}, 3);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    CHECK(evaluate_cost(dm, {0, 1, 2}) == 0.0);
}

TEST_CASE("evaluate_cost: collinear 3-4-5 chain sums to 10") {
    const auto instance = make_points({{0, 0}, {3, 4}, {6, 8}}, 1);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    CHECK(evaluate_cost(dm, {1, 1, 1}) == doctest::Approx(10.0));
}

TEST_CASE("evaluate_cost: out-of-range assignment is a contract violation") {
    const auto instance = make_points({{0, 0}, {1, 0}}, 1);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    CHECK_THROWS_AS(evaluate_cost(dm, {0, 5}), ContractViolation);
    CHECK_THROWS_AS(evaluate_cost(dm, {-1, 0}), ContractViolation);
}

TEST_CASE("evaluate_cost: additive over disjoint clusters") {
    Rng rng(77);
    const auto instance = test::random_tiny(rng);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    const auto nest = test::random_nest(instance, dm, rng);

    double per_cluster_sum = 0.0;
    for (const Cluster& cluster : clusters_of(instance, dm, nest)) {
        per_cluster_sum += cluster.intra_cost;
    }
    CHECK(nest.cost == doctest::Approx(per_cluster_sum).epsilon(1e-12));
}

TEST_CASE("per-pair floored cost never exceeds exact cost") {
    Rng rng(909);
    for (int trial = 0; trial < 30; ++trial) {
        const auto instance = test::random_tiny(rng);
        const auto exact =
            build_distance_matrix(instance, DistanceMode::FloatExact);
        const auto floored =
            build_distance_matrix(instance, DistanceMode::PerPairFloor);
        const auto nest = test::random_nest(instance, exact, rng);
        CHECK(evaluate_cost(floored, nest.assignment) <=
              evaluate_cost(exact, nest.assignment));
    }
}

TEST_CASE("check_feasibility: solver nests are clean") {
    Rng rng(5);
    const auto instance = test::random_tiny(rng);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    for (int trial = 0; trial < 50; ++trial) {
        const auto nest = test::random_nest(instance, dm, rng);
        const auto report = check_feasibility(instance, nest);
        CHECK(report.feasible);
        CHECK(report.violations.empty());
    }
}

TEST_CASE("check_feasibility: capacity overflow is flagged on the median") {
    // Two medians; node 2's demand only fits median 0, force it onto 1.
    const auto instance = make_instance(
        {
            {0, 0, 1, 10},
            {10, 0, 1, 2},
            {10, 1, 5, 10},
        },
        2);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    Nest nest;
    nest.medians = {0, 1};
    nest.assignment = {0, 1, 1};
    nest.loads = {1.0, 6.0};
    nest.cost = evaluate_cost(dm, nest.assignment);

    const auto report = check_feasibility(instance, nest);
    REQUIRE_FALSE(report.feasible);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].constraint == Constraint::Capacity);
    CHECK(report.violations[0].index == 1);
}

TEST_CASE("check_feasibility: wrong median count is flagged") {
    const auto instance = make_points({{0, 0}, {1, 0}, {2, 0}}, 2);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    Nest nest;
    nest.medians = {0};  // p-1 medians
    nest.assignment = {0, 0, 0};
    nest.loads = {3.0};
    nest.cost = evaluate_cost(dm, nest.assignment);

    const auto report = check_feasibility(instance, nest);
    REQUIRE_FALSE(report.feasible);
    bool found = false;
    for (const auto& violation : report.violations) {
        if (violation.constraint == Constraint::MedianCount) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("check_feasibility: assignment to a non-median is flagged") {
    const auto instance = make_points({{0, 0}, {1, 0}, {2, 0}}, 1);
    Nest nest;
    nest.medians = {1};
    nest.assignment = {1, 1, 2};
    nest.loads = {3.0};
    nest.cost = 0.0;

    const auto report = check_feasibility(instance, nest);
    REQUIRE_FALSE(report.feasible);
    CHECK(report.violations[0].constraint == Constraint::AssignToMedian);
    CHECK(report.violations[0].index == 2);
}

TEST_CASE("instance invariants: demand coverage is checked at load") {
    // p=1 but no single capacity covers the total demand of 6.
    CHECK_THROWS_AS(make_instance({{0, 0, 3, 5}, {1, 0, 3, 5}}, 1),
                    InfeasibleInstance);
    // p=2 works: 5 + 5 >= 6.
    CHECK_NOTHROW(make_instance({{0, 0, 3, 5}, {1, 0, 3, 5}}, 2));
}

TEST_CASE("instance invariants: malformed nodes are rejected") {
    CHECK_THROWS_AS(make_instance({{0, 0, -1, 5}}, 1), ContractViolation);
    CHECK_THROWS_AS(make_instance({{0, 0, 1, 0}}, 1), ContractViolation);
    CHECK_THROWS_AS(make_instance({{0, 0, 1, 5}}, 2), ContractViolation);
}
