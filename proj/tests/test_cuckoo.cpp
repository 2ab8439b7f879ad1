#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cpmp/cuckoo.hpp"
#include "cpmp/oracle.hpp"
#include "test_util.hpp"

using namespace cpmp;
using test::make_points;

// Golden values from a 60-digit evaluation of the coefficient formula with
// the signed magnitude-power convention for the sine factor.
constexpr double kLevy15 = 0.6525638719434528;
constexpr double kLevy25 = -0.7487082954225519;

TEST_CASE("levy_coefficient: unity at lambda = 1") {
    const auto levy = levy_coefficient(1.0);
    CHECK_FALSE(levy.degenerate);
    CHECK(levy.value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("levy_coefficient: golden values at 1.5, 2.5 and 3") {
    CHECK(levy_coefficient(1.5).value ==
          doctest::Approx(kLevy15).epsilon(1e-12));
    CHECK(levy_coefficient(2.5).value ==
          doctest::Approx(kLevy25).epsilon(1e-12));
    // Exact by cancellation: 6 * (-1) / (1 * 3 * 2).
    CHECK(levy_coefficient(3.0).value ==
          doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("levy_coefficient: lambda = 2 degrades to a flagged zero") {
    const auto levy = levy_coefficient(2.0);
    CHECK(levy.degenerate);
    CHECK(levy.value == 0.0);
}

TEST_CASE("levy_coefficient: lambda outside [1,3] is rejected") {
    CHECK_THROWS_AS(levy_coefficient(0.5), ParameterError);
    CHECK_THROWS_AS(levy_coefficient(3.5), ParameterError);
}

namespace {

ContinuousNest position(std::vector<double> coords, Bounds bounds) {
    ContinuousNest nest;
    nest.coords = std::move(coords);
    nest.bounds = bounds;
    return nest;
}

}  // namespace

TEST_CASE("levy_step: zero step when both positions coincide") {
    const Bounds box{-10, 10, -10, 10};
    const auto here = position({1, 2, 3, 4}, box);
    Rng rng(3);
    const auto next = levy_step(here, here, 1.5, rng);
    CHECK(next.coords == here.coords);
}

TEST_CASE("levy_step kernel: alpha = 0 is the identity") {
    const Bounds box{-10, 10, -10, 10};
    const auto here = position({1, 2}, box);
    const auto there = position({5, -3}, box);
    const auto next = levy_step_kernel(here, there, 1.0, 0.0);
    CHECK(next.coords == here.coords);
}

TEST_CASE("levy_step kernel: direct substitution at levy=1, alpha=0.5") {
    const Bounds box{-10, 10, -10, 10};
    const auto here = position({0, 0}, box);
    const auto there = position({1, 1}, box);
    const auto next = levy_step_kernel(here, there, 1.0, 0.5);
    CHECK(next.coords[0] == doctest::Approx(-0.5));
    CHECK(next.coords[1] == doctest::Approx(-0.5));
}

TEST_CASE("levy_step kernel: results are clamped to the bounding box") {
    const Bounds box{0, 1, 0, 1};
    const auto here = position({1, 1}, box);
    const auto there = position({0, 0}, box);
    const auto next = levy_step_kernel(here, there, 1.0, 5.0);
    CHECK(next.coords[0] == 1.0);
    CHECK(next.coords[1] == 1.0);
}

TEST_CASE("levy_step: dimension mismatch is a contract violation") {
    const Bounds box{0, 1, 0, 1};
    Rng rng(1);
    CHECK_THROWS_AS(
        levy_step(position({0, 0}, box), position({0, 0, 1, 1}, box), 1.5, rng),
        ContractViolation);
}

TEST_CASE("fitness_of: range and ordering") {
    CHECK(fitness_of(0.0) == 1.0);
    CHECK(fitness_of(713.0) == doctest::Approx(1.0 / 714.0));
    CHECK(fitness_of(100.0) > fitness_of(200.0));
    CHECK_THROWS_AS(fitness_of(-1.0), ContractViolation);
}

TEST_CASE("survival_probability: endpoints and midpoint are exact") {
    CHECK(survival_probability(0.5, 0.5) == 1.0);
    CHECK(survival_probability(0.0, 0.5) == 0.1);
    CHECK(survival_probability(0.25, 0.5) == doctest::Approx(0.55).epsilon(1e-15));
    CHECK_THROWS_AS(survival_probability(0.1, 0.0), ContractViolation);
    CHECK_THROWS_AS(survival_probability(0.6, 0.5), ContractViolation);
}

TEST_CASE("resample_coordinate: endpoints map exactly to the bounds") {
    CHECK(resample_coordinate(-3.0, 7.0, 0.0) == -3.0);
    CHECK(resample_coordinate(-3.0, 7.0, 1.0) == 7.0);
    CHECK(resample_coordinate(-3.0, 7.0, 0.5) == 2.0);
}

TEST_CASE("abandon_and_resample: positions stay inside the box") {
    const Bounds box{2, 4, -1, 1};
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto fresh = abandon_and_resample(box, 3, rng);
        REQUIRE(fresh.coords.size() == 6);
        for (size_t q = 0; q < fresh.coords.size(); q += 2) {
            CHECK(fresh.coords[q] >= box.x_min);
            CHECK(fresh.coords[q] <= box.x_max);
            CHECK(fresh.coords[q + 1] >= box.y_min);
            CHECK(fresh.coords[q + 1] <= box.y_max);
        }
    }
}

TEST_CASE("roulette_select: single element and degenerate weights") {
    Rng rng(2);
    CHECK(roulette_select({3.0}, rng) == 0);
    CHECK_THROWS_AS(roulette_select({0.0, 0.0}, rng), SelectionUndefined);
    CHECK_THROWS_AS(roulette_select({}, rng), ContractViolation);
    CHECK_THROWS_AS(roulette_select({1.0, -0.5}, rng), ContractViolation);
}

TEST_CASE("roulette_select: frequencies follow the weights") {
    // 10^5 draws on [3, 1]: expect 0.75 / 0.25 and a chi-square within the
    // 0.001 critical value for 1 dof (10.828).
    Rng rng(20240817);
    const std::vector<double> weights{3.0, 1.0};
    const int draws = 100000;
    int first = 0;
    for (int i = 0; i < draws; ++i) {
        if (roulette_select(weights, rng) == 0) {
            ++first;
        }
    }
    const double freq = static_cast<double>(first) / draws;
    CHECK(freq > 0.745);
    CHECK(freq < 0.755);
    const double expected0 = 0.75 * draws;
    const double expected1 = 0.25 * draws;
    const double chi2 =
        (first - expected0) * (first - expected0) / expected0 +
        (draws - first - expected1) * (draws - first - expected1) / expected1;
    CHECK(chi2 <= 10.828);
}

TEST_CASE("roulette_select: uniform weights stay uniform") {
    Rng rng(5150);
    const std::vector<double> weights{1.0, 1.0, 1.0, 1.0};
    const int draws = 40000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < draws; ++i) {
        ++counts[roulette_select(weights, rng)];
    }
    // chi-square, 3 dof, alpha 0.001 -> 16.266
    double chi2 = 0.0;
    for (int c : counts) {
        const double expected = draws / 4.0;
        chi2 += (c - expected) * (c - expected) / expected;
    }
    CHECK(chi2 <= 16.266);
}

TEST_CASE("decode: exact node positions become the medians") {
    const auto instance =
        make_points({{0, 0}, {10, 0}, {0, 10}, {10, 10}}, 2);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    ContinuousNest continuous;
    continuous.bounds = instance.bounds();
    continuous.coords = {10, 0, 0, 10};  // nodes 1 and 2 exactly
    const auto nest = decode(instance, dm, continuous);
    REQUIRE(nest.has_value());
    CHECK(nest->medians == std::vector<int>{1, 2});
}

TEST_CASE("decode: colliding pairs take distinct nodes") {
    const auto instance = make_points({{0, 0}, {1, 0}, {10, 10}}, 2);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    ContinuousNest continuous;
    continuous.bounds = instance.bounds();
    continuous.coords = {0, 0, 0, 0};  // both pairs nearest to node 0
    const auto nest = decode(instance, dm, continuous);
    REQUIRE(nest.has_value());
    CHECK(nest->medians == std::vector<int>{0, 1});
}

TEST_CASE("decode: outputs are feasible with p distinct medians") {
    Rng rng(313);
    const auto instance = test::random_tiny(rng);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    int decoded = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto continuous =
            abandon_and_resample(instance.bounds(), instance.p(), rng);
        const auto nest = decode(instance, dm, continuous);
        if (!nest) {
            continue;
        }
        ++decoded;
        std::vector<int> unique_medians = nest->medians;
        unique_medians.erase(
            std::unique(unique_medians.begin(), unique_medians.end()),
            unique_medians.end());
        CHECK(static_cast<int>(unique_medians.size()) == instance.p());
        CHECK(check_feasibility(instance, *nest).feasible);
    }
    CHECK(decoded > 0);
}

TEST_CASE("mutate_nest: k = 0 keeps a converged nest fixed") {
    Rng rng(21);
    const auto instance = test::random_tiny(rng);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    const Nest nest =
        local_improve(instance, dm, test::random_nest(instance, dm, rng));
    Rng mutator(17);
    const Nest mutated = mutate_nest(instance, dm, nest, 0, mutator);
    CHECK(mutated.cost == nest.cost);
    CHECK(mutated.assignment == nest.assignment);
}

TEST_CASE("mutate_nest: the lone distant node is always drawn first") {
    // Nodes 2-4 sit exactly on medians (weight 0); node 5 is far from its
    // median, so the first roulette draw must pick it.
    const auto instance = make_points(
        {{0, 0}, {100, 0}, {0, 0}, {0, 0}, {100, 0}, {40, 0}}, 2, 100.0);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    const auto assignment = assign_nodes(instance, dm, {0, 1});
    REQUIRE(assignment.has_value());
    const Nest nest = make_nest(instance, dm, {0, 1}, *assignment);
    REQUIRE(dm(5, nest.assignment[5]) > 0.0);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        // Weight vector: only node 5 carries mass, so it moves or keeps its
        // median but no co-located node ever does.
        const Nest mutated = mutate_nest(instance, dm, nest, 1, rng);
        for (int i = 2; i <= 4; ++i) {
            CHECK(mutated.assignment[i] == nest.assignment[i]);
        }
    }
}

TEST_CASE("mutate_nest: feasible across seeded mutations") {
    Rng rng(88);
    const auto instance = test::random_tiny(rng);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    const Nest nest =
        local_improve(instance, dm, test::random_nest(instance, dm, rng));
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng mutator(seed);
        const Nest mutated = mutate_nest(instance, dm, nest, 2, mutator);
        CHECK(check_feasibility(instance, mutated).feasible);
    }
}

TEST_CASE("run_generation: identical local optima only move through mutation") {
    const auto instance =
        make_points({{0, 0}, {1, 0}, {30, 0}, {31, 0}, {60, 0}, {61, 0}}, 3,
                    100.0);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    Rng seeder(5);
    const Nest seedling = seed_nest(instance, dm, seeder);

    Population population;
    population.nests.assign(8, seedling);
    population.best_ever = seedling;
    population.fitness.assign(8, fitness_of(seedling.cost));

    SolverParams params;
    params.n_nests = 8;
    params.mutation_k = 0;
    Rng rng(99);
    run_generation(instance, dm, population, params, rng);

    // Identical nests make every flight step zero and every survival
    // probability 1.0; with k=0 the population cannot change.
    CHECK(population.generation == 1);
    for (const Nest& nest : population.nests) {
        CHECK(nest.cost == seedling.cost);
        CHECK(nest.assignment == seedling.assignment);
    }
}

TEST_CASE("run_generation: best_ever never backslides") {
    Rng maker(777);
    const auto instance = test::random_tiny(maker);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    SolverParams params;
    params.n_nests = 6;
    Rng rng(3);

    Population population;
    for (int i = 0; i < params.n_nests; ++i) {
        population.nests.push_back(seed_nest(instance, dm, rng));
    }
    population.best_ever = population.nests[0];
    for (const Nest& nest : population.nests) {
        if (nest.cost < population.best_ever.cost) {
            population.best_ever = nest;
        }
    }

    double previous = population.best_ever.cost;
    for (int g = 0; g < 25; ++g) {
        run_generation(instance, dm, population, params, rng);
        CHECK(population.best_ever.cost <= previous);
        previous = population.best_ever.cost;
        for (const Nest& nest : population.nests) {
            CHECK(check_feasibility(instance, nest).feasible);
        }
    }
}

TEST_CASE("solve: deterministic per seed, bit for bit") {
    Rng maker(31337);
    const auto instance = test::random_tiny(maker);
    SolverParams params;
    params.generations = 40;
    params.n_nests = 8;
    params.seed = 5;

    const SolveResult a = solve(instance, params);
    const SolveResult b = solve(instance, params);
    CHECK(a.best.cost == b.best.cost);
    CHECK(a.best.medians == b.best.medians);
    CHECK(a.best.assignment == b.best.assignment);
    REQUIRE(a.history.size() == b.history.size());
    for (size_t g = 0; g < a.history.size(); ++g) {
        CHECK(a.history[g].best_cost == b.history[g].best_cost);
        CHECK(a.history[g].mean_cost == b.history[g].mean_cost);
    }
}

TEST_CASE("solve: history is non-increasing and sized generations + 1") {
    Rng maker(404);
    const auto instance = test::random_tiny(maker);
    SolverParams params;
    params.generations = 30;
    params.n_nests = 6;
    params.seed = 9;

    const SolveResult result = solve(instance, params);
    REQUIRE(result.history.size() ==
            static_cast<size_t>(params.generations) + 1);
    for (size_t g = 1; g < result.history.size(); ++g) {
        CHECK(result.history[g].best_cost <= result.history[g - 1].best_cost);
    }
    CHECK(check_feasibility(instance, result.best).feasible);
}

TEST_CASE("solve: finds the oracle optimum on a tiny instance") {
    const auto instance = make_points(
        {{0, 0}, {2, 1}, {1, 2}, {40, 40}, {42, 41}, {41, 39}, {80, 2},
         {81, 3}},
        2, 100.0);
    const auto dm = build_distance_matrix(instance, DistanceMode::FloatExact);
    const Nest optimal = enumerate_optimal(instance, dm);

    SolverParams params;
    params.generations = 60;
    params.n_nests = 10;
    params.seed = 2;
    const SolveResult result = solve(instance, params);
    CHECK(result.best.cost == doctest::Approx(optimal.cost).epsilon(1e-9));
}

TEST_CASE("solver params: invalid ranges are rejected") {
    Rng maker(2);
    const auto instance = test::random_tiny(maker);
    SolverParams params;
    params.lambda = 0.5;
    CHECK_THROWS_AS(solve(instance, params), ParameterError);
    params.lambda = 1.5;
    params.pa = 1.5;
    CHECK_THROWS_AS(solve(instance, params), ParameterError);
    params.pa = 0.25;
    params.mutation_k = instance.n() + 1;
    CHECK_THROWS_AS(solve(instance, params), ParameterError);
}
