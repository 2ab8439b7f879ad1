#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpmp/instance.hpp"
#include "cpmp/kmeans.hpp"
#include "cpmp/rng.hpp"

namespace cpmp {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised by roulette_select when every weight is zero.
struct SelectionUndefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverParams {
    int n_nests = 20;
    int generations = 500;
    double lambda = 1.5;
    // Reserved knob: abandonment is driven entirely by the per-egg survival
    // draw against the Eq.-11 probability, no global fraction is applied.
    double pa = 0.25;
    int mutation_k = 2;
    std::uint64_t seed = 1;
    DistanceMode distance_mode = DistanceMode::FloatExact;
    int max_local_iters = 100;
    int max_seed_attempts = 1000;
    int n_assign_orders = 1;

    LocalSearchConfig local_config() const {
        return {max_local_iters, max_seed_attempts, n_assign_orders};
    }

    // Throws ParameterError when a field is out of range for an instance
    // with n nodes.
    void validate(int n) const;
};

// A nest's continuous search-space position: the 2p vector of its median
// coordinates, with the instance bounding box as per-dimension limits.
struct ContinuousNest {
    std::vector<double> coords;  // x,y per median, ascending median order
    Bounds bounds;
};

struct Population {
    std::vector<Nest> nests;
    std::vector<double> fitness;  // aligned with nests
    Nest best_ever;
    int generation = 0;
};

struct LevyCoefficient {
    double value = 0.0;
    // Set when sin(pi*lambda/2) vanishes (lambda = 2): the step coefficient
    // degrades to zero instead of an undefined power.
    bool degenerate = false;
};

// The flight-scale coefficient, evaluated exactly as the formula is written:
// Gamma(1+lambda) * sin(pi*lambda/2)^(1/lambda) divided by
// Gamma((1+lambda)/2) * lambda * 2^((lambda-1)/2). A negative sine (lambda
// in (2,3]) uses the signed magnitude power sign(s)*|s|^(1/lambda).
LevyCoefficient levy_coefficient(double lambda);

// Continuous position of a nest's median set.
ContinuousNest encode_nest(const ProblemInstance& instance, const Nest& nest);

// Deterministic kernel of the flight update: per dimension
// new = current + (current - other) * levy * alpha, clamped to bounds.
ContinuousNest levy_step_kernel(const ContinuousNest& current,
                                const ContinuousNest& other, double levy,
                                double alpha);

// Random-walk proposal: draws one alpha ~ U[-1, 1] for the whole vector and
// applies the kernel with the lambda coefficient.
ContinuousNest levy_step(const ContinuousNest& current,
                         const ContinuousNest& other, double lambda, Rng& rng);

// Snaps each coordinate pair to the nearest not-yet-chosen node (pairs in
// index order, distance ties by lowest node index), then assigns greedily
// and locally improves. nullopt when the median set admits no assignment.
std::optional<Nest> decode(const ProblemInstance& instance,
                           const DistanceMatrix& dm,
                           const ContinuousNest& continuous,
                           const LocalSearchConfig& config = {});

// Maximization-oriented fitness of a cost: 1 / (1 + cost), in (0, 1].
double fitness_of(double cost);

// Egg survival probability: 0.9 * fit / max_fit + 0.1, in [0.1, 1.0].
double survival_probability(double fit_p, double max_fit);

// Kernel of the abandonment resample: lo + u * (hi - lo).
double resample_coordinate(double lo, double hi, double u);

// Fresh uniform position inside the bounding box, one independent draw per
// dimension.
ContinuousNest abandon_and_resample(const Bounds& bounds, int p, Rng& rng);

// Fitness-proportionate selection: index i with probability w_i / sum(w).
// Throws SelectionUndefined when all weights are zero, ContractViolation on
// a negative weight or empty list.
int roulette_select(const std::vector<double>& weights, Rng& rng);

// Perturbs a nest by re-seating up to k badly-placed nodes: k roulette
// draws without replacement weighted by distance-to-own-median pick the
// victims; each moves to a roulette-chosen other median with room, weighted
// by 1/(1+distance). The result is locally improved.
Nest mutate_nest(const ProblemInstance& instance, const DistanceMatrix& dm,
                 const Nest& nest, int k, Rng& rng, int max_local_iters = 100);

// One generation: flight proposals with greedy replacement, survival
// filtering with resampling of abandoned nests, then mutation of every
// nest. Updates best_ever and the fitness vector, increments generation.
void run_generation(const ProblemInstance& instance, const DistanceMatrix& dm,
                    Population& population, const SolverParams& params,
                    Rng& rng);

struct GenerationStats {
    double best_cost = 0.0;  // best ever, non-increasing over generations
    double mean_cost = 0.0;  // mean over the current population
};

struct SolveResult {
    Nest best;
    std::vector<GenerationStats> history;  // generations + 1 entries
    double wall_time_seconds = 0.0;
};

// Full run: seeds the population, iterates run_generation, returns the best
// nest with the per-generation history.
SolveResult solve(const ProblemInstance& instance, const SolverParams& params);

}  // namespace cpmp
