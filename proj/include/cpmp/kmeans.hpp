#pragma once

#include <optional>
#include <vector>

#include "cpmp/instance.hpp"
#include "cpmp/rng.hpp"

namespace cpmp {

// Thrown when repeated random median draws never produce a feasible
// assignment (pathologically tight instance).
struct SeedingFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cluster {
    int median = -1;
    std::vector<int> members;  // ascending, includes the median
    double intra_cost = 0.0;   // sum of member distances to the median
    double load = 0.0;         // sum of member demands
};

struct LocalSearchConfig {
    int max_local_iters = 100;
    int max_seed_attempts = 1000;
    int n_assign_orders = 1;
};

// Greedy capacity-aware assignment of all nodes to a fixed median set.
// Medians are pre-assigned to themselves; the remaining nodes are processed
// in ascending order of distance to their nearest median with enough
// residual capacity, falling back to the next-nearest as medians fill.
// Returns nullopt (INFEASIBLE) if any node cannot be placed.
std::optional<std::vector<int>> assign_nodes(const ProblemInstance& instance,
                                             const DistanceMatrix& dm,
                                             const std::vector<int>& medians);

// Same greedy placement but processing non-median nodes in the given order,
// each to its nearest median with residual capacity.
std::optional<std::vector<int>> assign_nodes_in_order(
    const ProblemInstance& instance, const DistanceMatrix& dm,
    const std::vector<int>& medians, const std::vector<int>& order);

// Discrete 1-median of a member set: the member minimizing the sum of
// distances from all members, ties broken by lowest node index.
int best_median_of_cluster(const DistanceMatrix& dm,
                           const std::vector<int>& members);

// Builds a Nest (loads + cost) from a median set and a full assignment.
Nest make_nest(const ProblemInstance& instance, const DistanceMatrix& dm,
               std::vector<int> medians, std::vector<int> assignment);

// Decomposes a nest into its clusters, ordered by ascending median index.
std::vector<Cluster> clusters_of(const ProblemInstance& instance,
                                 const DistanceMatrix& dm, const Nest& nest);

// Alternates intra-cluster median relocation with greedy reassignment,
// accepting a new configuration only when its cost strictly decreases and
// it stays feasible. Stops after a non-improving pass or max_local_iters
// passes. Output cost <= input cost; output feasible.
Nest local_improve(const ProblemInstance& instance, const DistanceMatrix& dm,
                   const Nest& nest, int max_local_iters = 100);

// Samples p distinct medians uniformly, assigns greedily (resampling on
// INFEASIBLE up to max_seed_attempts) and locally improves the result.
// With n_assign_orders > 1 additional random-order assignments are tried
// and the cheapest improved nest wins. Throws SeedingFailed when the
// attempt budget is exhausted.
Nest seed_nest(const ProblemInstance& instance, const DistanceMatrix& dm,
               Rng& rng, const LocalSearchConfig& config = {});

// Squared-error clustering objective with the median node as center.
// Diagnostic only; the solver optimizes the plain distance sum.
double kmeans_objective(const ProblemInstance& instance,
                        const std::vector<Cluster>& clusters);

}  // namespace cpmp
