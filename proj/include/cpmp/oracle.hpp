#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpmp/instance.hpp"

namespace cpmp {

struct OracleTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoFeasibleSolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Enumeration guards: C(n,p) * p^(n-p) states must stay within max_states.
struct OracleLimits {
    int max_n = 10;
    int max_p = 3;
    std::uint64_t max_states = 10'000'000;
};

// Exhaustive counterpart of the greedy assignment: tries all p^(n-p)
// placements of non-median nodes and returns the cheapest capacity-feasible
// one, or nullopt when none exists. Throws OracleTooLarge past the limits.
std::optional<std::vector<int>> optimal_assignment_for_medians(
    const ProblemInstance& instance, const DistanceMatrix& dm,
    const std::vector<int>& medians, const OracleLimits& limits = {});

// Provably optimal solution of the full problem: minimizes over all C(n,p)
// median sets with exact assignments. Ties resolve to the lexicographically
// smallest median set. Throws NoFeasibleSolution when no set admits a
// feasible assignment.
Nest enumerate_optimal(const ProblemInstance& instance,
                       const DistanceMatrix& dm,
                       const OracleLimits& limits = {});

}  // namespace cpmp
