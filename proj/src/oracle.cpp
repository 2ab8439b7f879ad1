#include "cpmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpmp/kmeans.hpp"

namespace cpmp {

namespace {

std::uint64_t binomial(int n, int k) {
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) /
            static_cast<std::uint64_t>(i);
    }
    return r;
}

std::uint64_t power(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > UINT64_MAX / base) {
            return UINT64_MAX;
        }
        r *= base;
    }
    return r;
}

void check_limits(const ProblemInstance& instance, const OracleLimits& limits) {
    const int n = instance.n();
    const int p = instance.p();
    if (n > limits.max_n || p > limits.max_p) {
        throw OracleTooLarge("oracle limited to n<=" +
                             std::to_string(limits.max_n) + ", p<=" +
                             std::to_string(limits.max_p) + "; got n=" +
                             std::to_string(n) + ", p=" + std::to_string(p));
    }
    const std::uint64_t states =
        binomial(n, p) * power(static_cast<std::uint64_t>(p), n - p);
    if (states > limits.max_states) {
        throw OracleTooLarge("enumeration would visit " +
                             std::to_string(states) + " states, cap is " +
                             std::to_string(limits.max_states));
    }
}

}  // namespace

std::optional<std::vector<int>> optimal_assignment_for_medians(
    const ProblemInstance& instance, const DistanceMatrix& dm,
    const std::vector<int>& medians, const OracleLimits& limits) {
    check_limits(instance, limits);
    const int n = instance.n();
    const int p = static_cast<int>(medians.size());

    std::vector<int> free_nodes;
    std::vector<bool> is_median(n, false);
    for (int m : medians) {
        is_median[m] = true;
    }
    for (int v = 0; v < n; ++v) {
        if (!is_median[v]) {
            free_nodes.push_back(v);
        }
    }

    std::vector<double> residual(p);
    for (int r = 0; r < p; ++r) {
        const int m = medians[r];
        residual[r] = instance.capacity(m) - instance.demand(m);
        if (residual[r] < 0.0) {
            return std::nullopt;
        }
    }

    const int free_count = static_cast<int>(free_nodes.size());
    std::vector<int> choice(free_count, 0);
    std::optional<std::vector<int>> best;
    double best_cost = std::numeric_limits<double>::infinity();

    // Depth-first walk over all p^(n-p) placements with capacity checks and
    // running-cost pruning.
    auto dfs = [&](auto&& self, int depth, double cost) -> void {
        if (depth == free_count) {
            if (cost < best_cost) {
                best_cost = cost;
                std::vector<int> assignment(n);
                for (int m : medians) {
                    assignment[m] = m;
                }
                for (int i = 0; i < free_count; ++i) {
                    assignment[free_nodes[i]] = medians[choice[i]];
                }
                best = std::move(assignment);
            }
            return;
        }
        const int node = free_nodes[depth];
        for (int r = 0; r < p; ++r) {
            const double next_cost = cost + dm(node, medians[r]);
            if (residual[r] < instance.demand(node) || next_cost >= best_cost) {
                continue;
            }
            residual[r] -= instance.demand(node);
            choice[depth] = r;
            self(self, depth + 1, next_cost);
            residual[r] += instance.demand(node);
        }
    };
    dfs(dfs, 0, 0.0);
    return best;
}

Nest enumerate_optimal(const ProblemInstance& instance,
                       const DistanceMatrix& dm, const OracleLimits& limits) {
    check_limits(instance, limits);
    const int n = instance.n();
    const int p = instance.p();

    std::vector<int> medians(p);
    for (int i = 0; i < p; ++i) {
        medians[i] = i;
    }

    std::optional<Nest> best;
    while (true) {
        const auto assignment =
            optimal_assignment_for_medians(instance, dm, medians, limits);
        if (assignment) {
            Nest candidate = make_nest(instance, dm, medians, *assignment);
            // Strict improvement keeps the lexicographically smallest median
            // set on ties, since sets are visited in lexicographic order.
            if (!best || candidate.cost < best->cost) {
                best = std::move(candidate);
            }
        }
        // Next p-combination of {0..n-1} in lexicographic order.
        int i = p - 1;
        while (i >= 0 && medians[i] == n - p + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++medians[i];
        for (int j = i + 1; j < p; ++j) {
            medians[j] = medians[j - 1] + 1;
        }
    }
    if (!best) {
        throw NoFeasibleSolution("no median set admits a feasible assignment");
    }
    return *best;
}

}  // namespace cpmp
