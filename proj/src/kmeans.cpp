#include "cpmp/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace cpmp {

namespace {

// Per-node preference list over medians, sorted by (distance, median index).
std::vector<int> sorted_median_prefs(const DistanceMatrix& dm, int node,
                                     const std::vector<int>& medians) {
    std::vector<int> prefs = medians;
    std::sort(prefs.begin(), prefs.end(), [&](int a, int b) {
        const double da = dm(node, a);
        const double db = dm(node, b);
        return da != db ? da < db : a < b;
    });
    return prefs;
}

// Self-assigns every median and charges its own demand. Returns false when
// a median cannot even host itself.
bool place_medians(const ProblemInstance& instance,
                   const std::vector<int>& medians,
                   std::vector<int>& assignment,
                   std::vector<double>& residual) {
    residual.assign(medians.size(), 0.0);
    for (size_t r = 0; r < medians.size(); ++r) {
        const int m = medians[r];
        if (instance.demand(m) > instance.capacity(m)) {
            return false;
        }
        assignment[m] = m;
        residual[r] = instance.capacity(m) - instance.demand(m);
    }
    return true;
}

}  // namespace

std::optional<std::vector<int>> assign_nodes(const ProblemInstance& instance,
                                             const DistanceMatrix& dm,
                                             const std::vector<int>& medians) {
    const int n = instance.n();
    const int p = static_cast<int>(medians.size());
    if (p != instance.p()) {
        throw ContractViolation("assign_nodes: |medians|=" +
                                std::to_string(p) + ", expected p=" +
                                std::to_string(instance.p()));
    }

    std::vector<int> assignment(n, -1);
    std::vector<double> residual;
    if (!place_medians(instance, medians, assignment, residual)) {
        return std::nullopt;
    }
    std::vector<int> rank_of(n, -1);
    for (int r = 0; r < p; ++r) {
        rank_of[medians[r]] = r;
    }

    // Global queue over unassigned nodes keyed by the distance to their
    // nearest median that can still take them. Capacities only shrink, so a
    // node's preference pointer moves forward monotonically and a popped
    // entry whose median still fits is exactly the node's current nearest.
    std::vector<std::vector<int>> prefs(n);
    std::vector<int> next_pref(n, 0);
    using Entry = std::tuple<double, int, int>;  // distance, node, pref index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

    auto push_next = [&](int node) -> bool {
        int& r = next_pref[node];
        while (r < p) {
            const int m = prefs[node][r];
            if (residual[rank_of[m]] >= instance.demand(node)) {
                queue.emplace(dm(node, m), node, r);
                return true;
            }
            ++r;
        }
        return false;  // no median can take this node anymore
    };

    for (int i = 0; i < n; ++i) {
        if (assignment[i] >= 0) {
            continue;
        }
        prefs[i] = sorted_median_prefs(dm, i, medians);
        if (!push_next(i)) {
            return std::nullopt;
        }
    }

    while (!queue.empty()) {
        const auto [dist, node, pref_idx] = queue.top();
        queue.pop();
        const int m = prefs[node][pref_idx];
        if (residual[rank_of[m]] >= instance.demand(node)) {
            assignment[node] = m;
            residual[rank_of[m]] -= instance.demand(node);
        } else {
            next_pref[node] = pref_idx + 1;
            if (!push_next(node)) {
                return std::nullopt;
            }
        }
    }
    return assignment;
}

std::optional<std::vector<int>> assign_nodes_in_order(
    const ProblemInstance& instance, const DistanceMatrix& dm,
    const std::vector<int>& medians, const std::vector<int>& order) {
    const int n = instance.n();
    std::vector<int> assignment(n, -1);
    std::vector<double> residual;
    if (!place_medians(instance, medians, assignment, residual)) {
        return std::nullopt;
    }
    std::vector<int> rank_of(n, -1);
    for (size_t r = 0; r < medians.size(); ++r) {
        rank_of[medians[r]] = static_cast<int>(r);
    }
    for (int node : order) {
        if (assignment[node] >= 0) {
            continue;
        }
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int m : medians) {
            if (residual[rank_of[m]] < instance.demand(node)) {
                continue;
            }
            const double d = dm(node, m);
            if (d < best_d || (d == best_d && m < best)) {
                best = m;
                best_d = d;
            }
        }
        if (best < 0) {
            return std::nullopt;
        }
        assignment[node] = best;
        residual[rank_of[best]] -= instance.demand(node);
    }
    return assignment;
}

int best_median_of_cluster(const DistanceMatrix& dm,
                           const std::vector<int>& members) {
    if (members.empty()) {
        throw ContractViolation("best_median_of_cluster: empty member list");
    }
    int best = -1;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int candidate : members) {
        double sum = 0.0;
        for (int v : members) {
            sum += dm(v, candidate);
        }
        if (sum < best_sum || (sum == best_sum && candidate < best)) {
            best = candidate;
            best_sum = sum;
        }
    }
    return best;
}

Nest make_nest(const ProblemInstance& instance, const DistanceMatrix& dm,
               std::vector<int> medians, std::vector<int> assignment) {
    Nest nest;
    nest.medians = std::move(medians);
    std::sort(nest.medians.begin(), nest.medians.end());
    nest.assignment = std::move(assignment);
    nest.loads.assign(nest.medians.size(), 0.0);
    for (int i = 0; i < instance.n(); ++i) {
        const int r = nest.median_rank(nest.assignment[i]);
        if (r < 0) {
            throw ContractViolation("make_nest: node " + std::to_string(i) +
                                    " assigned to non-median");
        }
        nest.loads[r] += instance.demand(i);
    }
    nest.cost = evaluate_cost(dm, nest.assignment);
    return nest;
}

std::vector<Cluster> clusters_of(const ProblemInstance& instance,
                                 const DistanceMatrix& dm, const Nest& nest) {
    std::vector<Cluster> clusters(nest.medians.size());
    for (size_t r = 0; r < nest.medians.size(); ++r) {
        clusters[r].median = nest.medians[r];
    }
    for (int i = 0; i < instance.n(); ++i) {
        const int r = nest.median_rank(nest.assignment[i]);
        if (r < 0) {
            throw ContractViolation("clusters_of: node " + std::to_string(i) +
                                    " assigned to non-median");
        }
        clusters[r].members.push_back(i);
        clusters[r].intra_cost += dm(i, clusters[r].median);
        clusters[r].load += instance.demand(i);
    }
    return clusters;
}

Nest local_improve(const ProblemInstance& instance, const DistanceMatrix& dm,
                   const Nest& nest, int max_local_iters) {
    Nest current = nest;
    for (int pass = 0; pass < max_local_iters; ++pass) {
        const auto clusters = clusters_of(instance, dm, current);
        std::vector<int> relocated;
        relocated.reserve(clusters.size());
        for (const Cluster& c : clusters) {
            relocated.push_back(best_median_of_cluster(dm, c.members));
        }
        std::sort(relocated.begin(), relocated.end());
        if (relocated == current.medians) {
            break;
        }
        const auto assignment = assign_nodes(instance, dm, relocated);
        if (!assignment) {
            break;  // infeasible configurations are skipped, not repaired
        }
        Nest candidate =
            make_nest(instance, dm, std::move(relocated), *assignment);
        if (candidate.cost < current.cost) {
            current = std::move(candidate);
        } else {
            break;
        }
    }
    return current;
}

Nest seed_nest(const ProblemInstance& instance, const DistanceMatrix& dm,
               Rng& rng, const LocalSearchConfig& config) {
    const int n = instance.n();
    const int p = instance.p();
    for (int attempt = 0; attempt < config.max_seed_attempts; ++attempt) {
        std::vector<int> medians = rng.sample_distinct(n, p);
        std::sort(medians.begin(), medians.end());
        const auto assignment = assign_nodes(instance, dm, medians);
        if (!assignment) {
            continue;
        }
        Nest best = local_improve(instance, dm,
                                  make_nest(instance, dm, medians, *assignment),
                                  config.max_local_iters);
        for (int extra = 1; extra < config.n_assign_orders; ++extra) {
            std::vector<int> order;
            order.reserve(n - p);
            for (int v : rng.permutation(n)) {
                if (std::find(medians.begin(), medians.end(), v) ==
                    medians.end()) {
                    order.push_back(v);
                }
            }
            const auto alt =
                assign_nodes_in_order(instance, dm, medians, order);
            if (!alt) {
                continue;
            }
            Nest candidate =
                local_improve(instance, dm, make_nest(instance, dm, medians, *alt),
                              config.max_local_iters);
            if (candidate.cost < best.cost) {
                best = std::move(candidate);
            }
        }
        return best;
    }
    throw SeedingFailed("no feasible nest after " +
                        std::to_string(config.max_seed_attempts) +
                        " median draws on instance '" + instance.name() + "'");
}

double kmeans_objective(const ProblemInstance& instance,
                        const std::vector<Cluster>& clusters) {
    double total = 0.0;
    for (const Cluster& c : clusters) {
        const Node& center = instance.node(c.median);
        for (int v : c.members) {
            const double dx = instance.node(v).x - center.x;
            const double dy = instance.node(v).y - center.y;
            total += dx * dx + dy * dy;
        }
    }
    return total;
}

}  // namespace cpmp
