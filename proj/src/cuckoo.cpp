#include "cpmp/cuckoo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace cpmp {

namespace {

constexpr double kSineZeroEps = 1e-12;

void track_best(Population& population, const Nest& nest) {
    if (nest.cost < population.best_ever.cost) {
        population.best_ever = nest;
    }
}

double mean_cost(const Population& population) {
    double sum = 0.0;
    for (const Nest& nest : population.nests) {
        sum += nest.cost;
    }
    return sum / static_cast<double>(population.nests.size());
}

void refresh_fitness(Population& population) {
    population.fitness.resize(population.nests.size());
    for (size_t i = 0; i < population.nests.size(); ++i) {
        population.fitness[i] = fitness_of(population.nests[i].cost);
    }
}

}  // namespace

void SolverParams::validate(int n) const {
    if (n_nests < 1) {
        throw ParameterError("n_nests must be positive");
    }
    if (generations < 1) {
        throw ParameterError("generations must be positive");
    }
    if (lambda < 1.0 || lambda > 3.0) {
        throw ParameterError("lambda must lie in [1, 3]");
    }
    if (pa < 0.0 || pa > 1.0) {
        throw ParameterError("pa must lie in [0, 1]");
    }
    if (mutation_k < 0 || mutation_k > n) {
        throw ParameterError("mutation_k must lie in [0, n]");
    }
    if (max_local_iters < 1 || max_seed_attempts < 1 || n_assign_orders < 1) {
        throw ParameterError("iteration limits must be positive");
    }
}

LevyCoefficient levy_coefficient(double lambda) {
    if (lambda < 1.0 || lambda > 3.0) {
        throw ParameterError("levy_coefficient: lambda must lie in [1, 3]");
    }
    const double s = std::sin(M_PI * lambda / 2.0);
    if (std::abs(s) < kSineZeroEps) {
        return {0.0, true};
    }
    const double signed_pow =
        std::copysign(std::pow(std::abs(s), 1.0 / lambda), s);
    const double numerator = std::tgamma(1.0 + lambda) * signed_pow;
    const double denominator = std::tgamma((1.0 + lambda) / 2.0) * lambda *
                               std::pow(2.0, (lambda - 1.0) / 2.0);
    return {numerator / denominator, false};
}

ContinuousNest encode_nest(const ProblemInstance& instance, const Nest& nest) {
    ContinuousNest continuous;
    continuous.bounds = instance.bounds();
    continuous.coords.reserve(2 * nest.medians.size());
    for (int m : nest.medians) {
        continuous.coords.push_back(instance.node(m).x);
        continuous.coords.push_back(instance.node(m).y);
    }
    return continuous;
}

ContinuousNest levy_step_kernel(const ContinuousNest& current,
                                const ContinuousNest& other, double levy,
                                double alpha) {
    if (current.coords.size() != other.coords.size()) {
        throw ContractViolation("levy_step: dimension mismatch");
    }
    ContinuousNest next = current;
    for (size_t q = 0; q < next.coords.size(); ++q) {
        const double step = current.coords[q] - other.coords[q];
        double v = current.coords[q] + step * levy * alpha;
        const bool is_x = q % 2 == 0;
        const double lo = is_x ? current.bounds.x_min : current.bounds.y_min;
        const double hi = is_x ? current.bounds.x_max : current.bounds.y_max;
        next.coords[q] = std::clamp(v, lo, hi);
    }
    return next;
}

ContinuousNest levy_step(const ContinuousNest& current,
                         const ContinuousNest& other, double lambda,
                         Rng& rng) {
    const double alpha = rng.uniform(-1.0, 1.0);
    return levy_step_kernel(current, other, levy_coefficient(lambda).value,
                            alpha);
}

std::optional<Nest> decode(const ProblemInstance& instance,
                           const DistanceMatrix& dm,
                           const ContinuousNest& continuous,
                           const LocalSearchConfig& config) {
    const int n = instance.n();
    const int p = static_cast<int>(continuous.coords.size() / 2);
    if (continuous.coords.empty() || continuous.coords.size() % 2 != 0 ||
        p > n) {
        throw ContractViolation("decode: malformed continuous position");
    }
    std::vector<bool> chosen(n, false);
    std::vector<int> medians;
    medians.reserve(p);
    for (int k = 0; k < p; ++k) {
        const double cx = continuous.coords[2 * k];
        const double cy = continuous.coords[2 * k + 1];
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int v = 0; v < n; ++v) {
            if (chosen[v]) {
                continue;
            }
            const double dx = instance.node(v).x - cx;
            const double dy = instance.node(v).y - cy;
            const double d = dx * dx + dy * dy;
            if (d < best_d) {
                best = v;
                best_d = d;
            }
        }
        chosen[best] = true;
        medians.push_back(best);
    }
    std::sort(medians.begin(), medians.end());
    const auto assignment = assign_nodes(instance, dm, medians);
    if (!assignment) {
        return std::nullopt;
    }
    return local_improve(instance, dm,
                         make_nest(instance, dm, std::move(medians), *assignment),
                         config.max_local_iters);
}

double fitness_of(double cost) {
    if (cost < 0.0) {
        throw ContractViolation("fitness_of: negative cost");
    }
    return 1.0 / (1.0 + cost);
}

double survival_probability(double fit_p, double max_fit) {
    if (max_fit <= 0.0) {
        throw ContractViolation("survival_probability: max_fit must be > 0");
    }
    if (fit_p < 0.0 || fit_p > max_fit) {
        throw ContractViolation(
            "survival_probability: fit_p outside [0, max_fit]");
    }
    return 0.9 * fit_p / max_fit + 0.1;
}

double resample_coordinate(double lo, double hi, double u) {
    return lo + u * (hi - lo);
}

ContinuousNest abandon_and_resample(const Bounds& bounds, int p, Rng& rng) {
    ContinuousNest continuous;
    continuous.bounds = bounds;
    continuous.coords.reserve(2 * p);
    for (int k = 0; k < p; ++k) {
        continuous.coords.push_back(
            resample_coordinate(bounds.x_min, bounds.x_max, rng.uniform01()));
        continuous.coords.push_back(
            resample_coordinate(bounds.y_min, bounds.y_max, rng.uniform01()));
    }
    return continuous;
}

int roulette_select(const std::vector<double>& weights, Rng& rng) {
    if (weights.empty()) {
        throw ContractViolation("roulette_select: empty weight list");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) {
            throw ContractViolation("roulette_select: negative weight");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw SelectionUndefined("roulette_select: all weights are zero");
    }
    const double target = rng.uniform01() * total;
    double running = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        running += weights[i];
        if (target < running) {
            return static_cast<int>(i);
        }
    }
    // Rounding can leave target == total; the last positive weight wins.
    for (size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(weights.size()) - 1;
}

Nest mutate_nest(const ProblemInstance& instance, const DistanceMatrix& dm,
                 const Nest& nest, int k, Rng& rng, int max_local_iters) {
    const int n = instance.n();
    Nest current = nest;

    // Victim pool: non-median nodes, weighted by distance to their median
    // (farthest = worst assigned = likeliest draw).
    std::vector<int> pool;
    std::vector<double> pool_weight;
    for (int v = 0; v < n; ++v) {
        if (current.median_rank(v) >= 0) {
            continue;
        }
        pool.push_back(v);
        pool_weight.push_back(dm(v, current.assignment[v]));
    }

    const int draws = std::min<int>(k, static_cast<int>(pool.size()));
    for (int d = 0; d < draws; ++d) {
        const double total =
            std::accumulate(pool_weight.begin(), pool_weight.end(), 0.0);
        if (total <= 0.0) {
            break;  // every remaining node sits on its median
        }
        const int picked = roulette_select(pool_weight, rng);
        const int node = pool[picked];
        pool.erase(pool.begin() + picked);
        pool_weight.erase(pool_weight.begin() + picked);

        const int from = current.assignment[node];
        std::vector<int> candidates;
        std::vector<double> weights;
        for (size_t r = 0; r < current.medians.size(); ++r) {
            const int m = current.medians[r];
            if (m == from) {
                continue;
            }
            if (current.loads[r] + instance.demand(node) >
                instance.capacity(m)) {
                continue;
            }
            candidates.push_back(m);
            weights.push_back(1.0 / (1.0 + dm(node, m)));
        }
        if (candidates.empty()) {
            continue;  // nowhere with room; the node keeps its median
        }
        const int target = candidates[roulette_select(weights, rng)];
        current.loads[current.median_rank(from)] -= instance.demand(node);
        current.loads[current.median_rank(target)] += instance.demand(node);
        current.assignment[node] = target;
    }
    current.cost = evaluate_cost(dm, current.assignment);
    return local_improve(instance, dm, current, max_local_iters);
}

void run_generation(const ProblemInstance& instance, const DistanceMatrix& dm,
                    Population& population, const SolverParams& params,
                    Rng& rng) {
    const int m = static_cast<int>(population.nests.size());
    const LocalSearchConfig config = params.local_config();

    // Flight phase: propose against a random distinct partner, keep
    // improvements.
    for (int i = 0; i < m; ++i) {
        int partner = i;
        if (m > 1) {
            const int r = rng.uniform_int(m - 1);
            partner = r >= i ? r + 1 : r;
        }
        const ContinuousNest current = encode_nest(instance, population.nests[i]);
        const ContinuousNest other =
            encode_nest(instance, population.nests[partner]);
        const ContinuousNest proposal =
            levy_step(current, other, params.lambda, rng);
        auto candidate = decode(instance, dm, proposal, config);
        if (candidate && candidate->cost < population.nests[i].cost) {
            population.nests[i] = std::move(*candidate);
            track_best(population, population.nests[i]);
        }
    }

    // Survival phase: eggs detected against the post-flight fitness snapshot
    // are abandoned and resampled uniformly inside the bounding box.
    std::vector<double> fits(m);
    double max_fit = 0.0;
    for (int i = 0; i < m; ++i) {
        fits[i] = fitness_of(population.nests[i].cost);
        max_fit = std::max(max_fit, fits[i]);
    }
    for (int i = 0; i < m; ++i) {
        const double survival = survival_probability(fits[i], max_fit);
        if (rng.uniform01() <= survival) {
            continue;
        }
        bool replaced = false;
        for (int attempt = 0; attempt < params.max_seed_attempts; ++attempt) {
            const ContinuousNest fresh =
                abandon_and_resample(instance.bounds(), instance.p(), rng);
            auto candidate = decode(instance, dm, fresh, config);
            if (candidate) {
                population.nests[i] = std::move(*candidate);
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            population.nests[i] = seed_nest(instance, dm, rng, config);
        }
        track_best(population, population.nests[i]);
    }

    // Mutation phase.
    const int k = std::min(params.mutation_k, instance.n() - instance.p());
    for (int i = 0; i < m; ++i) {
        population.nests[i] = mutate_nest(instance, dm, population.nests[i], k,
                                          rng, params.max_local_iters);
        track_best(population, population.nests[i]);
    }

    refresh_fitness(population);
    population.generation += 1;
}

SolveResult solve(const ProblemInstance& instance, const SolverParams& params) {
    params.validate(instance.n());
    const auto levy = levy_coefficient(params.lambda);
    if (levy.degenerate) {
        std::fprintf(stderr,
                     "warning: lambda=%g zeroes the flight coefficient; "
                     "proposals reduce to the identity\n",
                     params.lambda);
    }

    const auto start = std::chrono::steady_clock::now();
    const DistanceMatrix dm =
        build_distance_matrix(instance, params.distance_mode);
    Rng rng(params.seed);
    const LocalSearchConfig config = params.local_config();

    Population population;
    population.nests.reserve(params.n_nests);
    for (int i = 0; i < params.n_nests; ++i) {
        population.nests.push_back(seed_nest(instance, dm, rng, config));
    }
    population.best_ever = population.nests[0];
    for (const Nest& nest : population.nests) {
        track_best(population, nest);
    }
    refresh_fitness(population);

    SolveResult result;
    result.history.reserve(params.generations + 1);
    result.history.push_back(
        {population.best_ever.cost, mean_cost(population)});
    for (int g = 0; g < params.generations; ++g) {
        run_generation(instance, dm, population, params, rng);
        result.history.push_back(
            {population.best_ever.cost, mean_cost(population)});
    }
    result.best = std::move(population.best_ever);
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

}  // namespace cpmp
