#include "cpmp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace cpmp {

ProblemInstance::ProblemInstance(std::string name, std::vector<Node> nodes,
                                 int p)
    : name_(std::move(name)), nodes_(std::move(nodes)), p_(p) {
    const int n = static_cast<int>(nodes_.size());
    if (n == 0) {
        throw ContractViolation("instance has no nodes");
    }
    if (p_ < 1 || p_ > n) {
        throw ContractViolation("median count p=" + std::to_string(p_) +
                                " outside [1, " + std::to_string(n) + "]");
    }
    bounds_.x_min = bounds_.x_max = nodes_[0].x;
    bounds_.y_min = bounds_.y_max = nodes_[0].y;
    std::vector<double> capacities;
    capacities.reserve(n);
    for (int i = 0; i < n; ++i) {
        const Node& nd = nodes_[i];
        if (nd.id != i) {
            throw ContractViolation("node ids must be contiguous 0..n-1, got " +
                                    std::to_string(nd.id) + " at position " +
                                    std::to_string(i));
        }
        if (!std::isfinite(nd.x) || !std::isfinite(nd.y)) {
            throw ContractViolation("non-finite coordinates at node " +
                                    std::to_string(i));
        }
        if (nd.demand < 0.0) {
            throw ContractViolation("negative demand at node " +
                                    std::to_string(i));
        }
        if (nd.capacity <= 0.0) {
            throw ContractViolation("non-positive capacity at node " +
                                    std::to_string(i));
        }
        bounds_.x_min = std::min(bounds_.x_min, nd.x);
        bounds_.x_max = std::max(bounds_.x_max, nd.x);
        bounds_.y_min = std::min(bounds_.y_min, nd.y);
        bounds_.y_max = std::max(bounds_.y_max, nd.y);
        total_demand_ += nd.demand;
        capacities.push_back(nd.capacity);
    }
    // Necessary condition: the p largest capacities must cover total demand.
    std::partial_sort(capacities.begin(), capacities.begin() + p_,
                      capacities.end(), std::greater<>());
    double best_capacity = 0.0;
    for (int j = 0; j < p_; ++j) {
        best_capacity += capacities[j];
    }
    if (total_demand_ > best_capacity) {
        throw InfeasibleInstance(
            "instance '" + name_ + "': total demand " +
            std::to_string(total_demand_) + " exceeds the " +
            std::to_string(p_) + " largest capacities (" +
            std::to_string(best_capacity) + ")");
    }
}

DistanceMatrix build_distance_matrix(const ProblemInstance& instance,
                                     DistanceMode mode) {
    const int n = instance.n();
    DistanceMatrix dm(n, mode);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = instance.node(i).x - instance.node(j).x;
            const double dy = instance.node(i).y - instance.node(j).y;
            double d = std::sqrt(dx * dx + dy * dy);
            if (mode == DistanceMode::PerPairFloor) {
                d = std::floor(d);
            }
            dm.set(i, j, d);
            dm.set(j, i, d);
        }
    }
    return dm;
}

int Nest::median_rank(int node) const {
    const auto it = std::lower_bound(medians.begin(), medians.end(), node);
    if (it == medians.end() || *it != node) {
        return -1;
    }
    return static_cast<int>(it - medians.begin());
}

double evaluate_cost(const DistanceMatrix& dm,
                     const std::vector<int>& assignment) {
    const int n = dm.size();
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
        const int j = assignment[i];
        if (j < 0 || j >= n) {
            throw ContractViolation("assignment[" + std::to_string(i) +
                                    "]=" + std::to_string(j) +
                                    " out of range");
        }
        total += dm(i, j);
    }
    return total;
}

const char* to_string(Constraint c) {
    switch (c) {
        case Constraint::AssignOnce:
            return "ASSIGN_ONCE";
        case Constraint::AssignToMedian:
            return "ASSIGN_TO_MEDIAN";
        case Constraint::MedianCount:
            return "MEDIAN_COUNT";
        case Constraint::Capacity:
            return "CAPACITY";
    }
    return "UNKNOWN";
}

FeasibilityReport check_feasibility(const ProblemInstance& instance,
                                    const Nest& nest) {
    const int n = instance.n();
    FeasibilityReport report;
    auto add = [&report](Constraint c, int index, std::string detail) {
        report.violations.push_back({c, index, std::move(detail)});
    };

    if (static_cast<int>(nest.assignment.size()) != n) {
        throw ContractViolation("assignment length " +
                                std::to_string(nest.assignment.size()) +
                                " does not match n=" + std::to_string(n));
    }

    // Eq. 4: exactly p distinct medians.
    std::vector<int> meds = nest.medians;
    std::sort(meds.begin(), meds.end());
    meds.erase(std::unique(meds.begin(), meds.end()), meds.end());
    if (static_cast<int>(meds.size()) != instance.p()) {
        add(Constraint::MedianCount, -1,
            "have " + std::to_string(meds.size()) + " distinct medians, need " +
                std::to_string(instance.p()));
    }
    for (int m : meds) {
        if (m < 0 || m >= n) {
            add(Constraint::MedianCount, m, "median index out of range");
        }
    }

    // Eqs. 2-3: every node mapped to exactly one selected median.
    std::vector<double> load(meds.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        const int j = nest.assignment[i];
        if (j < 0 || j >= n) {
            add(Constraint::AssignOnce, i,
                "node " + std::to_string(i) + " has no valid target (" +
                    std::to_string(j) + ")");
            continue;
        }
        const auto it = std::lower_bound(meds.begin(), meds.end(), j);
        if (it == meds.end() || *it != j) {
            add(Constraint::AssignToMedian, i,
                "node " + std::to_string(i) + " assigned to non-median " +
                    std::to_string(j));
            continue;
        }
        load[it - meds.begin()] += instance.demand(i);
    }

    // Eq. 5: per-median load within capacity.
    for (size_t r = 0; r < meds.size(); ++r) {
        const int m = meds[r];
        if (m < 0 || m >= n) {
            continue;
        }
        if (load[r] > instance.capacity(m)) {
            add(Constraint::Capacity, m,
                "median " + std::to_string(m) + " load " +
                    std::to_string(load[r]) + " exceeds capacity " +
                    std::to_string(instance.capacity(m)));
        }
    }

    report.feasible = report.violations.empty();
    return report;
}

}  // namespace cpmp
