#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cpmp {

// Thrown when an operation is called outside its contract (indexing errors,
// malformed arguments). These are programming errors, not data conditions.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when an instance cannot admit any solution (total demand exceeds
// the p largest capacities).
struct InfeasibleInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Node {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double demand = 0.0;    // q_i
    double capacity = 0.0;  // Q_j, effective if this node is chosen as median
};

// Coordinate bounding box of an instance.
struct Bounds {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

class ProblemInstance {
  public:
    // Validates node invariants and the necessary feasibility condition
    // (sum of demands <= sum of the p largest capacities). Throws
    // ContractViolation on malformed data, InfeasibleInstance otherwise.
    ProblemInstance(std::string name, std::vector<Node> nodes, int p);

    int n() const { return static_cast<int>(nodes_.size()); }
    int p() const { return p_; }
    const std::string& name() const { return name_; }
    const Node& node(int i) const { return nodes_[i]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Bounds& bounds() const { return bounds_; }

    double demand(int i) const { return nodes_[i].demand; }
    double capacity(int i) const { return nodes_[i].capacity; }
    double total_demand() const { return total_demand_; }

  private:
    std::string name_;
    std::vector<Node> nodes_;
    int p_ = 0;
    Bounds bounds_;
    double total_demand_ = 0.0;
};

enum class DistanceMode {
    FloatExact,    // exact Euclidean distances
    PerPairFloor,  // each pairwise distance floored to an integer
};

// Symmetric n x n Euclidean distance matrix with zero diagonal.
class DistanceMatrix {
  public:
    DistanceMatrix(int n, DistanceMode mode)
        : n_(n), mode_(mode), d_(static_cast<size_t>(n) * n, 0.0) {}

    double operator()(int i, int j) const {
        return d_[static_cast<size_t>(i) * n_ + j];
    }
    void set(int i, int j, double v) {
        d_[static_cast<size_t>(i) * n_ + j] = v;
    }

    int size() const { return n_; }
    DistanceMode mode() const { return mode_; }

  private:
    int n_;
    DistanceMode mode_;
    std::vector<double> d_;
};

DistanceMatrix build_distance_matrix(const ProblemInstance& instance,
                                     DistanceMode mode);

// One candidate solution: p distinct medians, a full node->median map,
// per-median loads and the total distance cost.
struct Nest {
    std::vector<int> medians;     // sorted ascending, size p
    std::vector<int> assignment;  // assignment[i] = median node of node i
    std::vector<double> loads;    // aligned with medians
    double cost = 0.0;

    // Index into medians/loads of a median node, -1 if not a median.
    int median_rank(int node) const;
};

// Total distance of an assignment, summed in ascending node-index order.
// Throws ContractViolation if any entry is out of [0, n).
double evaluate_cost(const DistanceMatrix& dm,
                     const std::vector<int>& assignment);

enum class Constraint {
    AssignOnce,      // every node mapped to exactly one valid target
    AssignToMedian,  // targets must be selected medians
    MedianCount,     // exactly p medians
    Capacity,        // per-median load within capacity
};

const char* to_string(Constraint c);

struct Violation {
    Constraint constraint;
    int index;  // offending node or median, -1 when global
    std::string detail;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Violation> violations;
};

// Checks the assignment/median-count/capacity constraints. Violations are
// data, not errors; the report lists every one found.
FeasibilityReport check_feasibility(const ProblemInstance& instance,
                                    const Nest& nest);

}  // namespace cpmp
