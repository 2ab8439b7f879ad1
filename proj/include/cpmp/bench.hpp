#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpmp/cuckoo.hpp"
#include "cpmp/instance.hpp"

namespace cpmp {

inline constexpr const char* kVersion = "cpmp 1.0.0";

struct ParseError : std::runtime_error {
    ParseError(std::string message, int line_number)
        : std::runtime_error("line " + std::to_string(line_number) + ": " +
                             message),
          line(line_number) {}
    int line;
};

enum class InstanceFormat { Canonical, ORLibrary };

// Column roles for the OR-Library adapter. The hosted files ship without a
// schema, so the mapping is configuration: validate once against a real
// file, then freeze.
enum class OrlibField { Id, X, Y, Demand, Capacity, Skip };

struct OrlibConfig {
    std::vector<OrlibField> columns = {OrlibField::Id, OrlibField::X,
                                       OrlibField::Y, OrlibField::Demand};
    // Applied when the column list carries no Capacity entry.
    double uniform_capacity = 120.0;
};

// Parses "x,y,demand,..." into a column list. Throws ParameterError on an
// unknown column name.
std::vector<OrlibField> parse_orlib_columns(const std::string& spec);

// Canonical format: optional '#' comment lines, a "n p" header, then n rows
// "id x y demand capacity". ORLibrary format: "n p" header followed by n
// whitespace-separated records interpreted through the column mapping.
// Throws ParseError with the offending line, InfeasibleInstance when the
// parsed instance cannot satisfy total demand.
ProblemInstance parse_instance(const std::string& text, InstanceFormat format,
                               std::string name = "",
                               const OrlibConfig& orlib = {});

ProblemInstance load_instance(const std::filesystem::path& path,
                              InstanceFormat format,
                              const OrlibConfig& orlib = {});

// instance name -> published best-known cost.
struct BestKnownTable {
    std::map<std::string, double> values;

    std::optional<double> lookup(const std::string& instance) const;
    static BestKnownTable load_csv(const std::filesystem::path& path);
};

struct MedianRow {
    int median_node = -1;
    int assigned_count = 0;
    double supplied_demand = 0.0;
};

struct RunReport {
    std::string instance;
    int p = 0;
    long long best_cost = 0;  // floored objective of the best seed
    double mean_cost = 0.0;   // mean of the per-seed floored best costs
    double wall_time_seconds = 0.0;  // max over seeds, solve only
    std::optional<double> best_known;
    std::optional<long long> improvement;  // best_known - best_cost, if > 0
    std::optional<long long> gap;          // best_cost - best_known, if > 0
    std::optional<double> dev_percent;     // 100*|delta|/best_cost
    std::vector<MedianRow> medians;        // from the best nest
    std::uint64_t seed = 0;                // base seed of the replication
    int n_seeds = 1;
    SolverParams params;
    Nest best_nest;
};

// Fills best_known/improvement/gap/dev_percent from a reference cost.
void attach_best_known(RunReport& report, double best_known);

// Runs solve n_seeds times per instance (seeds seed, seed+1, ...) and
// aggregates per-instance reports in input order. jobs > 1 runs instances
// concurrently; results are merged deterministically. Per-instance solver
// errors become a stderr note and the instance is skipped, the suite
// continues.
std::vector<RunReport> run_benchmark(const std::vector<ProblemInstance>& suite,
                                     const SolverParams& params,
                                     const BestKnownTable& best_known,
                                     int n_seeds, int jobs = 1);

// Emits summary.csv, one detail_<instance>.csv per report and
// manifest.json under out_dir. include_timing=false writes 0.000 in every
// timing field so reruns are byte-identical.
void write_reports(const std::vector<RunReport>& reports,
                   const std::filesystem::path& out_dir,
                   bool include_timing = true);

}  // namespace cpmp
