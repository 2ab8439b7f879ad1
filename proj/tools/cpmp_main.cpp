#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpmp/bench.hpp"
#include "cpmp/cuckoo.hpp"
#include "cpmp/kmeans.hpp"
#include "cpmp/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;

struct CommonOptions {
    std::string format = "canonical";
    std::string orlib_columns = "id,x,y,demand";
    double orlib_capacity = 120.0;

    cpmp::InstanceFormat instance_format() const {
        return format == "orlib" ? cpmp::InstanceFormat::ORLibrary
                                 : cpmp::InstanceFormat::Canonical;
    }
    cpmp::OrlibConfig orlib_config() const {
        return {cpmp::parse_orlib_columns(orlib_columns), orlib_capacity};
    }
};

void add_format_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--format", opts.format, "Instance file format")
        ->check(CLI::IsMember({"canonical", "orlib"}));
    cmd->add_option("--orlib-columns", opts.orlib_columns,
                    "Column mapping for orlib files "
                    "(comma list of id,x,y,demand,capacity,skip)");
    cmd->add_option("--orlib-capacity", opts.orlib_capacity,
                    "Uniform capacity for orlib files without a capacity "
                    "column");
}

void add_solver_options(CLI::App* cmd, cpmp::SolverParams& params,
                        std::string& distance_mode) {
    cmd->add_option("--generations", params.generations, "Generation count");
    cmd->add_option("--nests", params.n_nests, "Population size");
    cmd->add_option("--lambda", params.lambda, "Flight exponent in [1,3]");
    cmd->add_option("--pa", params.pa, "Reserved abandonment knob in [0,1]");
    cmd->add_option("--mutation-k", params.mutation_k,
                    "Nodes re-seated per mutation");
    cmd->add_option("--seed", params.seed, "Base random seed");
    cmd->add_option("--max-local-iters", params.max_local_iters,
                    "Local improvement pass cap");
    cmd->add_option("--max-seed-attempts", params.max_seed_attempts,
                    "Median draw budget per nest");
    cmd->add_option("--assign-orders", params.n_assign_orders,
                    "Assignment orders tried per seeded nest");
    cmd->add_option("--distance-mode", distance_mode,
                    "float: exact distances, floored total; floor: each "
                    "pairwise distance floored")
        ->check(CLI::IsMember({"float", "floor"}));
}

json nest_to_json(const cpmp::Nest& nest) {
    return json{{"medians", nest.medians},
                {"assignment", nest.assignment},
                {"loads", nest.loads},
                {"cost", nest.cost}};
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

std::vector<cpmp::ProblemInstance> load_suite(const fs::path& dir,
                                              const CommonOptions& opts) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<cpmp::ProblemInstance> suite;
    suite.reserve(files.size());
    for (const fs::path& file : files) {
        suite.push_back(cpmp::load_instance(file, opts.instance_format(),
                                            opts.orlib_config()));
    }
    return suite;
}

int run_solve(const std::string& instance_path, const CommonOptions& opts,
              cpmp::SolverParams params, const std::string& out_dir,
              bool timing) {
    const auto instance = cpmp::load_instance(
        instance_path, opts.instance_format(), opts.orlib_config());
    const auto result = cpmp::solve(instance, params);
    const long long floored =
        static_cast<long long>(std::floor(result.best.cost));
    std::cout << instance.name() << ": best " << floored << " (raw "
              << result.best.cost << ") in " << result.wall_time_seconds
              << " s\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        json solution = nest_to_json(result.best);
        solution["instance"] = instance.name();
        solution["p"] = instance.p();
        solution["best_cost"] = floored;
        write_text(fs::path(out_dir) / "solution.json",
                   solution.dump(2) + "\n");

        std::string history = "generation,best_cost,mean_cost\n";
        for (size_t g = 0; g < result.history.size(); ++g) {
            char line[96];
            std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f\n", g,
                          result.history[g].best_cost,
                          result.history[g].mean_cost);
            history += line;
        }
        write_text(fs::path(out_dir) / "history.csv", history);

        json manifest = {
            {"version", cpmp::kVersion},
            {"instance", instance.name()},
            {"seed", params.seed},
            {"wall_time_seconds", timing ? result.wall_time_seconds : 0.0},
        };
        write_text(fs::path(out_dir) / "manifest.json",
                   manifest.dump(2) + "\n");
    }
    return kExitOk;
}

int run_bench(const std::string& suite_dir, const std::string& best_known_path,
              int seeds, int jobs, const CommonOptions& opts,
              const cpmp::SolverParams& params, const std::string& out_dir,
              bool timing) {
    const auto suite = load_suite(suite_dir, opts);
    if (suite.empty()) {
        std::cerr << "no .txt instances under " << suite_dir << "\n";
        return kExitParse;
    }
    cpmp::BestKnownTable table;
    if (!best_known_path.empty()) {
        table = cpmp::BestKnownTable::load_csv(best_known_path);
    }
    const auto reports =
        cpmp::run_benchmark(suite, params, table, seeds, jobs);
    cpmp::write_reports(reports, out_dir, timing);
    for (const auto& r : reports) {
        std::cout << r.instance << ": best " << r.best_cost << " mean "
                  << r.mean_cost;
        if (r.dev_percent) {
            std::cout << " dev " << *r.dev_percent << "%";
        }
        std::cout << "\n";
    }
    std::cout << "reports written to " << out_dir << "\n";
    return kExitOk;
}

int run_oracle(const std::string& instance_path, const CommonOptions& opts,
               const std::string& out_path) {
    const auto instance = cpmp::load_instance(
        instance_path, opts.instance_format(), opts.orlib_config());
    const auto dm =
        cpmp::build_distance_matrix(instance, cpmp::DistanceMode::FloatExact);
    const cpmp::Nest best = cpmp::enumerate_optimal(instance, dm);
    std::cout << instance.name() << ": optimal cost " << best.cost
              << " medians";
    for (int m : best.medians) {
        std::cout << ' ' << m;
    }
    std::cout << "\n";
    if (!out_path.empty()) {
        json solution = nest_to_json(best);
        solution["instance"] = instance.name();
        solution["p"] = instance.p();
        write_text(out_path, solution.dump(2) + "\n");
    }
    return kExitOk;
}

int run_check(const std::string& solution_path,
              const std::string& instance_path, const CommonOptions& opts) {
    const auto instance = cpmp::load_instance(
        instance_path, opts.instance_format(), opts.orlib_config());
    std::ifstream in(solution_path);
    if (!in) {
        throw std::runtime_error("cannot open solution file: " +
                                 solution_path);
    }
    json solution = json::parse(in);

    cpmp::Nest nest;
    nest.medians = solution.at("medians").get<std::vector<int>>();
    nest.assignment = solution.at("assignment").get<std::vector<int>>();
    const double stored_cost = solution.at("cost").get<double>();

    const auto dm =
        cpmp::build_distance_matrix(instance, cpmp::DistanceMode::FloatExact);
    const double recomputed = cpmp::evaluate_cost(dm, nest.assignment);
    const auto report = cpmp::check_feasibility(instance, nest);

    const bool cost_matches =
        std::abs(recomputed - stored_cost) <= 1e-6 * std::max(1.0, recomputed);
    std::cout << "feasible: " << (report.feasible ? "yes" : "no") << "\n";
    std::cout << "stored cost: " << stored_cost
              << ", re-evaluated: " << recomputed << "\n";
    for (const auto& v : report.violations) {
        std::cout << "violation " << cpmp::to_string(v.constraint) << " @ "
                  << v.index << ": " << v.detail << "\n";
    }
    if (!report.feasible || !cost_matches) {
        return kExitSolver;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacitated p-median solver and benchmark harness"};
    app.require_subcommand(1);

    CommonOptions common;
    cpmp::SolverParams params;
    std::string distance_mode = "float";
    std::string instance_path;
    std::string out_dir;
    std::string suite_dir;
    std::string best_known_path;
    std::string solution_path;
    std::string oracle_out;
    int seeds = 5;
    int jobs = 1;
    bool no_timing = false;

    auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
    solve_cmd->add_option("--instance", instance_path, "Instance file")
        ->required();
    add_format_options(solve_cmd, common);
    add_solver_options(solve_cmd, params, distance_mode);
    solve_cmd->add_option("--out", out_dir, "Output directory");
    solve_cmd->add_flag("--no-timing", no_timing,
                        "Zero the timing fields in output files");

    auto* bench_cmd =
        app.add_subcommand("bench", "Run a suite with seeded replications");
    bench_cmd->add_option("--suite", suite_dir, "Directory of .txt instances")
        ->required();
    bench_cmd->add_option("--best-known", best_known_path,
                          "CSV instance,best_known");
    bench_cmd->add_option("--seeds", seeds, "Replications per instance");
    bench_cmd->add_option("--jobs", jobs, "Concurrent instances");
    add_format_options(bench_cmd, common);
    add_solver_options(bench_cmd, params, distance_mode);
    bench_cmd->add_option("--out", out_dir, "Output directory")->required();
    bench_cmd->add_flag("--no-timing", no_timing,
                        "Zero the timing fields so reruns are byte-identical");

    auto* oracle_cmd =
        app.add_subcommand("oracle", "Exact solution of a tiny instance");
    oracle_cmd->add_option("--instance", instance_path, "Instance file")
        ->required();
    add_format_options(oracle_cmd, common);
    oracle_cmd->add_option("--out", oracle_out, "Write solution JSON here");

    auto* check_cmd = app.add_subcommand(
        "check", "Re-evaluate and feasibility-check a stored solution");
    check_cmd->add_option("--solution", solution_path, "Solution JSON")
        ->required();
    check_cmd->add_option("--instance", instance_path, "Instance file")
        ->required();
    add_format_options(check_cmd, common);

    CLI11_PARSE(app, argc, argv);

    params.distance_mode = distance_mode == "floor"
                               ? cpmp::DistanceMode::PerPairFloor
                               : cpmp::DistanceMode::FloatExact;

    try {
        if (solve_cmd->parsed()) {
            return run_solve(instance_path, common, params, out_dir,
                             !no_timing);
        }
        if (bench_cmd->parsed()) {
            return run_bench(suite_dir, best_known_path, seeds, jobs, common,
                             params, out_dir, !no_timing);
        }
        if (oracle_cmd->parsed()) {
            return run_oracle(instance_path, common, oracle_out);
        }
        if (check_cmd->parsed()) {
            return run_check(solution_path, instance_path, common);
        }
    } catch (const cpmp::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const cpmp::InfeasibleInstance& e) {
        std::cerr << "infeasible instance: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
