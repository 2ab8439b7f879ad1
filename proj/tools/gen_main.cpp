// Deterministic generator for the bundled instance suites. Re-running with
// the same seed reproduces the committed files byte for byte.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "cpmp/instance.hpp"
#include "cpmp/kmeans.hpp"
#include "cpmp/oracle.hpp"
#include "cpmp/rng.hpp"

namespace fs = std::filesystem;

namespace {

std::string format_node_row(const cpmp::Node& node) {
    char row[160];
    std::snprintf(row, sizeof(row), "%d %.6f %.6f %.0f %.0f\n", node.id,
                  node.x, node.y, node.demand, node.capacity);
    return row;
}

void write_instance(const fs::path& path, const std::vector<cpmp::Node>& nodes,
                    int p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << nodes.size() << ' ' << p << '\n';
    for (const cpmp::Node& node : nodes) {
        out << format_node_row(node);
    }
}

// Counts median sets that admit a capacity-feasible assignment, stopping
// once `enough` are found.
int feasible_median_sets(const cpmp::ProblemInstance& instance,
                         const cpmp::DistanceMatrix& dm, int enough) {
    const int n = instance.n();
    const int p = instance.p();
    std::vector<int> medians(p);
    for (int i = 0; i < p; ++i) {
        medians[i] = i;
    }
    int found = 0;
    while (true) {
        if (cpmp::optimal_assignment_for_medians(instance, dm, medians)) {
            if (++found >= enough) {
                return found;
            }
        }
        int i = p - 1;
        while (i >= 0 && medians[i] == n - p + i) {
            --i;
        }
        if (i < 0) {
            return found;
        }
        ++medians[i];
        for (int j = i + 1; j < p; ++j) {
            medians[j] = medians[j - 1] + 1;
        }
    }
}

int generate_tiny(const fs::path& out_dir, int count, std::uint64_t seed) {
    fs::create_directories(out_dir);
    cpmp::Rng rng(seed);
    std::string optima = "instance,optimal_cost\n";

    for (int index = 1; index <= count; ++index) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 500) {
                std::cerr << "giving up on tiny instance " << index << "\n";
                return 1;
            }
            const int n = 6 + rng.uniform_int(5);  // 6..10
            const int p = 2 + rng.uniform_int(2);  // 2..3
            std::vector<cpmp::Node> nodes(n);
            double total_demand = 0.0;
            for (int i = 0; i < n; ++i) {
                nodes[i].id = i;
                nodes[i].x = rng.uniform(0.0, 100.0);
                nodes[i].y = rng.uniform(0.0, 100.0);
                nodes[i].demand = 1 + rng.uniform_int(20);
                total_demand += nodes[i].demand;
            }
            // Odd instances get a uniform capacity, even ones per-node
            // capacities, both sized so several median sets stay feasible.
            const double base = total_demand / p;
            if (index % 2 == 1) {
                const double cap = std::ceil(base * 1.3);
                for (auto& node : nodes) {
                    node.capacity = cap;
                }
            } else {
                for (auto& node : nodes) {
                    node.capacity =
                        std::ceil(base * (1.0 + 0.6 * rng.uniform01()));
                }
            }

            std::optional<cpmp::ProblemInstance> instance;
            try {
                instance.emplace("candidate", nodes, p);
            } catch (const cpmp::InfeasibleInstance&) {
                continue;
            }
            const auto dm = cpmp::build_distance_matrix(
                *instance, cpmp::DistanceMode::FloatExact);
            if (feasible_median_sets(*instance, dm, 2) < 2) {
                continue;
            }
            const cpmp::Nest best = cpmp::enumerate_optimal(*instance, dm);
            if (best.cost <= 0.0) {
                continue;  // degenerate: every node on a median
            }

            char name[32];
            std::snprintf(name, sizeof(name), "tiny%02d", index);
            write_instance(out_dir / (std::string(name) + ".txt"), nodes, p);
            char row[96];
            std::snprintf(row, sizeof(row), "%s,%.8f\n", name, best.cost);
            optima += row;
            break;
        }
    }
    std::ofstream out(out_dir / "optima.csv", std::ios::binary);
    out << optima;
    std::cout << "wrote " << count << " tiny instances to " << out_dir
              << "\n";
    return 0;
}

int generate_bench(const fs::path& out_dir, std::uint64_t seed) {
    fs::create_directories(out_dir);
    cpmp::Rng rng(seed);
    const int n = 50;
    const double capacity = 120.0;

    struct SetSpec {
        const char* prefix;
        int p;
        int demand_lo;
        int demand_hi;
        double total_lo;
        double total_hi;
    };
    // Set 1 mirrors the light-demand regime (p=5), set 2 the heavy one
    // (p=10); total-demand bands keep capacity utilization in 0.70-0.90.
    const SetSpec specs[] = {
        {"set1", 5, 1, 20, 430.0, 540.0},
        {"set2", 10, 8, 29, 850.0, 1000.0},
    };

    for (const SetSpec& spec : specs) {
        for (int index = 1; index <= 10; ++index) {
            while (true) {
                std::vector<cpmp::Node> nodes(n);
                double total = 0.0;
                for (int i = 0; i < n; ++i) {
                    nodes[i].id = i;
                    nodes[i].x = 1 + rng.uniform_int(100);
                    nodes[i].y = 1 + rng.uniform_int(100);
                    nodes[i].demand =
                        spec.demand_lo +
                        rng.uniform_int(spec.demand_hi - spec.demand_lo + 1);
                    nodes[i].capacity = capacity;
                    total += nodes[i].demand;
                }
                if (total < spec.total_lo || total > spec.total_hi) {
                    continue;
                }
                char name[32];
                std::snprintf(name, sizeof(name), "%s_%02d", spec.prefix,
                              index);
                write_instance(out_dir / (std::string(name) + ".txt"), nodes,
                               spec.p);
                break;
            }
        }
    }
    std::cout << "wrote 20 benchmark instances to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Instance suite generator"};
    app.require_subcommand(1);

    std::string out_dir;
    std::uint64_t seed = 42;
    int count = 30;

    auto* tiny = app.add_subcommand("tiny", "Small instances with exact optima");
    tiny->add_option("--out", out_dir, "Output directory")->required();
    tiny->add_option("--seed", seed, "Generator seed");
    tiny->add_option("--count", count, "Instance count");

    auto* bench =
        app.add_subcommand("bench", "50-node capacity-120 benchmark suites");
    bench->add_option("--out", out_dir, "Output directory")->required();
    bench->add_option("--seed", seed, "Generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tiny->parsed()) {
            return generate_tiny(out_dir, count, seed);
        }
        return generate_bench(out_dir, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
