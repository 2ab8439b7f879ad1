#include "cpmp/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "cpmp/kmeans.hpp"

namespace cpmp {

namespace {

bool is_blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') {
            return true;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

double parse_number(const std::string& token, int line_number) {
    size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &consumed);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + token + "'",
                         line_number);
    }
    if (consumed != token.size()) {
        throw ParseError("trailing characters in number '" + token + "'",
                         line_number);
    }
    return value;
}

std::string format_double(double v, int precision) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", precision, v);
    return buffer;
}

ProblemInstance parse_canonical(const std::string& text, std::string name) {
    std::istringstream in(text);
    std::string line;
    int line_number = 0;
    int n = -1;
    int p = -1;
    std::vector<Node> nodes;

    while (std::getline(in, line)) {
        ++line_number;
        if (is_blank_or_comment(line)) {
            continue;
        }
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        std::string token;
        while (fields >> token) {
            tokens.push_back(token);
        }
        if (n < 0) {
            if (tokens.size() != 2) {
                throw ParseError("header must be 'n p'", line_number);
            }
            n = static_cast<int>(parse_number(tokens[0], line_number));
            p = static_cast<int>(parse_number(tokens[1], line_number));
            if (n <= 0) {
                throw ParseError("node count must be positive", line_number);
            }
            if (p < 1 || p > n) {
                throw ParseError("median count must lie in [1, n]",
                                 line_number);
            }
            nodes.reserve(n);
            continue;
        }
        if (static_cast<int>(nodes.size()) == n) {
            throw ParseError("unexpected extra node row", line_number);
        }
        if (tokens.size() != 5) {
            throw ParseError("node row must be 'id x y demand capacity'",
                             line_number);
        }
        Node node;
        node.id = static_cast<int>(parse_number(tokens[0], line_number));
        node.x = parse_number(tokens[1], line_number);
        node.y = parse_number(tokens[2], line_number);
        node.demand = parse_number(tokens[3], line_number);
        node.capacity = parse_number(tokens[4], line_number);
        if (node.id != static_cast<int>(nodes.size())) {
            throw ParseError("node ids must be contiguous 0..n-1",
                             line_number);
        }
        if (node.demand < 0.0) {
            throw ParseError("demand must be non-negative", line_number);
        }
        if (node.capacity <= 0.0) {
            throw ParseError("capacity must be positive", line_number);
        }
        nodes.push_back(node);
    }
    if (n < 0) {
        throw ParseError("missing 'n p' header", line_number + 1);
    }
    if (static_cast<int>(nodes.size()) != n) {
        throw ParseError("expected " + std::to_string(n) + " node rows, got " +
                             std::to_string(nodes.size()),
                         line_number + 1);
    }
    return ProblemInstance(std::move(name), std::move(nodes), p);
}

ProblemInstance parse_orlibrary(const std::string& text, std::string name,
                                const OrlibConfig& config) {
    if (config.columns.empty()) {
        throw ParameterError("orlib column mapping is empty");
    }
    const bool has_capacity =
        std::find(config.columns.begin(), config.columns.end(),
                  OrlibField::Capacity) != config.columns.end();
    if (!has_capacity && config.uniform_capacity <= 0.0) {
        throw ParameterError(
            "orlib mapping without a capacity column needs a positive "
            "uniform capacity");
    }

    // Token stream with line tracking for error messages.
    std::vector<std::pair<std::string, int>> tokens;
    {
        std::istringstream in(text);
        std::string line;
        int line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (is_blank_or_comment(line)) {
                continue;
            }
            std::istringstream fields(line);
            std::string token;
            while (fields >> token) {
                tokens.emplace_back(token, line_number);
            }
        }
    }
    if (tokens.size() < 2) {
        throw ParseError("missing 'n p' header", 1);
    }
    const int n =
        static_cast<int>(parse_number(tokens[0].first, tokens[0].second));
    const int p =
        static_cast<int>(parse_number(tokens[1].first, tokens[1].second));
    if (n <= 0 || p < 1 || p > n) {
        throw ParseError("invalid 'n p' header", tokens[0].second);
    }
    const size_t per_row = config.columns.size();
    const size_t expected = 2 + per_row * static_cast<size_t>(n);
    if (tokens.size() != expected) {
        throw ParseError(
            "expected " + std::to_string(expected - 2) + " record fields (" +
                std::to_string(n) + " rows x " + std::to_string(per_row) +
                " columns), got " + std::to_string(tokens.size() - 2),
            tokens.back().second);
    }

    std::vector<Node> nodes(n);
    for (int i = 0; i < n; ++i) {
        Node& node = nodes[i];
        node.id = i;
        node.capacity = has_capacity ? 0.0 : config.uniform_capacity;
        for (size_t c = 0; c < per_row; ++c) {
            const auto& [token, line_number] = tokens[2 + i * per_row + c];
            const double value = parse_number(token, line_number);
            switch (config.columns[c]) {
                case OrlibField::Id:
                case OrlibField::Skip:
                    break;  // row order defines the index
                case OrlibField::X:
                    node.x = value;
                    break;
                case OrlibField::Y:
                    node.y = value;
                    break;
                case OrlibField::Demand:
                    node.demand = value;
                    break;
                case OrlibField::Capacity:
                    node.capacity = value;
                    break;
            }
        }
        if (node.demand < 0.0) {
            throw ParseError("demand must be non-negative at record " +
                                 std::to_string(i),
                             tokens[2 + i * per_row].second);
        }
        if (node.capacity <= 0.0) {
            throw ParseError("capacity must be positive at record " +
                                 std::to_string(i),
                             tokens[2 + i * per_row].second);
        }
    }
    return ProblemInstance(std::move(name), std::move(nodes), p);
}

RunReport benchmark_instance(const ProblemInstance& instance,
                             const SolverParams& params,
                             const BestKnownTable& best_known, int n_seeds) {
    RunReport report;
    report.instance = instance.name();
    report.p = instance.p();
    report.seed = params.seed;
    report.n_seeds = n_seeds;
    report.params = params;

    double best_raw = std::numeric_limits<double>::infinity();
    double floored_sum = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        SolverParams run_params = params;
        run_params.seed = params.seed + static_cast<std::uint64_t>(s);
        const SolveResult result = solve(instance, run_params);
        floored_sum += std::floor(result.best.cost);
        report.wall_time_seconds =
            std::max(report.wall_time_seconds, result.wall_time_seconds);
        if (result.best.cost < best_raw) {
            best_raw = result.best.cost;
            report.best_nest = result.best;
        }
    }
    report.best_cost = static_cast<long long>(std::floor(best_raw));
    report.mean_cost = floored_sum / n_seeds;

    const DistanceMatrix dm =
        build_distance_matrix(instance, params.distance_mode);
    for (const Cluster& cluster : clusters_of(instance, dm, report.best_nest)) {
        report.medians.push_back({cluster.median,
                                  static_cast<int>(cluster.members.size()),
                                  cluster.load});
    }

    if (const auto reference = best_known.lookup(instance.name())) {
        attach_best_known(report, *reference);
    }
    return report;
}

}  // namespace

std::vector<OrlibField> parse_orlib_columns(const std::string& spec) {
    std::vector<OrlibField> columns;
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (part == "id") {
            columns.push_back(OrlibField::Id);
        } else if (part == "x") {
            columns.push_back(OrlibField::X);
        } else if (part == "y") {
            columns.push_back(OrlibField::Y);
        } else if (part == "demand") {
            columns.push_back(OrlibField::Demand);
        } else if (part == "capacity") {
            columns.push_back(OrlibField::Capacity);
        } else if (part == "skip") {
            columns.push_back(OrlibField::Skip);
        } else {
            throw ParameterError("unknown orlib column '" + part + "'");
        }
    }
    return columns;
}

ProblemInstance parse_instance(const std::string& text, InstanceFormat format,
                               std::string name, const OrlibConfig& orlib) {
    switch (format) {
        case InstanceFormat::Canonical:
            return parse_canonical(text, std::move(name));
        case InstanceFormat::ORLibrary:
            return parse_orlibrary(text, std::move(name), orlib);
    }
    throw ParameterError("unknown instance format");
}

ProblemInstance load_instance(const std::filesystem::path& path,
                              InstanceFormat format, const OrlibConfig& orlib) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open instance file: " +
                                 path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str(), format, path.stem().string(), orlib);
}

std::optional<double> BestKnownTable::lookup(
    const std::string& instance) const {
    const auto it = values.find(instance);
    if (it == values.end()) {
        return std::nullopt;
    }
    return it->second;
}

BestKnownTable BestKnownTable::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open best-known table: " +
                                 path.string());
    }
    BestKnownTable table;
    std::string line;
    int line_number = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (is_blank_or_comment(line)) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("expected 'instance,best_known'", line_number);
        }
        const std::string key = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        if (!seen_data && key == "instance") {
            seen_data = true;  // header row
            continue;
        }
        seen_data = true;
        const double cost = parse_number(value, line_number);
        if (cost <= 0.0) {
            throw ParseError("best-known cost must be positive", line_number);
        }
        table.values[key] = cost;
    }
    return table;
}

void attach_best_known(RunReport& report, double best_known) {
    report.best_known = best_known;
    const double delta = best_known - static_cast<double>(report.best_cost);
    report.improvement.reset();
    report.gap.reset();
    if (delta > 0.0) {
        report.improvement = static_cast<long long>(std::llround(delta));
    } else if (delta < 0.0) {
        report.gap = static_cast<long long>(std::llround(-delta));
    }
    report.dev_percent =
        100.0 * std::abs(delta) / static_cast<double>(report.best_cost);
}

std::vector<RunReport> run_benchmark(const std::vector<ProblemInstance>& suite,
                                     const SolverParams& params,
                                     const BestKnownTable& best_known,
                                     int n_seeds, int jobs) {
    if (n_seeds < 1) {
        throw ParameterError("n_seeds must be positive");
    }
    std::vector<std::future<RunReport>> futures;
    futures.reserve(suite.size());
    const auto policy = jobs > 1 ? std::launch::async : std::launch::deferred;
    // A bounded window keeps at most `jobs` solves in flight; joining in
    // input order makes the merge deterministic.
    std::vector<RunReport> reports;
    reports.reserve(suite.size());
    size_t launched = 0;
    size_t joined = 0;
    while (joined < suite.size()) {
        while (launched < suite.size() &&
               launched - joined < static_cast<size_t>(std::max(jobs, 1))) {
            const ProblemInstance& instance = suite[launched];
            futures.push_back(std::async(policy, [&instance, &params,
                                                  &best_known, n_seeds]() {
                return benchmark_instance(instance, params, best_known,
                                          n_seeds);
            }));
            ++launched;
        }
        try {
            reports.push_back(futures[joined].get());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "benchmark: instance '%s' failed: %s\n",
                         suite[joined].name().c_str(), e.what());
        }
        ++joined;
    }
    return reports;
}

void write_reports(const std::vector<RunReport>& reports,
                   const std::filesystem::path& out_dir, bool include_timing) {
    if (reports.empty()) {
        throw ParameterError("write_reports: no reports");
    }
    std::filesystem::create_directories(out_dir);

    auto open_out = [](const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        return out;
    };

    {
        auto out = open_out(out_dir / "summary.csv");
        out << "instance,p,best_cost,mean_cost,time_s,best_known,improvement,"
               "gap,dev_percent,seed\n";
        for (const RunReport& r : reports) {
            out << r.instance << ',' << r.p << ',' << r.best_cost << ','
                << format_double(r.mean_cost, 2) << ','
                << format_double(include_timing ? r.wall_time_seconds : 0.0, 3)
                << ',';
            if (r.best_known) {
                out << format_double(*r.best_known, 0);
            }
            out << ',';
            if (r.improvement) {
                out << *r.improvement;
            }
            out << ',';
            if (r.gap) {
                out << *r.gap;
            }
            out << ',';
            if (r.dev_percent) {
                out << format_double(*r.dev_percent, 2);
            }
            out << ',' << r.seed << '\n';
        }
    }

    for (const RunReport& r : reports) {
        auto out = open_out(out_dir / ("detail_" + r.instance + ".csv"));
        out << "median_node,assigned_count,supplied_demand\n";
        for (const MedianRow& row : r.medians) {
            out << row.median_node << ',' << row.assigned_count << ','
                << format_double(row.supplied_demand, 2) << '\n';
        }
    }

    {
        nlohmann::json manifest;
        manifest["version"] = kVersion;
        const SolverParams& p = reports.front().params;
        manifest["params"] = {
            {"n_nests", p.n_nests},
            {"generations", p.generations},
            {"lambda", p.lambda},
            {"pa", p.pa},
            {"mutation_k", p.mutation_k},
            {"distance_mode",
             p.distance_mode == DistanceMode::FloatExact ? "float" : "floor"},
            {"max_local_iters", p.max_local_iters},
            {"max_seed_attempts", p.max_seed_attempts},
            {"n_assign_orders", p.n_assign_orders},
        };
        manifest["n_seeds"] = reports.front().n_seeds;
        manifest["timing"] = include_timing;
        double suite_time = 0.0;
        nlohmann::json runs = nlohmann::json::array();
        for (const RunReport& r : reports) {
            suite_time += r.wall_time_seconds;
            runs.push_back({{"instance", r.instance},
                            {"seed", r.seed},
                            {"best_cost", r.best_cost}});
        }
        manifest["runs"] = runs;
        manifest["suite_max_time_sum_s"] =
            include_timing ? suite_time : 0.0;
        auto out = open_out(out_dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
}

}  // namespace cpmp
