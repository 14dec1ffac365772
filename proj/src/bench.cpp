#include "lvc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lvc/format.hpp"
#include "lvc/io.hpp"

#ifndef LVC_GIT_COMMIT
#define LVC_GIT_COMMIT "unknown"
#endif

namespace lvc {

namespace {

bool is_discretization_key(const std::string& key)
{
    return key == "problem.n_time_steps" || key == "problem.n_boundary_pts" || key == "problem.resample";
}

std::string hex(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

constexpr const char* kMetaPrefix = "baseline.";

}  // namespace

std::string build_provenance() { return LVC_GIT_COMMIT; }

std::uint64_t config_hash(const ParameterMap& parameters)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        h ^= 0xff;
        h *= 0x100000001b3ull;
    };
    for (const auto& [key, value] : parameters) {
        if (is_discretization_key(key)) continue;
        feed(key);
        feed(value);
    }
    return h;
}

ParameterMap baseline_discretization()
{
    return {{"problem.n_time_steps", "300"}, {"problem.n_boundary_pts", "128"}};
}

BaselineRecord run_baseline(const std::string& name, const ParameterMap& overrides, std::size_t max_iters)
{
    ParameterMap params = baseline_discretization();
    for (const auto& [k, v] : overrides) params[k] = v;
    const ProblemInstance problem = make_benchmark(name, params);

    SolverConfig cfg;
    cfg.max_iters = max_iters;
    const SolverState state = solve(problem, default_initial_signal(problem), cfg);

    BaselineRecord rec;
    rec.benchmark = name;
    rec.parameters = problem.parameters;
    rec.config_hash = config_hash(problem.parameters);
    rec.costs.push_back(state.initial_cost);
    for (const auto& d : state.diagnostics) rec.costs.push_back(d.cost);
    rec.final_residual = optimality_residual(problem, state);
    rec.provenance = build_provenance();
    rec.max_iters = max_iters;
    return rec;
}

void write_baseline(const std::filesystem::path& dir, const BaselineRecord& record)
{
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    csv << "iteration,cost\n";
    for (std::size_t i = 0; i < record.costs.size(); ++i) csv << i << ',' << format_number(record.costs[i]) << '\n';
    write_text_file(dir / (record.benchmark + ".csv"), csv.str());

    std::ostringstream cfg;
    cfg << kMetaPrefix << "benchmark = " << record.benchmark << '\n'
        << kMetaPrefix << "config_hash = " << hex(record.config_hash) << '\n'
        << kMetaPrefix << "final_residual = " << format_number(record.final_residual) << '\n'
        << kMetaPrefix << "max_iters = " << record.max_iters << '\n'
        << kMetaPrefix << "provenance = " << record.provenance << '\n';
    for (const auto& [k, v] : record.parameters) cfg << k << " = " << v << '\n';
    write_text_file(dir / (record.benchmark + ".cfg"), cfg.str());
}

BaselineRecord read_baseline(const std::filesystem::path& dir, const std::string& name)
{
    const auto cfg_path = dir / (name + ".cfg");
    const auto csv_path = dir / (name + ".csv");
    if (!std::filesystem::exists(cfg_path) || !std::filesystem::exists(csv_path)) {
        throw std::runtime_error("missing baseline for '" + name + "' in " + dir.string());
    }
    BaselineRecord rec;
    const std::string meta = kMetaPrefix;
    for (const auto& [key, value] : parse_config_text(read_text_file(cfg_path))) {
        if (key.rfind(meta, 0) != 0) {
            rec.parameters[key] = value;
            continue;
        }
        const std::string field = key.substr(meta.size());
        if (field == "benchmark") rec.benchmark = value;
        else if (field == "config_hash") rec.config_hash = std::stoull(value, nullptr, 16);
        else if (field == "final_residual") rec.final_residual = parse_number(key, value);
        else if (field == "max_iters") rec.max_iters = static_cast<std::size_t>(parse_number(key, value));
        else if (field == "provenance") rec.provenance = value;
    }

    std::istringstream csv(read_text_file(csv_path));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        rec.costs.push_back(parse_number("cost", std::string_view(line).substr(comma + 1)));
    }
    return rec;
}

RegressionReport regression_check(const std::filesystem::path& dir, const std::string& name, double tolerance,
                                  const ParameterMap& overrides)
{
    const BaselineRecord base = read_baseline(dir, name);
    RegressionReport report;
    report.benchmark = name;

    ParameterMap params = base.parameters;
    for (const auto& [k, v] : overrides) params[k] = v;
    params.erase("problem.name");
    const ProblemInstance problem = make_benchmark(name, params);
    report.config_match = config_hash(problem.parameters) == base.config_hash;
    if (!report.config_match) {
        report.message = "config hash " + hex(config_hash(problem.parameters)) + " differs from baseline " +
                         hex(base.config_hash) + "; costs not compared";
        return report;
    }

    const BaselineRecord now = run_baseline(name, params, base.max_iters);
    const std::size_t common = std::min(now.costs.size(), base.costs.size());
    for (std::size_t i = 0; i < common; ++i) {
        const double drift = std::abs(now.costs[i] - base.costs[i]);
        report.max_drift = std::max(report.max_drift, drift);
        if (drift > tolerance && !report.first_divergence) report.first_divergence = i;
    }
    if (!report.first_divergence && now.costs.size() != base.costs.size()) report.first_divergence = common;

    report.passed = !report.first_divergence;
    std::ostringstream msg;
    if (report.passed) {
        msg << name << ": " << common << " costs match within " << format_number(tolerance);
    } else {
        msg << name << ": first divergence at iteration " << *report.first_divergence << ", max drift "
            << format_number(report.max_drift) << " (" << now.costs.size() << " vs " << base.costs.size()
            << " recorded costs)";
    }
    report.message = msg.str();
    return report;
}

}  // namespace lvc
