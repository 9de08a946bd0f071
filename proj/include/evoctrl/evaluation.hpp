#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "evoctrl/errors.hpp"
#include "evoctrl/policy.hpp"
#include "evoctrl/rng.hpp"
#include "evoctrl/simulator.hpp"
#include "evoctrl/solver.hpp"

namespace evoctrl {

struct BenchmarkEntry {
    std::string policy_name;
    std::string start_label;  // "random" or the state
    std::uint64_t runs = 0;   // completed (non-truncated) episodes
    double mean = 0.0;
    double stddev = 0.0;      // sample standard deviation
    std::uint64_t truncated = 0;
    std::vector<std::uint64_t> episode_steps;  // completed episodes, by episode index order
};

struct BenchmarkReport {
    RngSeed seed;
    std::vector<BenchmarkEntry> entries;
};

struct BenchmarkStart {
    bool random = true;
    int state = 0;

    static BenchmarkStart random_start() { return {true, 0}; }
    static BenchmarkStart at_state(int s) { return {false, s}; }
    std::string label() const { return random ? "random" : std::to_string(state); }
};

namespace detail {

inline std::pair<double, double> mean_and_sample_std(const std::vector<std::uint64_t>& xs) {
    const std::size_t k = xs.size();
    if (k == 0) return {0.0, 0.0};
    // Integer accumulation keeps the result independent of summation order.
    unsigned long long total = 0;
    for (auto x : xs) total += x;
    const double mean = static_cast<double>(total) / static_cast<double>(k);
    if (k == 1) return {mean, 0.0};
    double ss = 0.0;
    for (auto x : xs) {
        const double d = static_cast<double>(x) - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(k - 1))};
}

}  // namespace detail

// Monte Carlo termination-time statistics for one policy. Episode i runs on
// stream_id = seed.stream_id + i, so reports are seed-deterministic and two
// policies evaluated with the same seed share random numbers per episode.
inline BenchmarkEntry monte_carlo_eval(const ProblemSpec& spec, const PolicySpec& policy,
                                       BenchmarkStart start, std::uint64_t runs, RngSeed seed,
                                       std::uint64_t step_cap = kDefaultStepCap,
                                       const std::string& policy_name = "policy") {
    if (runs < 1) throw std::domain_error("monte_carlo_eval: runs must be >= 1");

    BenchmarkEntry entry;
    entry.policy_name = policy_name;
    entry.start_label = start.label();
    entry.episode_steps.reserve(runs);

    for (std::uint64_t i = 0; i < runs; ++i) {
        RngStream rng(RngSeed{seed.master_seed, seed.stream_id + i});
        const EpisodeStart ep_start =
            start.random ? EpisodeStart{RandomStart{}} : EpisodeStart{start.state};
        const EpisodeTrace trace = run_episode(spec, policy, ep_start, rng, step_cap);
        if (trace.truncated) {
            ++entry.truncated;
        } else {
            entry.episode_steps.push_back(trace.steps);
        }
    }
    if (entry.episode_steps.empty())
        throw EvaluationError("monte_carlo_eval: every episode hit the step cap (improper policy?)");

    entry.runs = entry.episode_steps.size();
    const auto [mean, stddev] = detail::mean_and_sample_std(entry.episode_steps);
    entry.mean = mean;
    entry.stddev = stddev;
    return entry;
}

// Benchmarks all policies with random (uniform bitstring) starts under common
// random numbers: episode i uses the same stream for every policy.
inline BenchmarkReport compare_policies(
    const ProblemSpec& spec, const std::vector<std::pair<std::string, PolicySpec>>& policies,
    std::uint64_t runs, RngSeed seed, std::uint64_t step_cap = kDefaultStepCap) {
    if (policies.empty()) throw std::domain_error("compare_policies: no policies");
    BenchmarkReport report;
    report.seed = seed;
    for (const auto& [name, policy] : policies) {
        report.entries.push_back(monte_carlo_eval(spec, policy, BenchmarkStart::random_start(),
                                                  runs, seed, step_cap, name));
    }
    return report;
}

inline void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out) {
    out << "policy,start,runs,mean,std,truncated\n";
    for (const auto& e : report.entries) {
        out << e.policy_name << ',' << e.start_label << ',' << e.runs << ','
            << format_double(e.mean) << ',' << format_double(e.stddev) << ',' << e.truncated
            << '\n';
    }
}

// Text comparison table: one column per policy, rows Average / Standard
// Deviation.
inline void write_comparison_table(const BenchmarkReport& report, std::ostream& out) {
    auto pad = [](const std::string& s, std::size_t width) {
        std::string t = s;
        while (t.size() < width) t += ' ';
        return t;
    };
    auto fmt1 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", v);
        return std::string(buf);
    };
    out << pad("Policy", 22);
    for (const auto& e : report.entries) out << pad(e.policy_name, 14);
    out << '\n' << pad("Average", 22);
    for (const auto& e : report.entries) out << pad(fmt1(e.mean), 14);
    out << '\n' << pad("Standard Deviation", 22);
    for (const auto& e : report.entries) out << pad(fmt1(e.stddev), 14);
    out << '\n';
}

inline const std::vector<int>& default_mark_starts() {
    static const std::vector<int> starts{5, 10, 22, 45};
    return starts;
}

// Writes <prefix>_values.csv, <prefix>_policies.csv and <prefix>_marks.csv:
// exact value curves, policy curves, and Monte Carlo means at the standard
// start states.
inline void export_figure_data(
    const ProblemSpec& spec,
    const std::vector<std::pair<std::string, PolicySpec>>& policies,
    const std::vector<ValueFunction>& value_functions, const std::string& path_prefix,
    std::uint64_t runs, RngSeed seed) {
    if (policies.size() != value_functions.size())
        throw std::domain_error("export_figure_data: policies/value functions size mismatch");

    std::ofstream values_out(path_prefix + "_values.csv");
    if (!values_out) throw EvaluationError("export_figure_data: cannot open values csv");
    values_out << "state,policy,value\n";
    for (int s = 0; s <= spec.n(); ++s) {
        for (std::size_t p = 0; p < policies.size(); ++p) {
            values_out << s << ',' << policies[p].first << ','
                       << format_double(value_functions[p].values[s]) << '\n';
        }
    }

    std::ofstream policies_out(path_prefix + "_policies.csv");
    if (!policies_out) throw EvaluationError("export_figure_data: cannot open policies csv");
    policies_out << "state,policy,theta\n";
    for (int s = 0; s < spec.n(); ++s) {
        for (const auto& [name, policy] : policies) {
            policies_out << s << ',' << name << ','
                         << format_double(theta_for_state(policy, s, spec)) << '\n';
        }
    }

    std::ofstream marks_out(path_prefix + "_marks.csv");
    if (!marks_out) throw EvaluationError("export_figure_data: cannot open marks csv");
    marks_out << "policy,start,runs,mean,std\n";
    for (const auto& [name, policy] : policies) {
        for (int s0 : default_mark_starts()) {
            if (s0 >= spec.n()) continue;
            const BenchmarkEntry e = monte_carlo_eval(spec, policy, BenchmarkStart::at_state(s0),
                                                      runs, seed, kDefaultStepCap, name);
            marks_out << name << ',' << s0 << ',' << e.runs << ',' << format_double(e.mean) << ','
                      << format_double(e.stddev) << '\n';
        }
    }
}

}  // namespace evoctrl
