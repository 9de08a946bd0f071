// Command-line front end: solve, learn, simulate, evaluate, export.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evoctrl/evoctrl.hpp"

namespace fs = std::filesystem;
using namespace evoctrl;

namespace {

struct CommonOpts {
    int n = 50;
    double grid_min = 0.01;
    double grid_max = 1.00;
    double grid_step = 0.01;
    std::uint64_t seed = 42;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    // Repeated options keep the last value, so config-file entries (injected
    // first) are overridden by explicit flags.
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", "Flat key=value config file (flags override)");
    cmd->add_option("--n", o.n, "Bitstring length")->capture_default_str();
    cmd->add_option("--grid-min", o.grid_min, "Smallest mutation probability on the action grid")
        ->capture_default_str();
    cmd->add_option("--grid-max", o.grid_max, "Largest mutation probability on the action grid")
        ->capture_default_str();
    cmd->add_option("--grid-step", o.grid_step, "Action grid step")->capture_default_str();
    auto* seed_opt =
        cmd->add_option("--seed", o.seed, "Master random seed (env EVOCTRL_SEED as fallback)")
            ->capture_default_str();
    if (const char* env = std::getenv("EVOCTRL_SEED")) {
        try {
            o.seed = std::stoull(env);
            seed_opt->default_val(o.seed);
        } catch (const std::exception&) {
            // ignored; the flag default stands
        }
    }
    cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

ProblemSpec make_spec(const CommonOpts& o) {
    return ProblemSpec(o.n, ProblemSpec::make_grid(o.grid_min, o.grid_max, o.grid_step));
}

fs::path out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / name;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    body(out);
}

// Built-in names (constant, reciprocal, optimal) or a policy CSV path.
PolicySpec resolve_policy(const std::string& name, const ProblemSpec& spec,
                          const TransitionModel& model) {
    if (name == "constant") return PolicySpec::constant(1.0 / spec.n());
    if (name == "reciprocal") return PolicySpec::reciprocal();
    if (name == "optimal") return greedy_policy(model, backward_induction(model));
    return load_policy(name);
}

// Splice each `--config <file>` of flat key=value lines into the argument
// list as `--key=value` flags, placed right after the subcommand name so
// explicit flags (parsed later, take-last) override the file. Unknown keys
// surface as ordinary unrecognized-flag parse errors.
void expand_config_flags(std::vector<std::string>& args) {
    for (std::size_t i = 0; i + 1 < args.size();) {
        if (args[i] != "--config") {
            ++i;
            continue;
        }
        const std::string path = args[i + 1];
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file " + path);
        std::vector<std::string> injected;
        std::string line;
        while (std::getline(in, line)) {
            const std::string entry = strip(line);
            if (entry.empty() || entry[0] == '#') continue;
            const std::size_t eq = entry.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(path + ": expected key=value, got `" + entry + "`");
            injected.push_back("--" + strip(entry.substr(0, eq)) + "=" +
                               strip(entry.substr(eq + 1)));
        }
        args.erase(args.begin() + i, args.begin() + i + 2);
        const std::size_t at = std::min<std::size_t>(1, args.size());
        args.insert(args.begin() + at, injected.begin(), injected.end());
        i = at + injected.size();
    }
}

int cmd_solve(const CommonOpts& common, const std::string& method, double tolerance,
              int max_iterations) {
    const ProblemSpec spec = make_spec(common);
    const TransitionModel model = build_transition_model(spec);

    ValueFunction v;
    if (method == "vi") {
        auto [values, report] = value_iteration(model, tolerance, max_iterations);
        v = std::move(values);
        std::cout << "value iteration: " << report.iterations
                  << " sweeps, residual " << report.final_residual
                  << (report.converged ? "" : " (NOT converged)") << "\n";
        if (!report.converged) return 1;
    } else {
        v = backward_induction(model);
        std::cout << "backward induction: exact single pass\n";
    }
    const PolicySpec policy = greedy_policy(model, v);

    write_file(out_path(common, "value.csv"), [&](std::ostream& out) { write_values_csv(v, out); });
    save_policy(policy, out_path(common, "policy.csv").string());
    std::cout << "wrote value.csv and policy.csv to " << common.out_dir << "\n";
    return 0;
}

int cmd_learn(const CommonOpts& common, LearningConfig config, const std::string& sampler_name,
              bool compare_exact) {
    const ProblemSpec spec = make_spec(common);
    config.seed = RngSeed{common.seed, 0};
    const SamplerKind sampler =
        sampler_name == "bit" ? SamplerKind::BitLevel : SamplerKind::ModelLevel;

    const TransitionModel model = build_transition_model(spec);
    auto [q, report] = train(spec, config, sampler, &model);

    PolicySpec policy = PolicySpec::reciprocal();
    try {
        policy = greedy_from_q(q, report);
    } catch (const IncompleteTableError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    save_qtable(q, out_path(common, "qtable.csv").string());
    save_policy(policy, out_path(common, "policy.csv").string());
    std::cout << "episodes: " << report.episodes_run << ", steps: " << report.total_steps
              << ", truncations: " << report.truncations << "\n";

    if (compare_exact) {
        const ValueFunction v_star = backward_induction(model);
        const ValueFunction v_pi = policy_evaluation(model, policy);
        double sum = 0.0;
        for (int s = 0; s < spec.n(); ++s)
            sum += (v_star.values[s] - v_pi.values[s]) / std::abs(v_star.values[s]);
        std::cout << "mean relative suboptimality vs exact solver: "
                  << 100.0 * sum / spec.n() << "%\n";
    }
    std::cout << "wrote qtable.csv and policy.csv to " << common.out_dir << "\n";
    return 0;
}

int cmd_simulate(const CommonOpts& common, const std::string& policy_name,
                 const std::string& start_arg, std::uint64_t step_cap) {
    const ProblemSpec spec = make_spec(common);
    const TransitionModel model = build_transition_model(spec);
    const PolicySpec policy = resolve_policy(policy_name, spec, model);

    RngStream rng(RngSeed{common.seed, 0});
    const EpisodeStart start = start_arg == "random"
                                   ? EpisodeStart{RandomStart{}}
                                   : EpisodeStart{std::stoi(start_arg)};
    const EpisodeTrace trace = run_episode(spec, policy, start, rng, step_cap, true);

    write_file(out_path(common, "trace.csv"),
               [&](std::ostream& out) { write_trace_csv(trace, out); });
    std::cout << "start state " << trace.start_state << ", steps " << trace.steps
              << (trace.truncated ? " (truncated)" : "") << "\n";
    std::cout << "wrote trace.csv to " << common.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const CommonOpts& common, const std::vector<std::string>& policy_names,
                 std::uint64_t runs, const std::string& start_arg) {
    const ProblemSpec spec = make_spec(common);
    const TransitionModel model = build_transition_model(spec);

    std::vector<std::pair<std::string, PolicySpec>> policies;
    for (const auto& name : policy_names)
        policies.emplace_back(name, resolve_policy(name, spec, model));

    BenchmarkReport report;
    report.seed = RngSeed{common.seed, 0};
    if (start_arg == "random") {
        report = compare_policies(spec, policies, runs, report.seed);
    } else {
        const int s0 = std::stoi(start_arg);
        for (const auto& [name, policy] : policies) {
            report.entries.push_back(monte_carlo_eval(spec, policy, BenchmarkStart::at_state(s0),
                                                      runs, report.seed, kDefaultStepCap, name));
        }
    }

    write_file(out_path(common, "benchmark.csv"),
               [&](std::ostream& out) { write_benchmark_csv(report, out); });
    write_comparison_table(report, std::cout);
    std::cout << "wrote benchmark.csv to " << common.out_dir << "\n";
    return 0;
}

int cmd_export(const CommonOpts& common, std::uint64_t runs, const std::string& prefix) {
    const ProblemSpec spec = make_spec(common);
    const TransitionModel model = build_transition_model(spec);

    const ValueFunction v_star = backward_induction(model);
    std::vector<std::pair<std::string, PolicySpec>> policies = {
        {"constant", PolicySpec::constant(1.0 / spec.n())},
        {"reciprocal", PolicySpec::reciprocal()},
        {"optimal", greedy_policy(model, v_star)},
    };
    std::vector<ValueFunction> values = {
        policy_evaluation(model, policies[0].second),
        policy_evaluation(model, policies[1].second),
        v_star,
    };

    fs::create_directories(common.out_dir);
    const std::string path_prefix = (fs::path(common.out_dir) / prefix).string();
    export_figure_data(spec, policies, values, path_prefix, runs, RngSeed{common.seed, 0});
    std::cout << "wrote " << prefix << "_values.csv, " << prefix << "_policies.csv, " << prefix
              << "_marks.csv to " << common.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal mutation-probability control for the (1+1) EA on OneMax"};
    app.require_subcommand(1);

    // solve
    CommonOpts solve_opts;
    std::string method = "bi";
    double tolerance = 1e-9;
    int max_iterations = 100000;
    auto* solve = app.add_subcommand("solve", "Exact MDP solution and greedy policy");
    add_common(solve, solve_opts);
    solve->add_option("--method", method, "Solver: bi (backward induction) or vi")
        ->check(CLI::IsMember({"bi", "vi"}))
        ->capture_default_str();
    solve->add_option("--tolerance", tolerance, "Value iteration sup-norm tolerance")
        ->capture_default_str();
    solve->add_option("--max-iterations", max_iterations, "Value iteration sweep limit")
        ->capture_default_str();

    // learn
    CommonOpts learn_opts;
    LearningConfig lc;
    std::string sampler = "model";
    std::string alpha_kind = "polynomial";
    std::string epsilon_kind = "linear";
    std::string start_dist = "uniform-state";
    bool compare_exact = false;
    auto* learn = app.add_subcommand("learn", "Tabular Q-learning of the control policy");
    add_common(learn, learn_opts);
    learn->add_option("--episodes", lc.episodes, "Training episodes")->capture_default_str();
    learn->add_option("--alpha-schedule", alpha_kind, "constant or polynomial")
        ->check(CLI::IsMember({"constant", "polynomial"}))
        ->capture_default_str();
    learn->add_option("--alpha0", lc.alpha.alpha0, "Initial learning rate")->capture_default_str();
    learn->add_option("--omega", lc.alpha.omega, "Polynomial learning-rate exponent")
        ->capture_default_str();
    learn->add_option("--epsilon-schedule", epsilon_kind, "constant or linear")
        ->check(CLI::IsMember({"constant", "linear"}))
        ->capture_default_str();
    learn->add_option("--epsilon0", lc.epsilon.eps0, "Initial exploration rate")
        ->capture_default_str();
    learn->add_option("--epsilon-min", lc.epsilon.eps_min, "Final exploration rate")
        ->capture_default_str();
    learn->add_option("--start-dist", start_dist, "uniform-state or uniform-bitstring")
        ->check(CLI::IsMember({"uniform-state", "uniform-bitstring"}))
        ->capture_default_str();
    learn->add_option("--step-cap", lc.step_cap, "Per-episode step cap")->capture_default_str();
    learn->add_option("--sampler", sampler, "model (state-level) or bit (full EA)")
        ->check(CLI::IsMember({"model", "bit"}))
        ->capture_default_str();
    learn->add_flag("--compare-exact", compare_exact,
                    "Report mean suboptimality versus the exact solver");

    // simulate
    CommonOpts sim_opts;
    std::string sim_policy = "optimal";
    std::string sim_start = "random";
    std::uint64_t sim_step_cap = kDefaultStepCap;
    auto* simulate = app.add_subcommand("simulate", "Run one traced episode and dump it as CSV");
    add_common(simulate, sim_opts);
    simulate->add_option("--policy", sim_policy, "constant | reciprocal | optimal | policy CSV path")
        ->capture_default_str();
    simulate->add_option("--start", sim_start, "Start state (integer) or `random`")
        ->capture_default_str();
    simulate->add_option("--step-cap", sim_step_cap, "Step cap")->capture_default_str();

    // evaluate
    CommonOpts eval_opts;
    std::string policies_arg = "constant,reciprocal,optimal";
    std::uint64_t runs = 2000;
    std::string eval_start = "random";
    auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo policy benchmark");
    add_common(evaluate, eval_opts);
    evaluate
        ->add_option("--policies", policies_arg,
                     "Comma-separated built-ins (constant, reciprocal, optimal) or CSV paths")
        ->capture_default_str();
    evaluate->add_option("--runs", runs, "Episodes per policy")->capture_default_str();
    evaluate->add_option("--start", eval_start, "Start state (integer) or `random`")
        ->capture_default_str();

    // export
    CommonOpts export_opts;
    std::uint64_t export_runs = 2000;
    std::string prefix = "figure";
    auto* exportc = app.add_subcommand("export", "Plot-ready value/policy/marks CSVs");
    add_common(exportc, export_opts);
    exportc->add_option("--runs", export_runs, "Episodes per Monte Carlo mark")
        ->capture_default_str();
    exportc->add_option("--prefix", prefix, "Output file prefix")->capture_default_str();

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        expand_config_flags(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::reverse(args.begin(), args.end());  // App::parse consumes back-to-front
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_opts, method, tolerance, max_iterations);
        if (learn->parsed()) {
            lc.alpha.kind = alpha_kind == "constant" ? AlphaSchedule::Kind::Constant
                                                     : AlphaSchedule::Kind::Polynomial;
            lc.epsilon.kind = epsilon_kind == "constant" ? EpsilonSchedule::Kind::Constant
                                                         : EpsilonSchedule::Kind::Linear;
            lc.start = start_dist == "uniform-bitstring" ? StartDistribution::UniformBitstring
                                                         : StartDistribution::UniformState;
            return cmd_learn(learn_opts, lc, sampler, compare_exact);
        }
        if (simulate->parsed()) return cmd_simulate(sim_opts, sim_policy, sim_start, sim_step_cap);
        if (evaluate->parsed()) {
            std::vector<std::string> names;
            for (const auto& piece : split_csv_line(policies_arg)) {
                const std::string name = strip(piece);
                if (!name.empty()) names.push_back(name);
            }
            return cmd_evaluate(eval_opts, names, runs, eval_start);
        }
        if (exportc->parsed()) return cmd_export(export_opts, export_runs, prefix);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
