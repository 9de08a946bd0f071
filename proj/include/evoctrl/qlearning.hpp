#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "evoctrl/csv.hpp"
#include "evoctrl/errors.hpp"
#include "evoctrl/policy.hpp"
#include "evoctrl/probability.hpp"
#include "evoctrl/simulator.hpp"

namespace evoctrl {

// Expected total reward per (state, action). The terminal row Q(n, .) is
// pinned at 0 and never updated.
class QTable {
public:
    QTable(int n, std::vector<double> actions)
        : n_(n), actions_(std::move(actions)), q_((n + 1) * actions_.size(), 0.0) {}

    int n() const { return n_; }
    const std::vector<double>& actions() const { return actions_; }
    std::size_t num_actions() const { return actions_.size(); }

    double& at(int s, std::size_t a) { return q_[s * actions_.size() + a]; }
    double at(int s, std::size_t a) const { return q_[s * actions_.size() + a]; }

    double max_at(int s) const {
        const double* row = &q_[s * actions_.size()];
        return *std::max_element(row, row + actions_.size());
    }

    // Smallest-theta maximizer.
    std::size_t argmax_at(int s) const {
        const double* row = &q_[s * actions_.size()];
        std::size_t best = 0;
        for (std::size_t a = 1; a < actions_.size(); ++a) {
            if (row[a] > row[best]) best = a;
        }
        return best;
    }

    bool operator==(const QTable& other) const {
        return n_ == other.n_ && actions_ == other.actions_ && q_ == other.q_;
    }

private:
    int n_;
    std::vector<double> actions_;
    std::vector<double> q_;
};

struct AlphaSchedule {
    enum class Kind { Constant, Polynomial };
    // alpha_t = alpha0 / (1 + visits(s, a))^omega. The exponent sits just
    // above the square-summability boundary: faster decay leaves the
    // zero-initialized maxima overestimated long after exploration tapers.
    Kind kind = Kind::Polynomial;
    double alpha0 = 1.0;
    double omega = 0.51;

    double value(std::uint64_t prior_visits) const {
        if (kind == Kind::Constant) return alpha0;
        return alpha0 / std::pow(1.0 + static_cast<double>(prior_visits), omega);
    }
};

struct EpsilonSchedule {
    enum class Kind { Constant, Linear };
    Kind kind = Kind::Linear;
    double eps0 = 1.0;
    double eps_min = 0.05;

    double value(std::uint64_t episode, std::uint64_t episodes) const {
        if (kind == Kind::Constant) return eps0;
        if (episodes <= 1) return eps0;
        const double frac = static_cast<double>(episode) / static_cast<double>(episodes - 1);
        return eps0 + (eps_min - eps0) * std::min(frac, 1.0);
    }
};

enum class StartDistribution { UniformBitstring, UniformState };
enum class SamplerKind { BitLevel, ModelLevel };

struct LearningConfig {
    std::uint64_t episodes = 200000;
    AlphaSchedule alpha;
    EpsilonSchedule epsilon;
    StartDistribution start = StartDistribution::UniformState;
    RngSeed seed;
    std::uint64_t step_cap = kDefaultStepCap;

    void validate() const {
        if (episodes == 0) throw std::domain_error("LearningConfig: episodes must be > 0");
        if (!(alpha.alpha0 > 0.0) || alpha.alpha0 > 1.0)
            throw std::domain_error("LearningConfig: alpha0 outside (0, 1]");
        if (alpha.kind == AlphaSchedule::Kind::Polynomial &&
            (!(alpha.omega > 0.5) || alpha.omega > 1.0))
            throw std::domain_error("LearningConfig: omega outside (0.5, 1]");
        if (epsilon.eps0 < 0.0 || epsilon.eps0 > 1.0 || epsilon.eps_min < 0.0 ||
            epsilon.eps_min > 1.0)
            throw std::domain_error("LearningConfig: epsilon outside [0, 1]");
        if (step_cap == 0) throw std::domain_error("LearningConfig: step_cap must be > 0");
    }
};

struct TrainingReport {
    std::uint64_t episodes_run = 0;
    std::uint64_t total_steps = 0;
    std::uint64_t truncations = 0;
    std::vector<std::uint64_t> visits;  // [s * num_actions + a] for s < n
    std::size_t num_actions = 0;
    double mean_suboptimality = std::numeric_limits<double>::quiet_NaN();  // set by evaluation

    std::uint64_t visit_count(int s, std::size_t a) const { return visits[s * num_actions + a]; }
    bool state_visited(int s) const {
        for (std::size_t a = 0; a < num_actions; ++a)
            if (visits[s * num_actions + a] > 0) return true;
        return false;
    }
};

// Standard temporal-difference update:
//   Q(s,a) += alpha * (r + max_a' Q(s',a') - Q(s,a)).
inline void q_update(QTable& q, int s, std::size_t a, double r, int s_next, double alpha) {
    if (s >= q.n()) throw std::domain_error("q_update: no updates from the terminal state");
    if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("q_update: alpha outside (0, 1]");
    const double target = r + q.max_at(s_next);
    q.at(s, a) += alpha * (target - q.at(s, a));
}

// Epsilon-greedy with uniform tie-breaking among maximizers.
inline std::size_t choose_action(const QTable& q, int s, double epsilon, RngStream& rng) {
    if (s >= q.n()) throw std::domain_error("choose_action: terminal state");
    const std::size_t na = q.num_actions();
    if (rng.next_double() < epsilon) return static_cast<std::size_t>(rng.next_below(na));

    double best = q.at(s, 0);
    std::size_t ties = 1;
    for (std::size_t a = 1; a < na; ++a) {
        const double v = q.at(s, a);
        if (v > best) {
            best = v;
            ties = 1;
        } else if (v == best) {
            ++ties;
        }
    }
    if (ties == 1) return q.argmax_at(s);
    std::uint64_t pick = rng.next_below(ties);
    for (std::size_t a = 0; a < na; ++a) {
        if (q.at(s, a) == best) {
            if (pick == 0) return a;
            --pick;
        }
    }
    return q.argmax_at(s);  // unreachable
}

// Tabular Q-learning over sampled transitions, reward -1 per step until the
// terminal state (whose pinned zero supplies the r = 0 terminal case).
// `model` is required for the model-level sampler and ignored otherwise.
inline std::pair<QTable, TrainingReport> train(const ProblemSpec& spec,
                                               const LearningConfig& config, SamplerKind sampler,
                                               const TransitionModel* model = nullptr) {
    config.validate();
    if (sampler == SamplerKind::ModelLevel && model == nullptr)
        throw std::domain_error("train: model-level sampler requires a TransitionModel");

    const int n = spec.n();
    const std::size_t na = spec.num_actions();
    QTable q(n, spec.actions());
    TrainingReport report;
    report.num_actions = na;
    report.visits.assign(static_cast<std::size_t>(n) * na, 0);

    RngStream rng(config.seed);

    for (std::uint64_t ep = 0; ep < config.episodes; ++ep) {
        const double eps = config.epsilon.value(ep, config.episodes);

        int s;
        Bitstring x(0);
        if (config.start == StartDistribution::UniformState) {
            s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (sampler == SamplerKind::BitLevel) x = Bitstring::canonical(n, s);
        } else {
            x = Bitstring::random(n, rng);
            s = x.ones();
        }

        std::uint64_t steps = 0;
        while (s < n) {
            if (steps == config.step_cap) {
                ++report.truncations;
                break;
            }
            const std::size_t a = choose_action(q, s, eps, rng);
            int s_next;
            if (sampler == SamplerKind::ModelLevel) {
                s_next = sample_transition(s, a, *model, rng);
            } else {
                x = step(x, spec.action(a), rng);
                s_next = x.ones();
            }
            auto& visits = report.visits[static_cast<std::size_t>(s) * na + a];
            const double alpha = config.alpha.value(visits);
            ++visits;
            q_update(q, s, a, -1.0, s_next, alpha);
            s = s_next;
            ++steps;
        }
        report.total_steps += steps;
        ++report.episodes_run;
    }
    return {std::move(q), std::move(report)};
}

// Per-state argmax; ties toward the smaller theta. Fails listing any state
// never visited during training.
inline PolicySpec greedy_from_q(const QTable& q, const TrainingReport& report) {
    std::vector<int> unvisited;
    for (int s = 0; s < q.n(); ++s) {
        if (!report.state_visited(s)) unvisited.push_back(s);
    }
    if (!unvisited.empty()) {
        std::string msg = "greedy_from_q: unvisited states:";
        for (int s : unvisited) msg += ' ' + std::to_string(s);
        throw IncompleteTableError(msg, std::move(unvisited));
    }
    std::vector<double> entries(q.n());
    for (int s = 0; s < q.n(); ++s) entries[s] = q.actions()[q.argmax_at(s)];
    return PolicySpec::table(std::move(entries));
}

// ---------------------------------------------------------------------------
// Q-table CSV round-trip (exact)
// ---------------------------------------------------------------------------

inline void save_qtable(const QTable& q, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("save_qtable: cannot open " + path);
    out << "state,theta,q\n";
    for (int s = 0; s <= q.n(); ++s) {
        for (std::size_t a = 0; a < q.num_actions(); ++a) {
            out << s << ',' << format_double(q.actions()[a]) << ',' << format_double(q.at(s, a))
                << '\n';
        }
    }
}

inline QTable load_qtable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("load_qtable: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || strip(line) != "state,theta,q")
        throw ParseError(path + ":1: expected `state,theta,q` header");

    std::map<std::pair<int, double>, double> cells;
    int max_state = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const auto fields = split_csv_line(trimmed);
        if (fields.size() != 3)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected `state,theta,q`");
        try {
            const int s = std::stoi(fields[0]);
            const double theta = std::stod(fields[1]);
            const double value = std::stod(fields[2]);
            cells[{s, theta}] = value;
            max_state = std::max(max_state, s);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    std::vector<double> actions;
    for (const auto& [key, value] : cells) {
        if (key.first == 0) actions.push_back(key.second);
    }
    if (actions.empty()) throw ParseError(path + ": no q-table rows");
    QTable q(max_state, actions);
    for (int s = 0; s <= max_state; ++s) {
        for (std::size_t a = 0; a < actions.size(); ++a) {
            const auto it = cells.find({s, actions[a]});
            if (it == cells.end())
                throw ParseError(path + ": missing cell for state " + std::to_string(s));
            q.at(s, a) = it->second;
        }
    }
    return q;
}

}  // namespace evoctrl
