#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evoctrl/csv.hpp"
#include "evoctrl/errors.hpp"
#include "evoctrl/problem.hpp"

namespace evoctrl {

// The three benchmarked policy families: a fixed mutation probability,
// pi(s) = 1/(1+s), and an explicit per-state table.
class PolicySpec {
public:
    enum class Kind { Constant, Reciprocal, Table };

    static PolicySpec constant(double theta) {
        if (!(theta > 0.0) || theta > 1.0)
            throw std::domain_error("PolicySpec: constant theta outside (0, 1]");
        PolicySpec p;
        p.kind_ = Kind::Constant;
        p.constant_theta_ = theta;
        return p;
    }

    static PolicySpec reciprocal() {
        PolicySpec p;
        p.kind_ = Kind::Reciprocal;
        return p;
    }

    // entries[s] = theta for every non-terminal state s = 0 ... n-1.
    static PolicySpec table(std::vector<double> entries) {
        if (entries.empty()) throw std::domain_error("PolicySpec: empty table");
        for (double theta : entries) {
            if (!(theta > 0.0) || theta > 1.0)
                throw std::domain_error("PolicySpec: table theta outside (0, 1]");
        }
        PolicySpec p;
        p.kind_ = Kind::Table;
        p.entries_ = std::move(entries);
        return p;
    }

    Kind kind() const { return kind_; }
    double constant_theta() const { return constant_theta_; }
    const std::vector<double>& entries() const { return entries_; }

    bool operator==(const PolicySpec& other) const {
        return kind_ == other.kind_ && constant_theta_ == other.constant_theta_ &&
               entries_ == other.entries_;
    }

private:
    Kind kind_ = Kind::Reciprocal;
    double constant_theta_ = 0.0;
    std::vector<double> entries_;
};

// Exact theta for state s. Bit-level simulation uses this real value
// directly; only model-based lookups snap it to the grid (see
// grid_action_index).
inline double theta_for_state(const PolicySpec& policy, int s, const ProblemSpec& spec) {
    if (s < 0 || s >= spec.n())
        throw std::domain_error("theta_for_state: state is terminal or out of range");
    switch (policy.kind()) {
        case PolicySpec::Kind::Constant: return policy.constant_theta();
        case PolicySpec::Kind::Reciprocal: return 1.0 / (1.0 + s);
        case PolicySpec::Kind::Table:
            if (s >= static_cast<int>(policy.entries().size()))
                throw std::domain_error("theta_for_state: table does not cover state");
            return policy.entries()[s];
    }
    throw std::logic_error("theta_for_state: unreachable");
}

// On-grid action for callers that need one (model lookup, Q-learning).
inline std::size_t grid_action_index(const PolicySpec& policy, int s, const ProblemSpec& spec) {
    return spec.snap_index(theta_for_state(policy, s, spec));
}

// ---------------------------------------------------------------------------
// Policy CSV round-trip
// ---------------------------------------------------------------------------
// First line: `# policy: table` | `# policy: constant:<theta>` | `# policy: reciprocal`.
// Table form follows with header `state,theta` and one row per non-terminal state.

inline void save_policy(const PolicySpec& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("save_policy: cannot open " + path);
    switch (policy.kind()) {
        case PolicySpec::Kind::Constant:
            out << "# policy: constant:" << format_double(policy.constant_theta()) << "\n";
            break;
        case PolicySpec::Kind::Reciprocal:
            out << "# policy: reciprocal\n";
            break;
        case PolicySpec::Kind::Table:
            out << "# policy: table\n";
            out << "state,theta\n";
            for (std::size_t s = 0; s < policy.entries().size(); ++s)
                out << s << ',' << format_double(policy.entries()[s]) << '\n';
            break;
    }
}

inline PolicySpec load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("load_policy: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ":1: empty policy file");
    const std::string header = strip(line);

    const std::string prefix = "# policy: ";
    if (header.rfind(prefix, 0) != 0)
        throw ParseError(path + ":1: expected `# policy: ...` header");
    const std::string variant = header.substr(prefix.size());

    if (variant == "reciprocal") return PolicySpec::reciprocal();
    if (variant.rfind("constant:", 0) == 0) {
        const std::string value = variant.substr(9);
        std::size_t consumed = 0;
        double theta;
        try {
            theta = std::stod(value, &consumed);
        } catch (const std::exception&) {
            throw ParseError(path + ":1: bad constant theta `" + value + "`");
        }
        if (consumed != value.size())
            throw ParseError(path + ":1: bad constant theta `" + value + "`");
        if (!(theta > 0.0) || theta > 1.0)
            throw ParseError(path + ":1: constant theta outside (0, 1]");
        return PolicySpec::constant(theta);
    }
    if (variant != "table")
        throw ParseError(path + ":1: unknown policy variant `" + variant + "`");

    if (!std::getline(in, line) || strip(line) != "state,theta")
        throw ParseError(path + ":2: expected `state,theta` header");

    std::vector<std::pair<int, double>> raw;
    int lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const auto fields = split_csv_line(trimmed);
        if (fields.size() != 2)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected `state,theta`");
        int state;
        double theta;
        try {
            state = std::stoi(fields[0]);
            theta = std::stod(fields[1]);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
        if (state < 0)
            throw ParseError(path + ":" + std::to_string(lineno) + ": negative state");
        if (!(theta > 0.0) || theta > 1.0)
            throw ParseError(path + ":" + std::to_string(lineno) + ": theta outside (0, 1]");
        raw.emplace_back(state, theta);
    }
    if (raw.empty()) throw ParseError(path + ": table policy with no rows");

    int max_state = 0;
    for (const auto& [s, theta] : raw) max_state = std::max(max_state, s);
    std::vector<double> entries(max_state + 1, -1.0);
    for (const auto& [s, theta] : raw) {
        if (entries[s] >= 0.0)
            throw ParseError(path + ": duplicate entry for state " + std::to_string(s));
        entries[s] = theta;
    }
    for (int s = 0; s <= max_state; ++s) {
        if (entries[s] < 0.0)
            throw ParseError(path + ": missing entry for state " + std::to_string(s));
    }
    return PolicySpec::table(std::move(entries));
}

}  // namespace evoctrl
