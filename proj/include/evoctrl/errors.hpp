#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evoctrl {

// Malformed input file (policy CSV, q-table CSV, config).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A policy (or action choice) with zero probability of ever reaching the
// terminal state from some state.
struct ImproperPolicyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Greedy extraction requested from a Q-table with unvisited states.
struct IncompleteTableError : std::runtime_error {
    IncompleteTableError(std::string msg, std::vector<int> s)
        : std::runtime_error(std::move(msg)), states(std::move(s)) {}
    std::vector<int> states;
};

// Exhaustive enumeration requested beyond the 2^n budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monte Carlo evaluation produced no usable episodes.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace evoctrl
