#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "evoctrl/csv.hpp"
#include "evoctrl/errors.hpp"
#include "evoctrl/policy.hpp"
#include "evoctrl/probability.hpp"

namespace evoctrl {

// Expected total reward per state: minus the expected time-to-termination.
// V(n) = 0 always.
struct ValueFunction {
    std::vector<double> values;

    double operator()(int s) const { return values[s]; }
    int num_states() const { return static_cast<int>(values.size()); }
};

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> residuals;  // sup-norm change per sweep
};

namespace detail {

// Actions with zero improvement probability induce an improper policy at
// that state (e.g. theta = 1 with n - s <= s) and are excluded from maxima.
inline bool admissible(const TransitionRow& row) { return row.improvement_prob() > 0.0; }

}  // namespace detail

// Synchronous Bellman sweeps on the undiscounted total-reward SSP, from the
// zero initialization (monotone convergence: all rewards are -1 until the
// goal). Stops when the sup-norm residual drops to `tolerance`.
inline std::pair<ValueFunction, SolveReport> value_iteration(const TransitionModel& model,
                                                             double tolerance = 1e-9,
                                                             int max_iterations = 100000) {
    if (!(tolerance > 0.0)) throw std::domain_error("value_iteration: tolerance must be > 0");
    const int n = model.spec().n();
    const std::size_t na = model.spec().num_actions();

    for (int s = 0; s < n; ++s) {
        bool any = false;
        for (std::size_t a = 0; a < na && !any; ++a) any = detail::admissible(model.row(s, a));
        if (!any)
            throw ImproperPolicyError("value_iteration: no admissible action at state " +
                                      std::to_string(s));
    }

    ValueFunction v{std::vector<double>(n + 1, 0.0)};
    std::vector<double> next(n + 1, 0.0);
    SolveReport report;

    for (int it = 0; it < max_iterations; ++it) {
        double residual = 0.0;
        for (int s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < na; ++a) {
                const TransitionRow& row = model.row(s, a);
                if (!detail::admissible(row)) continue;
                double q = -1.0;
                for (std::size_t k = 0; k < row.probs.size(); ++k)
                    q += row.probs[k] * v.values[s + static_cast<int>(k)];
                best = std::max(best, q);
            }
            next[s] = best;
            residual = std::max(residual, std::abs(best - v.values[s]));
        }
        next[n] = 0.0;
        std::swap(v.values, next);
        report.iterations = it + 1;
        report.final_residual = residual;
        report.residuals.push_back(residual);
        if (residual <= tolerance) {
            report.converged = true;
            break;
        }
    }
    return {std::move(v), std::move(report)};
}

// Exact one-pass solver using the upper-triangular structure: with all
// successors above s already final,
//   V(s) = max_theta (-1 + sum_{s'>s} P(s'|s,theta) V(s')) / (1 - P(s|s,theta)).
inline ValueFunction backward_induction(const TransitionModel& model) {
    const int n = model.spec().n();
    const std::size_t na = model.spec().num_actions();
    ValueFunction v{std::vector<double>(n + 1, 0.0)};

    for (int s = n - 1; s >= 0; --s) {
        double best = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t a = 0; a < na; ++a) {
            const TransitionRow& row = model.row(s, a);
            if (!detail::admissible(row)) continue;
            any = true;
            double up = -1.0;
            for (std::size_t k = 1; k < row.probs.size(); ++k)
                up += row.probs[k] * v.values[s + static_cast<int>(k)];
            // Divide by the summed improvement mass rather than 1 - self_loop:
            // the latter can round to a negative zero-ish value when the
            // self-loop is within one ulp of 1.
            best = std::max(best, up / row.improvement_prob());
        }
        if (!any)
            throw ImproperPolicyError("backward_induction: no admissible action at state " +
                                      std::to_string(s));
        v.values[s] = best;
    }
    return v;
}

// Greedy table policy w.r.t. V; ties broken toward the smaller theta.
inline PolicySpec greedy_policy(const TransitionModel& model, const ValueFunction& v) {
    const int n = model.spec().n();
    const std::size_t na = model.spec().num_actions();
    std::vector<double> entries(n);

    for (int s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_a = na;
        for (std::size_t a = 0; a < na; ++a) {
            const TransitionRow& row = model.row(s, a);
            if (!detail::admissible(row)) continue;
            double q = -1.0;
            for (std::size_t k = 0; k < row.probs.size(); ++k)
                q += row.probs[k] * v.values[s + static_cast<int>(k)];
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        if (best_a == na)
            throw ImproperPolicyError("greedy_policy: no admissible action at state " +
                                      std::to_string(s));
        entries[s] = model.spec().action(best_a);
    }
    return PolicySpec::table(std::move(entries));
}

// Exact V^pi by the same backward recursion with theta fixed to the policy's
// (grid-snapped) choice at each state.
inline ValueFunction policy_evaluation(const TransitionModel& model, const PolicySpec& policy) {
    const int n = model.spec().n();
    ValueFunction v{std::vector<double>(n + 1, 0.0)};

    for (int s = n - 1; s >= 0; --s) {
        const std::size_t a = grid_action_index(policy, s, model.spec());
        const TransitionRow& row = model.row(s, a);
        if (!detail::admissible(row))
            throw ImproperPolicyError("policy_evaluation: improper policy at state " +
                                      std::to_string(s));
        double up = -1.0;
        for (std::size_t k = 1; k < row.probs.size(); ++k)
            up += row.probs[k] * v.values[s + static_cast<int>(k)];
        v.values[s] = up / row.improvement_prob();
    }
    return v;
}

inline void write_values_csv(const ValueFunction& v, std::ostream& out) {
    out << "state,value\n";
    for (int s = 0; s < v.num_states(); ++s)
        out << s << ',' << format_double(v.values[s]) << '\n';
}

}  // namespace evoctrl
