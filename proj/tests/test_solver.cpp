#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "evoctrl/solver.hpp"

using namespace evoctrl;

namespace {

// Scalar oracle: from s = n-1 the only improvement is flipping the last zero
// and none of the ones, so escape probability is theta * (1-theta)^(n-1) and
// the expected time is geometric.
double best_escape_from_last_state(const ProblemSpec& spec) {
    double best = 0.0;
    for (double theta : spec.actions())
        best = std::max(best, theta * std::pow(1.0 - theta, spec.n() - 1));
    return best;
}

double sup_norm_diff(const ValueFunction& a, const ValueFunction& b) {
    double d = 0.0;
    for (int s = 0; s < a.num_states(); ++s) d = std::max(d, std::abs(a.values[s] - b.values[s]));
    return d;
}

}  // namespace

TEST_CASE("n=1 single deterministic step") {
    const TransitionModel model = build_transition_model(ProblemSpec(1, {1.0}));
    const auto [v, report] = value_iteration(model);
    CHECK(report.converged);
    CHECK(v(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(v(1) == 0.0);

    const ValueFunction exact = backward_induction(model);
    CHECK(exact(0) == doctest::Approx(-1.0).epsilon(1e-12));

    const PolicySpec greedy = greedy_policy(model, exact);
    CHECK(greedy.entries()[0] == 1.0);
}

TEST_CASE("V*(n-1) equals the geometric closed form") {
    SUBCASE("n=3 full grid") {
        const TransitionModel model = build_transition_model(ProblemSpec(3));
        const double p = best_escape_from_last_state(model.spec());
        CHECK(p == doctest::Approx(0.33 * 0.67 * 0.67).epsilon(1e-12));
        const ValueFunction v = backward_induction(model);
        CHECK(v(2) == doctest::Approx(-1.0 / p).epsilon(1e-10));
        CHECK(v(2) == doctest::Approx(-6.7505).epsilon(1e-4));
    }
    SUBCASE("n=50 full grid") {
        const TransitionModel model = build_transition_model(ProblemSpec(50));
        const double p = 0.02 * std::pow(0.98, 49);
        CHECK(best_escape_from_last_state(model.spec()) == doctest::Approx(p).epsilon(1e-12));
        const ValueFunction v = backward_induction(model);
        CHECK(v(49) == doctest::Approx(-1.0 / p).epsilon(1e-10));
    }
}

TEST_CASE("cross-solver agreement") {
    // The sup-norm value error after stopping is roughly the residual divided
    // by the slowest escape probability, so the tolerance is picked well
    // below the agreement target.
    for (int n : {3, 10}) {
        const TransitionModel model = build_transition_model(ProblemSpec(n));
        const auto [vi, report] = value_iteration(model, 1e-11, 100000);
        CHECK(report.converged);
        CHECK(sup_norm_diff(vi, backward_induction(model)) <= 1e-8);
    }
}

TEST_CASE("value iteration residuals are non-increasing after the first sweep") {
    const TransitionModel model = build_transition_model(ProblemSpec(10));
    const auto [v, report] = value_iteration(model);
    for (std::size_t i = 1; i < report.residuals.size(); ++i)
        CHECK(report.residuals[i] <= report.residuals[i - 1] + 1e-15);
}

TEST_CASE("non-convergence is reported, not thrown") {
    const TransitionModel model = build_transition_model(ProblemSpec(10));
    const auto [v, report] = value_iteration(model, 1e-12, 3);
    CHECK_FALSE(report.converged);
    CHECK(report.iterations == 3);
    CHECK(v(5) < 0.0);  // values still returned
}

TEST_CASE("greedy policy matches a brute-force grid scan") {
    const TransitionModel model = build_transition_model(ProblemSpec(2));
    const ValueFunction v = backward_induction(model);
    const PolicySpec greedy = greedy_policy(model, v);

    // Independent scan over the grid at s = 0 using raw one-step lookahead.
    double best = -1e300;
    double best_theta = 0.0;
    for (std::size_t a = 0; a < model.spec().num_actions(); ++a) {
        const TransitionRow& row = model.row(0, a);
        if (row.improvement_prob() == 0.0) continue;
        double q = -1.0;
        for (std::size_t k = 0; k < row.probs.size(); ++k)
            q += row.probs[k] * v.values[static_cast<int>(k)];
        if (q > best) {
            best = q;
            best_theta = model.spec().action(a);
        }
    }
    CHECK(greedy.entries()[0] == best_theta);

    // n=50: the last state's argmax has a closed form.
    const TransitionModel m50 = build_transition_model(ProblemSpec(50));
    const PolicySpec g50 = greedy_policy(m50, backward_induction(m50));
    CHECK(g50.entries()[49] == doctest::Approx(0.02));
}

TEST_CASE("policy evaluation") {
    const TransitionModel model = build_transition_model(ProblemSpec(50));
    const ValueFunction v_star = backward_induction(model);

    SUBCASE("greedy policy is a fixed point") {
        const ValueFunction v_pi = policy_evaluation(model, greedy_policy(model, v_star));
        CHECK(sup_norm_diff(v_pi, v_star) <= 1e-8);
    }
    SUBCASE("constant 1/n at s = n-1 has the geometric value") {
        const ValueFunction v = policy_evaluation(model, PolicySpec::constant(0.02));
        CHECK(v(49) == doctest::Approx(-1.0 / (0.02 * std::pow(0.98, 49))).epsilon(1e-10));
    }
    SUBCASE("dominance: V* >= V^pi everywhere, strictly somewhere") {
        for (const PolicySpec& pi : {PolicySpec::constant(0.02), PolicySpec::reciprocal()}) {
            const ValueFunction v_pi = policy_evaluation(model, pi);
            bool strict = false;
            for (int s = 0; s <= 50; ++s) {
                CHECK(v_star(s) >= v_pi(s) - 1e-9);
                if (v_star(s) > v_pi(s) + 1e-6) strict = true;
            }
            CHECK(strict);
        }
    }
}

TEST_CASE("reciprocal policy at s=0, n=2 takes one deterministic step") {
    const TransitionModel model = build_transition_model(ProblemSpec(2));
    const ValueFunction v = policy_evaluation(model, PolicySpec::reciprocal());
    // theta = 1 flips both zeros: straight to the optimum.
    CHECK(v(0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("V* shape: nonpositive, zero at the goal, monotone above n/2") {
    // Below n/2 the optimum exploits theta = 1: flipping every bit jumps
    // deterministically from s to n - s, so V*(0) = -1 and V* is NOT
    // monotone at low states. Above n/2 no such jump exists and V* is
    // non-decreasing.
    for (int n : {3, 10, 50}) {
        const ValueFunction v = backward_induction(build_transition_model(ProblemSpec(n)));
        CHECK(v(n) == 0.0);
        for (int s = 0; s < n; ++s) CHECK(v(s) <= 0.0);
        for (int s = (n + 1) / 2; s < n; ++s) CHECK(v(s) <= v(s + 1) + 1e-12);
    }
}

TEST_CASE("theta = 1 reflection: V*(0) = -1 and V*(1) = -1 + V*(n-1)") {
    const ValueFunction v = backward_induction(build_transition_model(ProblemSpec(50)));
    CHECK(v(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(v(1) == doctest::Approx(-1.0 + v(49)).epsilon(1e-9));
}

TEST_CASE("improper policies are rejected by name") {
    // theta = 1 from s >= n/2 can never improve: n=2, s=1 has no admissible action.
    const TransitionModel model = build_transition_model(ProblemSpec(2, {1.0}));
    CHECK_THROWS_AS(backward_induction(model), ImproperPolicyError);
    CHECK_THROWS_AS(value_iteration(model), ImproperPolicyError);
    const TransitionModel ok = build_transition_model(ProblemSpec(2));
    CHECK_THROWS_WITH_AS(policy_evaluation(ok, PolicySpec::constant(1.0)),
                         doctest::Contains("state 1"), ImproperPolicyError);
}
