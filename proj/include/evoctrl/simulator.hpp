#pragma once

#include <cstdint>
#include <ostream>
#include <variant>
#include <vector>

#include "evoctrl/csv.hpp"
#include "evoctrl/policy.hpp"
#include "evoctrl/probability.hpp"
#include "evoctrl/rng.hpp"

namespace evoctrl {

class Bitstring {
public:
    explicit Bitstring(int n) : bits_(n, 0), ones_(0) {}

    // s leading ones, the rest zeros.
    static Bitstring canonical(int n, int ones) {
        if (ones < 0 || ones > n) throw std::domain_error("Bitstring: ones out of range");
        Bitstring x(n);
        for (int i = 0; i < ones; ++i) x.bits_[i] = 1;
        x.ones_ = ones;
        return x;
    }

    static Bitstring from_bits(std::vector<std::uint8_t> bits) {
        Bitstring x(static_cast<int>(bits.size()));
        x.bits_ = std::move(bits);
        x.ones_ = 0;
        for (auto b : x.bits_) x.ones_ += b;
        return x;
    }

    // Each bit i.i.d. uniform, so ones ~ Bin(n, 1/2). Consumes n draws.
    static Bitstring random(int n, RngStream& rng) {
        Bitstring x(n);
        for (int i = 0; i < n; ++i) {
            const std::uint8_t b = rng.next_double() < 0.5 ? 1 : 0;
            x.bits_[i] = b;
            x.ones_ += b;
        }
        return x;
    }

    int size() const { return static_cast<int>(bits_.size()); }
    int ones() const { return ones_; }
    bool bit(int i) const { return bits_[i] != 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    void flip(int i) {
        bits_[i] ^= 1;
        ones_ += bits_[i] ? 1 : -1;
    }

    bool operator==(const Bitstring& other) const { return bits_ == other.bits_; }

private:
    std::vector<std::uint8_t> bits_;
    int ones_;
};

// Each bit flipped independently with probability theta. Always consumes
// exactly n draws, so seeded runs do not depend on short-circuiting.
inline Bitstring mutate(const Bitstring& x, double theta, RngStream& rng) {
    if (!(theta >= 0.0) || theta > 1.0) throw std::domain_error("mutate: theta outside [0, 1]");
    Bitstring y = x;
    for (int i = 0; i < x.size(); ++i) {
        if (rng.next_double() < theta) y.flip(i);
    }
    return y;
}

// One (1+1) EA iteration: keep the mutant only on strict improvement.
inline Bitstring step(const Bitstring& x, double theta, RngStream& rng) {
    Bitstring candidate = mutate(x, theta, rng);
    return candidate.ones() > x.ones() ? candidate : x;
}

struct StepRecord {
    int s;
    double theta;
    int s_next;
};

struct EpisodeTrace {
    int start_state = 0;
    std::vector<StepRecord> transitions;  // empty unless recording requested
    std::uint64_t steps = 0;
    bool truncated = false;
};

struct RandomStart {};
using EpisodeStart = std::variant<Bitstring, int, RandomStart>;

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000;

// Runs the policy-controlled EA until OM(x) = n or step_cap. A `state` start
// uses the canonical bitstring with that many leading ones; exchangeability
// makes the arrangement immaterial (tested).
inline EpisodeTrace run_episode(const ProblemSpec& spec, const PolicySpec& policy,
                                const EpisodeStart& start, RngStream& rng,
                                std::uint64_t step_cap = kDefaultStepCap,
                                bool record_transitions = false) {
    if (step_cap == 0) throw std::domain_error("run_episode: step_cap must be > 0");
    const int n = spec.n();

    Bitstring x = [&] {
        if (std::holds_alternative<Bitstring>(start)) return std::get<Bitstring>(start);
        if (std::holds_alternative<int>(start)) return Bitstring::canonical(n, std::get<int>(start));
        return Bitstring::random(n, rng);
    }();
    if (x.size() != n) throw std::domain_error("run_episode: bitstring length mismatch");

    EpisodeTrace trace;
    trace.start_state = x.ones();
    while (x.ones() < n) {
        if (trace.steps == step_cap) {
            trace.truncated = true;
            break;
        }
        const int s = x.ones();
        const double theta = theta_for_state(policy, s, spec);
        x = step(x, theta, rng);
        ++trace.steps;
        if (record_transitions) trace.transitions.push_back({s, theta, x.ones()});
    }
    return trace;
}

// State-level sampling from a transition row by inverse CDF; the fast path
// for Q-learning.
inline int sample_transition(int s, std::size_t action, const TransitionModel& model,
                             RngStream& rng) {
    const TransitionRow& row = model.row(s, action);
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t k = 0; k < row.probs.size(); ++k) {
        cum += row.probs[k];
        if (u < cum) return s + static_cast<int>(k);
    }
    return s + static_cast<int>(row.probs.size()) - 1;
}

inline void write_trace_csv(const EpisodeTrace& trace, std::ostream& out) {
    out << "t,s,theta,s_prime\n";
    for (std::size_t t = 0; t < trace.transitions.size(); ++t) {
        const StepRecord& r = trace.transitions[t];
        out << t << ',' << r.s << ',' << format_double(r.theta) << ',' << r.s_next << '\n';
    }
}

}  // namespace evoctrl
