#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "evoctrl/csv.hpp"
#include "evoctrl/problem.hpp"

namespace evoctrl {

// ---------------------------------------------------------------------------
// Binomial pmf
// ---------------------------------------------------------------------------

// P(X = k) for X ~ Bin(m, theta). Stable at m = 1000 (log-gamma, no
// factorials) and exact at theta in {0, 1}.
inline double binomial_pmf(int k, int m, double theta) {
    if (k < 0 || m < 0 || k > m)
        throw std::domain_error("binomial_pmf: k out of range");
    if (!(theta >= 0.0) || theta > 1.0)
        throw std::domain_error("binomial_pmf: theta outside [0, 1]");
    if (theta == 0.0) return k == 0 ? 1.0 : 0.0;
    if (theta == 1.0) return k == m ? 1.0 : 0.0;
    const double lp = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0)
                    + k * std::log(theta) + (m - k) * std::log1p(-theta);
    return std::exp(lp);
}

namespace detail {

struct BinomialPmfWindow {
    int lo = 0;                  // smallest k with stored mass
    std::vector<double> probs;   // probs[i] = P(X = lo + i)
};

// Full pmf of Bin(m, theta) computed by a multiplicative recurrence anchored
// at the mode, so tail entries are reached by decreasing products and never
// overflow. Entries below `threshold` are dropped; the discarded mass is at
// most (m+1)*threshold.
inline BinomialPmfWindow binomial_pmf_window(int m, double theta, double threshold = 0.0) {
    if (m == 0 || theta == 0.0) return {0, {1.0}};
    if (theta == 1.0) return {m, {1.0}};

    int mode = static_cast<int>(std::floor((m + 1) * theta));
    mode = std::min(mode, m);
    const double log_mode = std::lgamma(m + 1.0) - std::lgamma(mode + 1.0)
                          - std::lgamma(m - mode + 1.0)
                          + mode * std::log(theta) + (m - mode) * std::log1p(-theta);
    const double p_mode = std::exp(log_mode);
    const double ratio = theta / (1.0 - theta);

    std::vector<double> buf(m + 1, 0.0);
    buf[mode] = p_mode;
    int lo = mode, hi = mode;
    double p = p_mode;
    for (int k = mode; k < m; ++k) {
        p *= ratio * (m - k) / (k + 1.0);
        if (p < threshold || p == 0.0) break;
        buf[k + 1] = p;
        hi = k + 1;
    }
    p = p_mode;
    for (int k = mode; k > 0; --k) {
        p *= k / (ratio * (m - k + 1.0));
        if (p < threshold || p == 0.0) break;
        buf[k - 1] = p;
        lo = k - 1;
    }
    // Normalize away the anchor's log-gamma bias: the recurrence fixes the
    // shape of the pmf but the mode value carries a relative error of order
    // eps * |log p_mode|, which at m = 1000 is a common ~1e-12 scale factor
    // across the whole window.
    std::vector<double> window(buf.begin() + lo, buf.begin() + hi + 1);
    double total = 0.0;
    for (double v : window) total += v;
    for (double& v : window) v /= total;
    return {lo, std::move(window)};
}

// Below this mass an entry cannot influence any 1e-12 check even after
// summing 1000 terms.
inline constexpr double kTailThreshold = 1e-20;

inline double window_threshold(int m) { return m > 64 ? kTailThreshold : 0.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Net gain distribution Z' = W - L
// ---------------------------------------------------------------------------

// Distribution of the net one-bit gain of a single mutation from a state with
// s ones: W ~ Bin(n-s, theta) ones gained, L ~ Bin(s, theta) ones lost.
// Support is z = -s ... n-s.
struct NetGainDistribution {
    int s = 0;
    double theta = 0.0;
    int support_min = 0;          // = -s
    std::vector<double> probs;    // probs[i] = P(Z' = support_min + i), length n+1

    int n() const { return static_cast<int>(probs.size()) - 1; }
    double at(int z) const {
        const int i = z - support_min;
        if (i < 0 || i >= static_cast<int>(probs.size())) return 0.0;
        return probs[i];
    }
};

// Convolution P(Z' = z) = sum_k p_W(k) * p_L(k - z).
inline NetGainDistribution net_gain_pmf(int s, double theta, int n) {
    if (s < 0 || s > n) throw std::domain_error("net_gain_pmf: state out of range");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::domain_error("net_gain_pmf: theta outside (0, 1]");

    const int n0 = n - s;  // zeros, candidates for gain
    const auto pw = detail::binomial_pmf_window(n0, theta, detail::window_threshold(n0));
    const auto pl = detail::binomial_pmf_window(s, theta, detail::window_threshold(s));

    NetGainDistribution d;
    d.s = s;
    d.theta = theta;
    d.support_min = -s;
    d.probs.assign(n + 1, 0.0);
    for (std::size_t iw = 0; iw < pw.probs.size(); ++iw) {
        const int k = pw.lo + static_cast<int>(iw);
        const double w = pw.probs[iw];
        for (std::size_t il = 0; il < pl.probs.size(); ++il) {
            const int l = pl.lo + static_cast<int>(il);
            d.probs[(k - l) + s] += w * pl.probs[il];
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Transition rows and model
// ---------------------------------------------------------------------------

// Successor distribution under elitist acceptance. probs[k] = P(s' = s + k);
// mass below s is zero by elitism and not stored. Trailing zeros are trimmed.
struct TransitionRow {
    int s = 0;
    double theta = 0.0;
    std::vector<double> probs;

    double self_loop() const { return probs[0]; }
    double improvement_prob() const {
        double p = 0.0;
        for (std::size_t k = 1; k < probs.size(); ++k) p += probs[k];
        return p;
    }
    double sum() const {
        double p = 0.0;
        for (double v : probs) p += v;
        return p;
    }
    double at_state(int s_prime) const {
        const int k = s_prime - s;
        if (k < 0 || k >= static_cast<int>(probs.size())) return 0.0;
        return probs[k];
    }
};

// Collapses all z <= 0 mass onto the self-loop: the candidate is rejected
// unless it strictly improves.
inline TransitionRow elitist_truncate(const NetGainDistribution& d) {
    TransitionRow row;
    row.s = d.s;
    row.theta = d.theta;
    const int n0 = d.n() - d.s;
    row.probs.assign(n0 + 1, 0.0);
    // The self-loop is the complement of the improvement mass, not the summed
    // z <= 0 mass: the complement keeps every row stochastic to within a few
    // ulps even at n = 1000, and absorbs any mass the pmf window dropped.
    double improve = 0.0;
    for (int z = 1; z <= n0; ++z) {
        row.probs[z] = d.at(z);
        improve += row.probs[z];
    }
    row.probs[0] = std::max(0.0, 1.0 - improve);
    while (row.probs.size() > 1 && row.probs.back() == 0.0) row.probs.pop_back();
    return row;
}

// Exact transition probabilities for every (state, action) pair. Rows are
// upper-triangular in the state index; s = n is absorbing for every theta.
class TransitionModel {
public:
    TransitionModel(ProblemSpec spec, std::vector<std::vector<TransitionRow>> rows)
        : spec_(std::move(spec)), rows_(std::move(rows)) {}

    const ProblemSpec& spec() const { return spec_; }
    const TransitionRow& row(int s, std::size_t a) const { return rows_[s][a]; }
    int num_states() const { return spec_.n() + 1; }

private:
    ProblemSpec spec_;
    std::vector<std::vector<TransitionRow>> rows_;  // [s][action]
};

inline TransitionModel build_transition_model(const ProblemSpec& spec, bool parallel = true) {
    const int n = spec.n();
    const std::size_t na = spec.num_actions();
    std::vector<std::vector<TransitionRow>> rows(n + 1);

    auto build_state = [&](int s) {
        rows[s].reserve(na);
        for (std::size_t a = 0; a < na; ++a) {
            if (s == n) {
                rows[s].push_back(TransitionRow{n, spec.action(a), {1.0}});
            } else {
                rows[s].push_back(elitist_truncate(net_gain_pmf(s, spec.action(a), n)));
            }
        }
    };

    const unsigned hw = std::thread::hardware_concurrency();
    if (parallel && hw > 1 && n >= 64) {
        // Rows are independent and deterministic, so the parallel build is
        // bit-identical to the sequential one.
        std::vector<std::thread> workers;
        std::size_t nw = std::min<std::size_t>(hw, 16);
        for (std::size_t w = 0; w < nw; ++w) {
            workers.emplace_back([&, w] {
                for (int s = static_cast<int>(w); s <= n; s += static_cast<int>(nw)) build_state(s);
            });
        }
        for (auto& t : workers) t.join();
    } else {
        for (int s = 0; s <= n; ++s) build_state(s);
    }
    return TransitionModel(spec, std::move(rows));
}

// Debug export: one line per nonzero entry.
inline void write_transition_csv(const TransitionModel& model, std::ostream& out) {
    out << "s,theta,s_prime,prob\n";
    const int n = model.spec().n();
    for (int s = 0; s <= n; ++s) {
        for (std::size_t a = 0; a < model.spec().num_actions(); ++a) {
            const TransitionRow& row = model.row(s, a);
            for (std::size_t k = 0; k < row.probs.size(); ++k) {
                if (row.probs[k] == 0.0) continue;
                out << s << ',' << format_double(row.theta) << ',' << (s + static_cast<int>(k))
                    << ',' << format_double(row.probs[k]) << '\n';
            }
        }
    }
}

}  // namespace evoctrl
