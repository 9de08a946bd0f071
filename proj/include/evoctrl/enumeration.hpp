#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "evoctrl/errors.hpp"
#include "evoctrl/probability.hpp"

namespace evoctrl {

// Independent test oracle: exhausts all 2^n mutation masks on a canonical
// bitstring with s ones, weights each by theta^f (1-theta)^(n-f) with f the
// number of flipped bits, and applies the elitist acceptance rule directly.
// Deliberately shares no convolution code with net_gain_pmf.
inline TransitionRow enumerate_transition_oracle(int s, double theta, int n) {
    if (n > 16) throw BudgetError("enumerate_transition_oracle: n > 16 exceeds the 2^n budget");
    if (s < 0 || s > n) throw std::domain_error("enumerate_transition_oracle: state out of range");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::domain_error("enumerate_transition_oracle: theta outside (0, 1]");

    // Canonical parent: s low bits set.
    const std::uint32_t parent = (s == 0) ? 0u : ((1u << s) - 1u);

    // theta^f * (1-theta)^(n-f) for f = 0..n.
    std::vector<double> weight(n + 1);
    for (int f = 0; f <= n; ++f) {
        double w = 1.0;
        for (int i = 0; i < f; ++i) w *= theta;
        for (int i = 0; i < n - f; ++i) w *= 1.0 - theta;
        weight[f] = w;
    }

    std::vector<double> dist(n - s + 1, 0.0);
    const std::uint64_t num_masks = 1ull << n;
    for (std::uint64_t mask = 0; mask < num_masks; ++mask) {
        const int flips = std::popcount(mask);
        const std::uint32_t child = parent ^ static_cast<std::uint32_t>(mask);
        const int child_ones = std::popcount(child);
        const int accepted = (child_ones > s) ? child_ones : s;
        dist[accepted - s] += weight[flips];
    }

    TransitionRow row;
    row.s = s;
    row.theta = theta;
    row.probs = std::move(dist);
    while (row.probs.size() > 1 && row.probs.back() == 0.0) row.probs.pop_back();
    return row;
}

}  // namespace evoctrl
