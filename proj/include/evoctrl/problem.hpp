#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace evoctrl {

// Problem size n and the discrete action grid of mutation probabilities.
// theta = 0 is excluded: it makes every non-terminal state absorbing.
class ProblemSpec {
public:
    ProblemSpec(int n, std::vector<double> actions)
        : n_(n), actions_(std::move(actions)) {
        if (n_ < 1) throw std::domain_error("ProblemSpec: n must be >= 1");
        if (actions_.empty()) throw std::domain_error("ProblemSpec: empty action grid");
        double prev = 0.0;
        for (double theta : actions_) {
            if (!(theta > 0.0) || theta > 1.0)
                throw std::domain_error("ProblemSpec: action theta must be in (0, 1]");
            if (theta <= prev)
                throw std::domain_error("ProblemSpec: actions must be strictly increasing");
            prev = theta;
        }
    }

    explicit ProblemSpec(int n) : ProblemSpec(n, default_grid()) {}

    // {0.01, 0.02, ..., 0.99, 1.00}
    static std::vector<double> default_grid() {
        std::vector<double> grid(100);
        for (int i = 0; i < 100; ++i) grid[i] = (i + 1) / 100.0;
        return grid;
    }

    static std::vector<double> make_grid(double lo, double hi, double step) {
        if (!(step > 0.0)) throw std::domain_error("make_grid: step must be positive");
        std::vector<double> grid;
        for (int i = 0;; ++i) {
            const double theta = lo + i * step;
            if (theta > hi + step * 1e-9) break;
            grid.push_back(std::min(theta, 1.0));
        }
        return grid;
    }

    int n() const { return n_; }
    const std::vector<double>& actions() const { return actions_; }
    std::size_t num_actions() const { return actions_.size(); }
    double action(std::size_t a) const { return actions_[a]; }

    // Index of the grid point nearest to theta; ties broken toward the
    // smaller theta. Idempotent on grid points.
    std::size_t snap_index(double theta) const {
        std::size_t best = 0;
        double best_dist = std::abs(actions_[0] - theta);
        for (std::size_t a = 1; a < actions_.size(); ++a) {
            const double dist = std::abs(actions_[a] - theta);
            if (dist < best_dist) {
                best = a;
                best_dist = dist;
            }
        }
        return best;
    }

    double snap(double theta) const { return actions_[snap_index(theta)]; }

private:
    int n_;
    std::vector<double> actions_;
};

}  // namespace evoctrl
