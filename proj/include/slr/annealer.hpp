#pragma once

#include <random>
#include <vector>

#include "slr/solver.hpp"

namespace slr {

struct anneal_schedule {
    double initial_temp = 1.0;
    double cooling = 0.9;
    int steps_per_temp = 5;
    double min_temp = 1e-3;
    int max_evals = 300;
    double step_alpha = 0.5;
    double step_beta = 0.1;
    std::uint64_t seed = 0;
    chance_config initial{1.0, 0.5};
};

struct anneal_trace_entry {
    int eval = 0;
    chance_config config;
    double loss = 0.0;
    bool accepted = false;
    double temperature = 0.0;
};

struct anneal_result {
    chance_config best_config;
    weight_vector best_weights;
    double best_loss = 0.0;
    int evals = 0;
    std::vector<anneal_trace_entry> trace;
};

// Gaussian step, alpha reflected to >= 0, beta clamped to [1e-4, 1-1e-4].
// A zero step size skips that component's draw entirely.
chance_config propose(const chance_config& current, const anneal_schedule& schedule,
                      std::mt19937_64& rng);

// accept when delta <= 0 (no draw consumed), else with probability exp(-delta/temp)
bool metropolis_accept(double delta, double temp, std::mt19937_64& rng);

// random walk over (alpha, beta); each candidate is scored by solving the group problem
// and taking the training log-loss of the resulting weights. Failed solves are rejected
// with infinite loss. Returns the best-so-far, not the final walk position.
anneal_result anneal(const std::vector<group_summary>& groups, const Eigen::MatrixXd& train_X,
                     const Eigen::VectorXd& train_y, const anneal_schedule& schedule);

} // namespace slr
