#include "slr/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slr/errors.hpp"

namespace slr {

chance_config propose(const chance_config& current, const anneal_schedule& schedule,
                      std::mt19937_64& rng) {
    chance_config next = current;
    if (schedule.step_alpha > 0.0) {
        std::normal_distribution<double> d(0.0, schedule.step_alpha);
        next.alpha = std::abs(current.alpha + d(rng));
    }
    if (schedule.step_beta > 0.0) {
        std::normal_distribution<double> d(0.0, schedule.step_beta);
        next.beta = std::clamp(current.beta + d(rng), 1e-4, 1.0 - 1e-4);
    }
    return next;
}

bool metropolis_accept(double delta, double temp, std::mt19937_64& rng) {
    if (delta <= 0.0) return true;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return uni(rng) < std::exp(-delta / temp);
}

namespace {

double score_candidate(const chance_config& config, const std::vector<group_summary>& groups,
                       const Eigen::MatrixXd& train_X, const Eigen::VectorXd& train_y,
                       weight_vector& weights_out) {
    try {
        solver_report rep = solve_slr(assemble_reduced(groups, config));
        if (rep.status != solve_status::optimal) return std::numeric_limits<double>::infinity();
        weights_out = rep.weights;
        double loss = log_loss(rep.weights, train_X, train_y);
        return std::isfinite(loss) ? loss : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

} // namespace

anneal_result anneal(const std::vector<group_summary>& groups, const Eigen::MatrixXd& train_X,
                     const Eigen::VectorXd& train_y, const anneal_schedule& schedule) {
    if (schedule.max_evals < 1) throw config_error("anneal: max_evals must be >= 1");
    if (!(schedule.cooling > 0.0 && schedule.cooling < 1.0))
        throw config_error("anneal: cooling must lie in (0,1)");

    std::mt19937_64 rng(schedule.seed);
    anneal_result out;

    chance_config current = schedule.initial;
    weight_vector current_w;
    double current_loss = score_candidate(current, groups, train_X, train_y, current_w);
    if (!std::isfinite(current_loss))
        throw solver_error("anneal: the initial (alpha, beta) = (" +
                           std::to_string(current.alpha) + ", " + std::to_string(current.beta) +
                           ") could not be solved");
    out.evals = 1;
    out.trace.push_back({1, current, current_loss, true, schedule.initial_temp});

    out.best_config = current;
    out.best_weights = current_w;
    out.best_loss = current_loss;

    double temp = schedule.initial_temp;
    while (temp > schedule.min_temp && out.evals < schedule.max_evals) {
        for (int s = 0; s < schedule.steps_per_temp && out.evals < schedule.max_evals; ++s) {
            chance_config cand = propose(current, schedule, rng);
            weight_vector cand_w;
            double cand_loss = score_candidate(cand, groups, train_X, train_y, cand_w);
            out.evals++;

            bool take = std::isfinite(cand_loss) &&
                        metropolis_accept(cand_loss - current_loss, temp, rng);
            out.trace.push_back({out.evals, cand, cand_loss, take, temp});
            if (take) {
                current = cand;
                current_loss = cand_loss;
                current_w = cand_w;
                if (cand_loss < out.best_loss) {
                    out.best_config = cand;
                    out.best_weights = cand_w;
                    out.best_loss = cand_loss;
                }
            }
        }
        temp *= schedule.cooling;
    }
    return out;
}

} // namespace slr
