#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "slr/errors.hpp"

namespace slr {

struct group_assignment {
    std::vector<int> group_of; // value in [0, group_count)
    int group_count = 0;
};

struct group_summary {
    Eigen::VectorXd mean;       // sample mean of member rows
    Eigen::MatrixXd covariance; // sample covariance (n-1), regularized PSD
    double mean_score = 0.5;    // group mean of baseline scores, clamped inside (0,1)
    int size = 0;
};

// Lloyd's algorithm with k-means++ seeding. Empty clusters are repaired by stealing the
// farthest member of the largest cluster. Throws min_group_size_error if any final
// cluster has fewer than 2 points (so any k > N/2 fails by pigeonhole). wcss_trace, if
// given, receives the within-cluster sum of squares after each assignment pass.
group_assignment kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, int max_iter = 100,
                        std::vector<double>* wcss_trace = nullptr);

// rank rows by score (stable: ties by row index); bin b covers ranks
// [floor(b*N/q), floor((b+1)*N/q))
group_assignment quantile_bins(const std::vector<double>& scores, int q);

// V + lambda*I with lambda = max(floor, 1e-8 * trace(V)/d); input must be symmetric
Eigen::MatrixXd regularize_cov(const Eigen::MatrixXd& V, double floor_value = 1e-8);

std::vector<group_summary> group_summaries(const Eigen::MatrixXd& X,
                                           const std::vector<double>& scores,
                                           const group_assignment& assignment);

} // namespace slr
