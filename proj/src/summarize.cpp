#include "slr/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace slr {

namespace {

// portable weighted index draw: prefix scan over weights, avoids
// std::discrete_distribution's implementation-defined internals
std::size_t draw_weighted(const std::vector<double>& weights, double total,
                          std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, total);
    double u = uni(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1; // rounding fell off the end
}

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& X, int k, std::mt19937_64& rng) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd centers(k, X.cols());
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.row(0) = X.row(first(rng));

    std::vector<double> d2(static_cast<std::size_t>(n));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j)
                best = std::min(best, (X.row(i) - centers.row(j)).squaredNorm());
            d2[std::size_t(i)] = best;
            total += best;
        }
        if (total <= 0.0) {
            // all points coincide with chosen centers; any row works
            centers.row(c) = X.row(first(rng));
        } else {
            centers.row(c) = X.row(Eigen::Index(draw_weighted(d2, total, rng)));
        }
    }
    return centers;
}

} // namespace

group_assignment kmeans(const Eigen::MatrixXd& X, int k, std::uint64_t seed, int max_iter,
                        std::vector<double>* wcss_trace) {
    const Eigen::Index n = X.rows();
    if (k < 1) throw data_error("kmeans: k must be >= 1, got " + std::to_string(k));
    if (Eigen::Index(k) > n)
        throw data_error("kmeans: k=" + std::to_string(k) + " exceeds the number of rows " +
                         std::to_string(n));

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers = kmeanspp_centers(X, k, rng);

    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> sizes(std::size_t(k), 0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        double wcss = 0.0;
        std::fill(sizes.begin(), sizes.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (X.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (X.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[std::size_t(i)] != best) {
                assign[std::size_t(i)] = best;
                changed = true;
            }
            sizes[std::size_t(best)]++;
            wcss += best_d;
        }
        if (wcss_trace) wcss_trace->push_back(wcss);

        // repair empty clusters: take the farthest point of the largest cluster
        for (int c = 0; c < k; ++c) {
            while (sizes[std::size_t(c)] == 0) {
                int largest = int(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
                Eigen::Index steal = -1;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (assign[std::size_t(i)] != largest) continue;
                    double d = (X.row(i) - centers.row(largest)).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        steal = i;
                    }
                }
                assign[std::size_t(steal)] = c;
                sizes[std::size_t(largest)]--;
                sizes[std::size_t(c)]++;
                changed = true;
            }
        }

        for (int c = 0; c < k; ++c) {
            if (sizes[std::size_t(c)] == 0) continue;
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(X.cols());
            for (Eigen::Index i = 0; i < n; ++i)
                if (assign[std::size_t(i)] == c) sum += X.row(i);
            centers.row(c) = sum / double(sizes[std::size_t(c)]);
        }
        if (!changed) break;
    }

    for (int c = 0; c < k; ++c)
        if (sizes[std::size_t(c)] < 2) throw min_group_size_error(c, int(sizes[std::size_t(c)]));

    return {std::move(assign), k};
}

group_assignment quantile_bins(const std::vector<double>& scores, int q) {
    const std::size_t n = scores.size();
    if (q < 1) throw data_error("quantile_bins: q must be >= 1, got " + std::to_string(q));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<int> assign(n, -1);
    for (int b = 0; b < q; ++b) {
        std::size_t lo = std::size_t(b) * n / std::size_t(q);
        std::size_t hi = std::size_t(b + 1) * n / std::size_t(q);
        if (hi - lo < 2) throw min_group_size_error(b, int(hi - lo));
        for (std::size_t r = lo; r < hi; ++r) assign[order[r]] = b;
    }
    return {std::move(assign), q};
}

Eigen::MatrixXd regularize_cov(const Eigen::MatrixXd& V, double floor_value) {
    if (V.rows() != V.cols()) throw data_error("regularize_cov: matrix not square");
    double asym = (V - V.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9)
        throw data_error("regularize_cov: input asymmetric by " + std::to_string(asym));
    double lambda = std::max(floor_value, 1e-8 * V.trace() / double(V.rows()));
    Eigen::MatrixXd out = 0.5 * (V + V.transpose()); // scrub roundoff asymmetry
    out.diagonal().array() += lambda;
    return out;
}

std::vector<group_summary> group_summaries(const Eigen::MatrixXd& X,
                                           const std::vector<double>& scores,
                                           const group_assignment& assignment) {
    const Eigen::Index n = X.rows(), d = X.cols();
    if (std::size_t(n) != assignment.group_of.size() || scores.size() != std::size_t(n))
        throw data_error("group_summaries: size mismatch");

    std::vector<group_summary> out(std::size_t(assignment.group_count));
    for (auto& g : out) {
        g.mean = Eigen::VectorXd::Zero(d);
        g.covariance = Eigen::MatrixXd::Zero(d, d);
        g.mean_score = 0.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& g = out[std::size_t(assignment.group_of[std::size_t(i)])];
        g.mean += X.row(i).transpose();
        g.mean_score += scores[std::size_t(i)];
        g.size++;
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        auto& g = out[c];
        if (g.size < 2) throw min_group_size_error(int(c), g.size);
        g.mean /= double(g.size);
        g.mean_score = std::clamp(g.mean_score / double(g.size), 1e-6, 1.0 - 1e-6);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& g = out[std::size_t(assignment.group_of[std::size_t(i)])];
        Eigen::VectorXd dev = X.row(i).transpose() - g.mean;
        g.covariance += dev * dev.transpose();
    }
    for (auto& g : out) {
        g.covariance /= double(g.size - 1);
        g.covariance = regularize_cov(g.covariance);
    }
    return out;
}

} // namespace slr
