#include "slr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slr {

std::string to_string(grouping_method m) {
    return m == grouping_method::kmeans ? "kmeans" : "quantile";
}

grouping_method grouping_method_from(const std::string& s) {
    if (s == "kmeans") return grouping_method::kmeans;
    if (s == "quantile") return grouping_method::quantile;
    throw config_error("unknown grouping method \"" + s + "\" (expected kmeans or quantile)");
}

namespace {

// decorrelates the per-k streams from each other and from the run seed
constexpr std::uint64_t kSeedStride = 7919;
constexpr std::uint64_t kAnnealOffset = 104729;

metrics_report evaluate(const weight_vector& w, const standardized_frame& frame,
                        double threshold) {
    Eigen::VectorXd s = score(w, frame.features);
    return full_report(frame.labels, std::vector<double>(s.data(), s.data() + s.size()),
                       threshold);
}

} // namespace

sweep_result sweep(const standardized_frame& train, const standardized_frame& validation,
                   grouping_method method, const anneal_schedule& schedule, int max_groups,
                   double threshold, bool select_by_f1) {
    if (max_groups < 1) throw config_error("sweep: max_groups must be >= 1");

    sweep_result out;

    fit_report base = fit_logistic(train.features, train.labels_real());
    if (!base.converged && !std::isfinite(base.final_loss))
        throw solver_error("baseline logistic fit diverged");
    out.baseline_validation = evaluate(base.weights, validation, threshold);
    double base_metric = select_by_f1 ? out.baseline_validation.f1.value
                                      : out.baseline_validation.accuracy.value;

    Eigen::VectorXd train_scores_vec = score(base.weights, train.features);
    std::vector<double> train_scores(train_scores_vec.data(),
                                     train_scores_vec.data() + train_scores_vec.size());

    int best_k = -1;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_groups; ++k) {
        sweep_entry entry;
        entry.k = k;
        std::uint64_t base_seed = schedule.seed + kSeedStride * std::uint64_t(k);
        try {
            group_assignment groups_idx =
                method == grouping_method::kmeans
                    ? kmeans(train.features, k, base_seed)
                    : quantile_bins(train_scores, k);
            auto groups = group_summaries(train.features, train_scores, groups_idx);

            anneal_schedule per_k = schedule;
            per_k.seed = base_seed + kAnnealOffset;
            anneal_result ann = anneal(groups, train.features, train.labels_real(), per_k);
            if (!std::isfinite(ann.best_loss)) {
                entry.skipped = true;
                entry.skip_reason = "no feasible solve at any visited (alpha, beta)";
            } else {
                entry.config = ann.best_config;
                entry.weights = ann.best_weights;
                entry.trace = std::move(ann.trace);
                metrics_report rep = evaluate(entry.weights, validation, threshold);
                entry.accuracy = rep.accuracy;
                entry.f1 = rep.f1;
                entry.precision = rep.precision;
                entry.recall = rep.sensitivity_tpr;

                const metric_value& sel = select_by_f1 ? entry.f1 : entry.accuracy;
                if (sel.defined && sel.value > best_metric) {
                    best_metric = sel.value;
                    best_k = k;
                }
            }
        } catch (const data_error& e) {
            entry.skipped = true;
            entry.skip_reason = e.what();
        } catch (const solver_error& e) {
            entry.skipped = true;
            entry.skip_reason = e.what();
        }
        out.curve.entries.push_back(std::move(entry));
    }

    if (std::all_of(out.curve.entries.begin(), out.curve.entries.end(),
                    [](const sweep_entry& e) { return e.skipped; }))
        throw data_error("sweep: every group count in 1.." + std::to_string(max_groups) +
                         " was skipped; first reason: " + out.curve.entries.front().skip_reason);

    trained_model& model = out.model;
    model.method = method;
    model.threshold = threshold;
    model.baseline_weights = base.weights;
    model.baseline_accuracy = out.baseline_validation.accuracy.value;
    model.column_means = train.column_means;
    model.column_stds = train.column_stds;
    model.constant_columns = train.constant_columns;

    if (best_k > 0 && best_metric > base_metric) {
        const sweep_entry& win = out.curve.entries[std::size_t(best_k - 1)];
        model.weights = win.weights;
        model.config = win.config;
        model.group_count = best_k;
        model.baseline_wins = false;
        model.selection_metric = best_metric;
    } else {
        model.weights = base.weights;
        model.group_count = 0;
        model.baseline_wins = true;
        model.selection_metric = base_metric;
        if (best_k > 0) model.config = out.curve.entries[std::size_t(best_k - 1)].config;
    }
    out.winner_validation = evaluate(model.weights, validation, threshold);
    return out;
}

Eigen::VectorXd predict_scores(const trained_model& model, const Eigen::MatrixXd& X_raw) {
    standardized_frame fit;
    fit.column_means = model.column_means;
    fit.column_stds = model.column_stds;
    fit.constant_columns = model.constant_columns;
    standardized_frame z = standardize_with(X_raw, {}, fit);
    return score(model.weights, z.features);
}

std::vector<int> predict(const trained_model& model, const Eigen::MatrixXd& X_raw,
                         double threshold) {
    Eigen::VectorXd s = predict_scores(model, X_raw);
    std::vector<int> labels(std::size_t(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) labels[std::size_t(i)] = s[i] >= threshold ? 1 : 0;
    return labels;
}

} // namespace slr
