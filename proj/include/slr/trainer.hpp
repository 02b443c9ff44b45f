#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slr/annealer.hpp"
#include "slr/dataset.hpp"
#include "slr/metrics.hpp"
#include "slr/solver.hpp"

namespace slr {

enum class grouping_method { kmeans, quantile };

std::string to_string(grouping_method m);
grouping_method grouping_method_from(const std::string& s);

struct trained_model {
    weight_vector weights; // the selected model's weights (baseline's when it wins)
    chance_config config;  // winning SLR (alpha, beta), kept even when baseline wins
    grouping_method method = grouping_method::kmeans;
    int group_count = 0;
    bool baseline_wins = false;
    double selection_metric = 0.0; // validation accuracy that won
    double baseline_accuracy = 0.0;
    weight_vector baseline_weights;
    // standardization carried with the model so raw rows can be scored later
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_stds;
    std::vector<bool> constant_columns;
    std::vector<std::string> feature_names;
    std::string label_name;
    std::string positive_class;
    double threshold = 0.5;
};

struct sweep_entry {
    int k = 0;
    bool skipped = false;
    std::string skip_reason;
    chance_config config;
    metric_value accuracy, f1, precision, recall;
    std::vector<anneal_trace_entry> trace; // kept for optional diagnostics export
    weight_vector weights;
};

struct sweep_curve {
    std::vector<sweep_entry> entries; // one per attempted k = 1..max_groups
};

struct sweep_result {
    trained_model model;
    sweep_curve curve;
    metrics_report baseline_validation;
    metrics_report winner_validation;
};

// fit baseline, score train rows, then for k = 1..max_groups: group, summarize, anneal,
// record validation metrics. Winner = highest validation accuracy (ties -> smaller k)
// if it beats the baseline, else the baseline with a flag.
sweep_result sweep(const standardized_frame& train, const standardized_frame& validation,
                   grouping_method method, const anneal_schedule& schedule, int max_groups,
                   double threshold = 0.5, bool select_by_f1 = false);

std::vector<int> predict(const trained_model& model, const Eigen::MatrixXd& X_raw,
                         double threshold);

Eigen::VectorXd predict_scores(const trained_model& model, const Eigen::MatrixXd& X_raw);

} // namespace slr
