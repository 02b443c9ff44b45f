#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace slr {

struct confusion_counts {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::int64_t total() const { return tp + fp + tn + fn; }
};

// a metric that may be undefined (zero denominator etc.); undefined carries the reason
struct metric_value {
    double value = 0.0;
    bool defined = false;
    std::string reason; // set iff !defined

    static metric_value of(double v) { return {v, true, {}}; }
    static metric_value undefined(std::string why) { return {0.0, false, std::move(why)}; }
};

struct metrics_report {
    metric_value accuracy, sensitivity_tpr, specificity_tnr, precision, f1;
    metric_value npv, fpr, fdr, fnr, mcc, roc_auc, pr_auc;
};

confusion_counts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// fills everything except mcc/roc_auc/pr_auc
metrics_report basic_metrics(const confusion_counts& c);

metric_value mcc(const confusion_counts& c);

// Mann-Whitney with average ranks for ties
metric_value roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

// step-wise area over score thresholds, no interpolation
metric_value pr_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

// everything at once: confusion-based metrics at the given threshold plus rank metrics
metrics_report full_report(const std::vector<int>& y_true, const std::vector<double>& scores,
                           double threshold = 0.5);

} // namespace slr
