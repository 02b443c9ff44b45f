#include "slr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include "slr/errors.hpp"

namespace slr {

confusion_counts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw data_error("confusion: length mismatch (" +
                                    std::to_string(y_true.size()) + " vs " +
                                    std::to_string(y_pred.size()) + ")");
    if (y_true.empty()) throw data_error("confusion: empty input");
    confusion_counts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw data_error("confusion: non-binary entry at row " + std::to_string(i));
        if (t == 1)
            (p == 1 ? c.tp : c.fn)++;
        else
            (p == 1 ? c.fp : c.tn)++;
    }
    return c;
}

namespace {

metric_value ratio(std::int64_t num, std::int64_t den, const char* den_name) {
    if (den == 0) return metric_value::undefined(std::string(den_name) + " is zero");
    return metric_value::of(double(num) / double(den));
}

} // namespace

metrics_report basic_metrics(const confusion_counts& c) {
    if (c.total() <= 0) throw data_error("basic_metrics: empty counts");
    metrics_report r;
    r.accuracy = ratio(c.tp + c.tn, c.total(), "TP+FP+TN+FN");
    r.sensitivity_tpr = ratio(c.tp, c.tp + c.fn, "TP+FN");
    r.specificity_tnr = ratio(c.tn, c.tn + c.fp, "TN+FP");
    r.precision = ratio(c.tp, c.tp + c.fp, "TP+FP");
    r.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, "2TP+FP+FN");
    r.npv = ratio(c.tn, c.tn + c.fn, "TN+FN");
    r.fpr = ratio(c.fp, c.fp + c.tn, "FP+TN");
    r.fdr = ratio(c.fp, c.fp + c.tp, "FP+TP");
    r.fnr = ratio(c.fn, c.fn + c.tp, "FN+TP");
    r.mcc = mcc(c);
    return r;
}

metric_value mcc(const confusion_counts& c) {
    double f1 = double(c.tp + c.fp), f2 = double(c.tp + c.fn);
    double f3 = double(c.tn + c.fp), f4 = double(c.tn + c.fn);
    if (f1 == 0 || f2 == 0 || f3 == 0 || f4 == 0)
        return metric_value::undefined("a row or column of the confusion matrix is zero");
    double num = double(c.tp) * double(c.tn) - double(c.fp) * double(c.fn);
    return metric_value::of(num / std::sqrt(f1 * f2 * f3 * f4));
}

metric_value roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size() || y_true.empty())
        throw data_error("roc_auc: bad input sizes");
    std::int64_t pos = std::count(y_true.begin(), y_true.end(), 1);
    std::int64_t neg = std::int64_t(y_true.size()) - pos;
    if (pos == 0) return metric_value::undefined("no positive examples");
    if (neg == 0) return metric_value::undefined("no negative examples");

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // rank-sum with average ranks across tie runs
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * double(i + 1 + j + 1); // ranks are 1-based
        for (std::size_t t = i; t <= j; ++t)
            if (y_true[order[t]] == 1) pos_rank_sum += avg_rank;
        i = j + 1;
    }
    double u = pos_rank_sum - double(pos) * double(pos + 1) / 2.0;
    return metric_value::of(u / (double(pos) * double(neg)));
}

metric_value pr_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size() || y_true.empty())
        throw data_error("pr_auc: bad input sizes");
    std::int64_t pos = std::count(y_true.begin(), y_true.end(), 1);
    if (pos == 0) return metric_value::undefined("no positive examples");

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // walk thresholds at each distinct score; area += precision * recall increment
    double area = 0.0;
    std::int64_t tp = 0, fp = 0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t)
            (y_true[order[t]] == 1 ? tp : fp)++;
        double recall = double(tp) / double(pos);
        double precision = double(tp) / double(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return metric_value::of(area);
}

metrics_report full_report(const std::vector<int>& y_true, const std::vector<double>& scores,
                           double threshold) {
    std::vector<int> pred(y_true.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= threshold ? 1 : 0;
    metrics_report r = basic_metrics(confusion(y_true, pred));
    r.roc_auc = roc_auc(y_true, scores);
    r.pr_auc = pr_auc(y_true, scores);
    return r;
}

} // namespace slr
