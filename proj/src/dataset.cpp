#include "slr/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace slr {

namespace {

// RFC-4180: quoted fields may contain commas, escaped quotes ("") and newlines
std::vector<std::vector<std::string>> parse_csv(std::istream& in, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    int c;
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
    };
    while ((c = in.get()) != EOF) {
        char ch = char(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field.push_back(ch); // stray quote inside unquoted field, keep literal
                }
                break;
            case ',': end_field(); field_started = false; break;
            case '\r':
                if (in.peek() == '\n') in.get();
                end_row();
                break;
            case '\n': end_row(); break;
            default: field.push_back(ch); field_started = true; break;
        }
    }
    if (in_quotes) throw data_error(path + ": unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

double parse_number(const std::string& s, std::size_t row, const std::string& column,
                    const std::string& path) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    // reject trailing garbage and empty cells; allow surrounding spaces
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v))
        throw data_error(path + ": non-numeric cell \"" + s + "\" at data row " +
                         std::to_string(row) + ", column \"" + column + "\"");
    return v;
}

} // namespace

dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_class) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw data_error("cannot open dataset file: " + path);

    auto rows = parse_csv(file, path);
    if (rows.size() < 2) throw data_error(path + ": need a header row and at least one data row");

    const auto& header = rows.front();
    std::ptrdiff_t label_idx = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_column) {
            if (label_idx >= 0)
                throw data_error(path + ": duplicate label column \"" + label_column + "\"");
            label_idx = std::ptrdiff_t(j);
        }
    }
    if (label_idx < 0)
        throw data_error(path + ": label column \"" + label_column + "\" not found");

    dataset out;
    out.label_name = label_column;
    out.positive_class = positive_class;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (std::ptrdiff_t(j) != label_idx) out.feature_names.push_back(header[j]);

    const std::size_t n = rows.size() - 1;
    const std::size_t d = header.size() - 1;
    if (d < 1) throw data_error(path + ": no feature columns besides the label");
    out.features.resize(Eigen::Index(n), Eigen::Index(d));
    out.labels.resize(n);

    std::vector<std::string> raw_labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i + 1];
        if (r.size() != header.size())
            throw data_error(path + ": data row " + std::to_string(i + 1) + " has " +
                             std::to_string(r.size()) + " cells, header has " +
                             std::to_string(header.size()));
        std::size_t jj = 0;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (std::ptrdiff_t(j) == label_idx) {
                raw_labels[i] = r[j];
            } else {
                if (r[j].empty())
                    throw data_error(path + ": missing value at data row " + std::to_string(i + 1) +
                                     ", column \"" + header[j] + "\"");
                out.features(Eigen::Index(i), Eigen::Index(jj)) =
                    parse_number(r[j], i + 1, header[j], path);
                ++jj;
            }
        }
    }

    if (!positive_class.empty()) {
        std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
        if (!distinct.count(positive_class))
            throw data_error(path + ": positive class \"" + positive_class +
                             "\" never appears in column \"" + label_column + "\"");
        if (distinct.size() != 2) {
            std::string seen;
            for (const auto& s : distinct) seen += (seen.empty() ? "" : ", ") + s;
            throw data_error(path + ": label column must have exactly 2 distinct values, saw {" +
                             seen + "}");
        }
        for (std::size_t i = 0; i < n; ++i) out.labels[i] = raw_labels[i] == positive_class ? 1 : 0;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double v = parse_number(raw_labels[i], i + 1, label_column, path);
            if (v != 0.0 && v != 1.0)
                throw data_error(path + ": non-binary label \"" + raw_labels[i] +
                                 "\" at data row " + std::to_string(i + 1) +
                                 " (provide positive_class to map class strings)");
            out.labels[i] = int(v);
        }
    }
    return out;
}

Eigen::VectorXd standardized_frame::labels_real() const {
    Eigen::VectorXd y(Eigen::Index(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y[Eigen::Index(i)] = labels[i];
    return y;
}

Eigen::VectorXd standardized_frame::unstandardize_row(const Eigen::VectorXd& z) const {
    Eigen::VectorXd raw(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j)
        raw[j] = constant_columns[std::size_t(j)] ? column_means[j]
                                                  : z[j] * column_stds[j] + column_means[j];
    return raw;
}

namespace {

standardized_frame standardize_matrix(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    const Eigen::Index n = X.rows(), d = X.cols();
    standardized_frame f;
    f.labels = labels;
    f.column_means = X.colwise().mean();
    f.column_stds.resize(d);
    f.constant_columns.assign(std::size_t(d), false);
    f.features.resize(n, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double var = (X.col(j).array() - f.column_means[j]).square().sum() / double(n - 1);
        double sd = std::sqrt(var);
        if (sd <= 0.0) {
            f.constant_columns[std::size_t(j)] = true;
            f.column_stds[j] = 0.0;
            f.features.col(j).setZero();
        } else {
            f.column_stds[j] = sd;
            f.features.col(j) = (X.col(j).array() - f.column_means[j]) / sd;
        }
    }
    return f;
}

} // namespace

standardized_frame standardize(const dataset& data) {
    if (data.rows() < 2) throw data_error("standardize: need at least 2 rows");
    return standardize_matrix(data.features, data.labels);
}

standardized_frame standardize_with(const Eigen::MatrixXd& raw, const std::vector<int>& labels,
                                    const standardized_frame& fit) {
    if (raw.cols() != fit.column_means.size())
        throw data_error("standardize_with: column count mismatch");
    standardized_frame f;
    f.labels = labels;
    f.column_means = fit.column_means;
    f.column_stds = fit.column_stds;
    f.constant_columns = fit.constant_columns;
    f.features.resize(raw.rows(), raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        if (fit.constant_columns[std::size_t(j)])
            f.features.col(j).setZero();
        else
            f.features.col(j) = (raw.col(j).array() - fit.column_means[j]) / fit.column_stds[j];
    }
    return f;
}

std::pair<standardized_frame, standardized_frame> split(const standardized_frame& frame,
                                                        const split_spec& spec) {
    const Eigen::Index n = frame.features.rows();
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw config_error("train_fraction must lie strictly inside (0,1)");
    const Eigen::Index n_train = Eigen::Index(std::floor(spec.train_fraction * double(n)));
    if (n_train < 2 || n - n_train < 1)
        throw data_error("split: train_fraction " + std::to_string(spec.train_fraction) +
                         " leaves a degenerate side for N=" + std::to_string(n));

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(spec.seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    // recover raw values, cut, then re-standardize with train statistics only
    Eigen::MatrixXd raw_train(n_train, frame.features.cols());
    Eigen::MatrixXd raw_val(n - n_train, frame.features.cols());
    std::vector<int> y_train(static_cast<std::size_t>(n_train));
    std::vector<int> y_val(static_cast<std::size_t>(n - n_train));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd raw = frame.unstandardize_row(frame.features.row(idx[std::size_t(i)]));
        if (i < n_train) {
            raw_train.row(i) = raw;
            y_train[std::size_t(i)] = frame.labels[std::size_t(idx[std::size_t(i)])];
        } else {
            raw_val.row(i - n_train) = raw;
            y_val[std::size_t(i - n_train)] = frame.labels[std::size_t(idx[std::size_t(i)])];
        }
    }
    auto one_class = [](const std::vector<int>& y) {
        return std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); });
    };
    if (one_class(y_train) || one_class(y_val))
        throw data_error("split: a side contains a single label class; choose another seed "
                         "or fraction");

    standardized_frame train = standardize_matrix(raw_train, y_train);
    standardized_frame validation = standardize_with(raw_val, y_val, train);
    return {std::move(train), std::move(validation)};
}

} // namespace slr
