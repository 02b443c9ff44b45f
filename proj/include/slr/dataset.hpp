#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "slr/errors.hpp"

namespace slr {

struct dataset {
    Eigen::MatrixXd features; // N x d, file order
    std::vector<int> labels;  // 0/1
    std::vector<std::string> feature_names;
    std::string label_name;
    std::string positive_class; // original class string mapped to 1, empty if numeric

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
};

struct standardized_frame {
    Eigen::MatrixXd features; // z-scored, constant columns all zero
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_stds; // sample std (n-1); 0 recorded for constant columns
    std::vector<bool> constant_columns;
    std::vector<int> labels;

    Eigen::VectorXd labels_real() const;
    // inverse transform of one standardized row back to raw units
    Eigen::VectorXd unstandardize_row(const Eigen::VectorXd& z) const;
};

struct split_spec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

// RFC-4180 CSV with a header row. Labels must be binary after the optional
// positive_class mapping (that class string -> 1, the single other value -> 0).
dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_class = "");

standardized_frame standardize(const dataset& data);

// standardize `raw` using stats already stored in `fit` (train stats applied to validation)
standardized_frame standardize_with(const Eigen::MatrixXd& raw, const std::vector<int>& labels,
                                    const standardized_frame& fit);

// seeded shuffle, prefix/suffix cut at floor(train_fraction * N); both sides are
// re-standardized with the train side's statistics
std::pair<standardized_frame, standardized_frame> split(const standardized_frame& frame,
                                                        const split_spec& spec);

} // namespace slr
