#pragma once

#include <optional>
#include <string>

#include "slr/annealer.hpp"
#include "slr/trainer.hpp"

namespace slr {

// exit codes, stable and documented in the README
inline constexpr int exit_ok = 0;
inline constexpr int exit_unexpected = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_data_error = 3;
inline constexpr int exit_solver_error = 4;

struct run_config {
    std::string dataset;
    std::string label_column;
    std::string positive_class;
    grouping_method method = grouping_method::kmeans;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    int max_groups = 10;
    double threshold = 0.5;
    std::string out = ".";
    bool write_anneal_trace = false;
    anneal_schedule schedule;
};

// parse a JSON config file; unknown keys are rejected by name
run_config load_run_config(const std::string& path);

int cmd_train(const run_config& config);
int cmd_evaluate(const std::string& model_path, const std::string& dataset_path,
                 double threshold, const std::string& out_dir);
int cmd_compare(const run_config& config, int executions);

} // namespace slr
