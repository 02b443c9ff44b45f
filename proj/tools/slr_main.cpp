#include <string>

#include "CLI11.hpp"
#include "slr/cli.hpp"

namespace {

struct flag_overrides {
    std::string data, config_path, method, positive_class, label_column, out;
    std::uint64_t seed = 0;
    int max_groups = 0;
    double threshold = 0.0, train_fraction = 0.0;
};

void add_common_flags(CLI::App* cmd, flag_overrides& f) {
    cmd->add_option("--data", f.data, "dataset CSV path");
    cmd->add_option("--config", f.config_path, "JSON run config; flags override its values");
    cmd->add_option("--method", f.method, "grouping method: kmeans or quantile");
    cmd->add_option("--max-groups", f.max_groups, "largest group count to sweep");
    cmd->add_option("--seed", f.seed, "run seed");
    cmd->add_option("--threshold", f.threshold, "classification threshold");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--label-column", f.label_column, "label column name");
    cmd->add_option("--positive-class", f.positive_class, "label value mapped to class 1");
    cmd->add_option("--train-fraction", f.train_fraction, "fraction of rows used for training");
}

slr::run_config merge(const CLI::App* cmd, const flag_overrides& f) {
    slr::run_config rc;
    if (cmd->count("--config")) rc = slr::load_run_config(f.config_path);
    if (cmd->count("--data")) rc.dataset = f.data;
    if (cmd->count("--method")) rc.method = slr::grouping_method_from(f.method);
    if (cmd->count("--max-groups")) rc.max_groups = f.max_groups;
    if (cmd->count("--seed")) rc.seed = f.seed;
    if (cmd->count("--threshold")) rc.threshold = f.threshold;
    if (cmd->count("--out")) rc.out = f.out;
    if (cmd->count("--label-column")) rc.label_column = f.label_column;
    if (cmd->count("--positive-class")) rc.positive_class = f.positive_class;
    if (cmd->count("--train-fraction")) rc.train_fraction = f.train_fraction;
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic logistic regression over group summaries"};
    app.require_subcommand(1);

    flag_overrides train_f, compare_f;
    CLI::App* train = app.add_subcommand("train", "fit on one split and write model artifacts");
    add_common_flags(train, train_f);

    CLI::App* compare = app.add_subcommand("compare", "repeat split+train and aggregate metrics");
    add_common_flags(compare, compare_f);
    int executions = 1;
    compare->add_option("--executions", executions, "number of repeated runs (seed, seed+1, ...)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a dataset with a saved model");
    std::string model_path, eval_data, eval_out = ".";
    double eval_threshold = -1.0; // negative means: use the model's stored threshold
    evaluate->add_option("--model", model_path, "model.json produced by train")->required();
    evaluate->add_option("--data", eval_data, "dataset CSV path")->required();
    evaluate->add_option("--threshold", eval_threshold, "classification threshold");
    evaluate->add_option("--out", eval_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return slr::exit_config_error;
    }

    try {
        if (train->parsed()) return slr::cmd_train(merge(train, train_f));
        if (compare->parsed()) return slr::cmd_compare(merge(compare, compare_f), executions);
        return slr::cmd_evaluate(model_path, eval_data, eval_threshold, eval_out);
    } catch (const slr::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return slr::exit_config_error;
    }
}
