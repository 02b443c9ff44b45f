#include "slr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "slr/model_io.hpp"

namespace slr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// SLR_LOG: quiet < info (default) < debug
int log_level() {
    const char* v = std::getenv("SLR_LOG");
    if (!v) return 1;
    std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[slr] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[slr] " << msg << "\n";
}

std::string timestamp_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_text(const fs::path& path, const std::string& body) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open \"" + tmp.string() + "\" for writing");
        out << body;
        if (!out) throw data_error("short write to \"" + tmp.string() + "\"");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw data_error("cannot move \"" + tmp.string() + "\" into place: " + ec.message());
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw config_error("unknown " + where + " key \"" + item.key() + "\"");
}

void validate_run(const run_config& c) {
    if (c.dataset.empty()) throw config_error("dataset path is required");
    if (c.label_column.empty()) throw config_error("label_column is required");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
        throw config_error("train_fraction must lie in (0,1)");
    if (c.max_groups < 1) throw config_error("max_groups must be >= 1");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0))
        throw config_error("threshold must lie in [0,1]");
    const anneal_schedule& s = c.schedule;
    if (!(s.initial_temp > 0.0)) throw config_error("anneal.initial_temp must be > 0");
    if (!(s.cooling > 0.0 && s.cooling < 1.0)) throw config_error("anneal.cooling must lie in (0,1)");
    if (s.steps_per_temp < 1) throw config_error("anneal.steps_per_temp must be >= 1");
    if (!(s.min_temp > 0.0)) throw config_error("anneal.min_temp must be > 0");
    if (s.max_evals < 1) throw config_error("anneal.max_evals must be >= 1");
    if (s.step_alpha < 0.0 || s.step_beta < 0.0)
        throw config_error("anneal step sizes must be >= 0");
    if (s.initial.alpha < 0.0) throw config_error("anneal.initial_alpha must be >= 0");
    if (!(s.initial.beta > 0.0 && s.initial.beta < 1.0))
        throw config_error("anneal.initial_beta must lie in (0,1)");
}

metrics_report rescore(const weight_vector& w, const standardized_frame& frame,
                       double threshold) {
    Eigen::VectorXd s = score(w, frame.features);
    return full_report(frame.labels, std::vector<double>(s.data(), s.data() + s.size()),
                       threshold);
}

json metrics_json(const metrics_report& r) { return json::parse(metrics_to_json(r)); }

// best non-skipped sweep entry by validation accuracy, ties to the smaller k; -1 if none
int best_slr_entry(const sweep_curve& curve) {
    int best = -1;
    double best_acc = -1.0;
    for (std::size_t i = 0; i < curve.entries.size(); ++i) {
        const auto& e = curve.entries[i];
        if (e.skipped || !e.accuracy.defined) continue;
        if (e.accuracy.value > best_acc) {
            best_acc = e.accuracy.value;
            best = int(i);
        }
    }
    return best;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data_error;
    } catch (const solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return exit_solver_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_unexpected;
    }
}

} // namespace

run_config load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file \"" + path + "\"");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error("config file \"" + path + "\" is not valid JSON: " + e.what());
    }

    static const std::set<std::string> top_keys = {
        "dataset",    "label_column", "positive_class", "method", "train_fraction",
        "seed",       "max_groups",   "threshold",      "out",    "write_anneal_trace",
        "anneal"};
    static const std::set<std::string> anneal_keys = {
        "initial_temp", "cooling",   "steps_per_temp", "min_temp",     "max_evals",
        "step_alpha",   "step_beta", "initial_alpha",  "initial_beta"};
    reject_unknown(j, top_keys, "config");

    run_config c;
    try {
        if (j.contains("dataset")) c.dataset = j["dataset"].get<std::string>();
        if (j.contains("label_column")) c.label_column = j["label_column"].get<std::string>();
        if (j.contains("positive_class")) c.positive_class = j["positive_class"].get<std::string>();
        if (j.contains("method")) c.method = grouping_method_from(j["method"].get<std::string>());
        if (j.contains("train_fraction")) c.train_fraction = j["train_fraction"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("max_groups")) c.max_groups = j["max_groups"].get<int>();
        if (j.contains("threshold")) c.threshold = j["threshold"].get<double>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("write_anneal_trace"))
            c.write_anneal_trace = j["write_anneal_trace"].get<bool>();
        if (j.contains("anneal")) {
            const json& a = j["anneal"];
            reject_unknown(a, anneal_keys, "config anneal");
            if (a.contains("initial_temp")) c.schedule.initial_temp = a["initial_temp"].get<double>();
            if (a.contains("cooling")) c.schedule.cooling = a["cooling"].get<double>();
            if (a.contains("steps_per_temp")) c.schedule.steps_per_temp = a["steps_per_temp"].get<int>();
            if (a.contains("min_temp")) c.schedule.min_temp = a["min_temp"].get<double>();
            if (a.contains("max_evals")) c.schedule.max_evals = a["max_evals"].get<int>();
            if (a.contains("step_alpha")) c.schedule.step_alpha = a["step_alpha"].get<double>();
            if (a.contains("step_beta")) c.schedule.step_beta = a["step_beta"].get<double>();
            if (a.contains("initial_alpha")) c.schedule.initial.alpha = a["initial_alpha"].get<double>();
            if (a.contains("initial_beta")) c.schedule.initial.beta = a["initial_beta"].get<double>();
        }
    } catch (const json::exception& e) {
        throw config_error("config file \"" + path + "\" has a wrongly typed value: " +
                           std::string(e.what()));
    }
    return c;
}

int cmd_train(const run_config& config) {
    return run_guarded([&]() {
        validate_run(config);
        dataset data = load_csv(config.dataset, config.label_column, config.positive_class);
        log_info("loaded " + std::to_string(data.rows()) + " rows, " +
                 std::to_string(data.cols()) + " features from " + config.dataset);

        standardized_frame frame = standardize(data);
        auto [train, validation] = split(frame, {config.train_fraction, config.seed});
        log_debug("split: " + std::to_string(train.features.rows()) + " train / " +
                  std::to_string(validation.features.rows()) + " validation rows");

        anneal_schedule sched = config.schedule;
        sched.seed = config.seed;
        sweep_result result =
            sweep(train, validation, config.method, sched, config.max_groups, config.threshold);

        result.model.feature_names = data.feature_names;
        result.model.label_name = data.label_name;
        result.model.positive_class = data.positive_class;

        fs::path outdir(config.out);
        fs::create_directories(outdir);
        model_metadata meta{config.seed, config.dataset, config.train_fraction, timestamp_now()};
        save_model((outdir / "model.json").string(), result.model, meta);
        save_sweep((outdir / "sweep.csv").string(), result.curve);

        json report;
        report["baseline"] = metrics_json(result.baseline_validation);
        report["winner"] = metrics_json(result.winner_validation);
        report["selection"] = {{"baseline_wins", result.model.baseline_wins},
                               {"k", result.model.group_count},
                               {"alpha", result.model.config.alpha},
                               {"beta", result.model.config.beta},
                               {"method", to_string(result.model.method)},
                               {"validation_accuracy", result.model.selection_metric}};
        report["sweep_curve"] = "sweep.csv";
        report["metadata"] = {{"dataset", meta.dataset},
                              {"seed", meta.seed},
                              {"train_fraction", meta.train_fraction},
                              {"timestamp", meta.timestamp}};
        write_text(outdir / "report.json", report.dump(2) + "\n");

        if (config.write_anneal_trace) {
            int idx = best_slr_entry(result.curve);
            std::vector<anneal_trace_entry> trace;
            if (idx >= 0) trace = result.curve.entries[std::size_t(idx)].trace;
            write_text(outdir / "anneal_trace.csv", anneal_trace_to_csv(trace));
        }

        std::ostringstream line;
        if (result.model.baseline_wins)
            line << "winner: baseline logistic regression, validation accuracy "
                 << result.model.selection_metric;
        else
            line << "winner: slr k=" << result.model.group_count << " alpha="
                 << result.model.config.alpha << " beta=" << result.model.config.beta
                 << ", validation accuracy " << result.model.selection_metric << " (baseline "
                 << result.model.baseline_accuracy << ")";
        std::cout << line.str() << "\n";
        log_info("wrote model.json, sweep.csv, report.json to " + outdir.string());
        return exit_ok;
    });
}

int cmd_evaluate(const std::string& model_path, const std::string& dataset_path,
                 double threshold, const std::string& out_dir) {
    return run_guarded([&]() {
        model_metadata meta;
        trained_model model = load_model(model_path, &meta);
        dataset data = load_csv(dataset_path, model.label_name, model.positive_class);

        if (data.feature_names != model.feature_names) {
            std::ostringstream msg;
            msg << "dataset columns do not match the model's.";
            for (const auto& n : model.feature_names)
                if (std::find(data.feature_names.begin(), data.feature_names.end(), n) ==
                    data.feature_names.end())
                    msg << " missing: \"" << n << "\".";
            for (const auto& n : data.feature_names)
                if (std::find(model.feature_names.begin(), model.feature_names.end(), n) ==
                    model.feature_names.end())
                    msg << " unexpected: \"" << n << "\".";
            msg << " expected order: ";
            for (std::size_t i = 0; i < model.feature_names.size(); ++i)
                msg << (i ? ", " : "") << model.feature_names[i];
            throw data_error(msg.str());
        }

        double th = threshold >= 0.0 ? threshold : model.threshold;
        Eigen::VectorXd s = predict_scores(model, data.features);
        metrics_report rep = full_report(
            data.labels, std::vector<double>(s.data(), s.data() + s.size()), th);

        std::string body = metrics_to_json(rep);
        std::cout << body;
        fs::path outdir(out_dir);
        fs::create_directories(outdir);
        json j = json::parse(body);
        j["metadata"] = {{"model", model_path},
                         {"dataset", dataset_path},
                         {"threshold", th},
                         {"timestamp", timestamp_now()}};
        write_text(outdir / "report.json", j.dump(2) + "\n");
        return exit_ok;
    });
}

namespace {

// the Table-2 comparison columns, pulled out of a full report
struct compare_row {
    metric_value mcc, f1, accuracy, tpr, tnr, pr_auc, roc_auc;
};

compare_row to_row(const metrics_report& r) {
    return {r.mcc, r.f1, r.accuracy, r.sensitivity_tpr, r.specificity_tnr, r.pr_auc, r.roc_auc};
}

json row_json(const compare_row& r) {
    auto cell = [](const metric_value& m) {
        return m.defined ? json(m.value) : json{{"undefined", m.reason}};
    };
    return {{"mcc", cell(r.mcc)},       {"f1", cell(r.f1)},
            {"accuracy", cell(r.accuracy)}, {"tpr", cell(r.tpr)},
            {"tnr", cell(r.tnr)},       {"pr_auc", cell(r.pr_auc)},
            {"roc_auc", cell(r.roc_auc)}};
}

json mean_json(const std::vector<compare_row>& rows) {
    auto mean_of = [&](const metric_value compare_row::*field) -> json {
        double sum = 0.0;
        for (const auto& r : rows) {
            const metric_value& m = r.*field;
            if (!m.defined) return json{{"undefined", m.reason + " in one or more executions"}};
            sum += m.value;
        }
        return json(sum / double(rows.size()));
    };
    return {{"mcc", mean_of(&compare_row::mcc)},
            {"f1", mean_of(&compare_row::f1)},
            {"accuracy", mean_of(&compare_row::accuracy)},
            {"tpr", mean_of(&compare_row::tpr)},
            {"tnr", mean_of(&compare_row::tnr)},
            {"pr_auc", mean_of(&compare_row::pr_auc)},
            {"roc_auc", mean_of(&compare_row::roc_auc)}};
}

void print_table(const std::string& name, const json& means) {
    auto cell = [&](const char* key) {
        if (means[key].is_number()) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%8.3f", means[key].get<double>());
            return std::string(buf);
        }
        return std::string("       -");
    };
    std::printf("%-10s%s%s%s%s%s%s%s\n", name.c_str(), cell("mcc").c_str(), cell("f1").c_str(),
                cell("accuracy").c_str(), cell("tpr").c_str(), cell("tnr").c_str(),
                cell("pr_auc").c_str(), cell("roc_auc").c_str());
}

} // namespace

int cmd_compare(const run_config& config, int executions) {
    return run_guarded([&]() {
        validate_run(config);
        if (executions < 1) throw config_error("executions must be >= 1");

        dataset data = load_csv(config.dataset, config.label_column, config.positive_class);
        standardized_frame frame = standardize(data);

        std::vector<compare_row> baseline_rows, slr_rows;
        json per_exec = json::array();
        for (int i = 0; i < executions; ++i) {
            std::uint64_t seed_i = config.seed + std::uint64_t(i);
            auto [train, validation] = split(frame, {config.train_fraction, seed_i});
            anneal_schedule sched = config.schedule;
            sched.seed = seed_i;
            sweep_result result = sweep(train, validation, config.method, sched,
                                        config.max_groups, config.threshold);

            int idx = best_slr_entry(result.curve);
            if (idx < 0)
                throw solver_error("execution " + std::to_string(i) +
                                   ": no grouped model solved at any k");
            const sweep_entry& best = result.curve.entries[std::size_t(idx)];
            metrics_report slr_rep = rescore(best.weights, validation, config.threshold);

            baseline_rows.push_back(to_row(result.baseline_validation));
            slr_rows.push_back(to_row(slr_rep));
            per_exec.push_back({{"seed", seed_i},
                                {"baseline", row_json(baseline_rows.back())},
                                {"slr", row_json(slr_rows.back())},
                                {"k", best.k},
                                {"alpha", best.config.alpha},
                                {"beta", best.config.beta},
                                {"slr_beats_baseline", !result.model.baseline_wins}});
            log_info("execution " + std::to_string(i + 1) + "/" + std::to_string(executions) +
                     " done (seed " + std::to_string(seed_i) + ")");
        }

        json report;
        report["executions"] = executions;
        report["method"] = to_string(config.method);
        report["protocol"] = "each execution re-splits with seed+i and retrains from scratch";
        report["per_execution"] = per_exec;
        report["means"] = {{"baseline", mean_json(baseline_rows)}, {"slr", mean_json(slr_rows)}};
        report["metadata"] = {{"dataset", config.dataset},
                              {"seed", config.seed},
                              {"train_fraction", config.train_fraction},
                              {"timestamp", timestamp_now()}};

        fs::path outdir(config.out);
        fs::create_directories(outdir);
        write_text(outdir / "report.json", report.dump(2) + "\n");

        std::printf("%-10s%8s%8s%8s%8s%8s%8s%8s\n", "method", "mcc", "f1", "acc", "tpr", "tnr",
                    "pr_auc", "roc_auc");
        print_table("baseline", report["means"]["baseline"]);
        print_table("slr", report["means"]["slr"]);
        return exit_ok;
    });
}

} // namespace slr
