#include "slr/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "slr/errors.hpp"

namespace slr {

namespace {

using nlohmann::json;

// fixed formatting keeps repeated runs byte-identical
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

void write_file(const std::string& path, const std::string& body) {
    // stage + rename so readers never see a half-written file
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open \"" + tmp + "\" for writing");
        out << body;
        if (!out) throw data_error("short write to \"" + tmp + "\"");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw data_error("cannot move \"" + tmp + "\" into place: " + ec.message());
}

json vec_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
    Eigen::VectorXd v(Eigen::Index(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[Eigen::Index(i)] = arr[i].get<double>();
    return v;
}

json metric_to_json(const metric_value& m) {
    if (m.defined) return json(m.value);
    return json{{"undefined", m.reason}};
}

} // namespace

std::string model_to_json(const trained_model& model, const model_metadata& meta) {
    json j;
    j["metadata"] = {{"dataset", meta.dataset},
                     {"seed", meta.seed},
                     {"train_fraction", meta.train_fraction},
                     {"timestamp", meta.timestamp}};
    json m;
    m["intercept"] = model.weights.intercept;
    m["coefficients"] = vec_to_json(model.weights.coefficients);
    m["alpha"] = model.config.alpha;
    m["beta"] = model.config.beta;
    m["method"] = to_string(model.method);
    m["group_count"] = model.group_count;
    m["baseline_wins"] = model.baseline_wins;
    m["selection_metric"] = model.selection_metric;
    m["threshold"] = model.threshold;
    m["baseline"] = {{"intercept", model.baseline_weights.intercept},
                     {"coefficients", vec_to_json(model.baseline_weights.coefficients)},
                     {"accuracy", model.baseline_accuracy}};
    json consts = json::array();
    for (bool b : model.constant_columns) consts.push_back(b);
    m["standardization"] = {{"means", vec_to_json(model.column_means)},
                            {"stds", vec_to_json(model.column_stds)},
                            {"constant_columns", consts}};
    m["features"] = model.feature_names;
    m["label"] = model.label_name;
    m["positive_class"] = model.positive_class;
    j["model"] = m;
    return j.dump(2) + "\n";
}

trained_model model_from_json(const std::string& json_text, model_metadata* meta) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw data_error(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        trained_model model;
        const json& m = j.at("model");
        model.weights.intercept = m.at("intercept").get<double>();
        model.weights.coefficients = vec_from_json(m.at("coefficients"));
        model.config.alpha = m.at("alpha").get<double>();
        model.config.beta = m.at("beta").get<double>();
        model.method = grouping_method_from(m.at("method").get<std::string>());
        model.group_count = m.at("group_count").get<int>();
        model.baseline_wins = m.at("baseline_wins").get<bool>();
        model.selection_metric = m.at("selection_metric").get<double>();
        model.threshold = m.at("threshold").get<double>();
        const json& b = m.at("baseline");
        model.baseline_weights.intercept = b.at("intercept").get<double>();
        model.baseline_weights.coefficients = vec_from_json(b.at("coefficients"));
        model.baseline_accuracy = b.at("accuracy").get<double>();
        const json& st = m.at("standardization");
        model.column_means = vec_from_json(st.at("means"));
        model.column_stds = vec_from_json(st.at("stds"));
        model.constant_columns.clear();
        for (const auto& v : st.at("constant_columns")) model.constant_columns.push_back(v.get<bool>());
        model.feature_names = m.at("features").get<std::vector<std::string>>();
        model.label_name = m.at("label").get<std::string>();
        model.positive_class = m.at("positive_class").get<std::string>();
        if (meta) {
            const json& md = j.at("metadata");
            meta->dataset = md.at("dataset").get<std::string>();
            meta->seed = md.at("seed").get<std::uint64_t>();
            meta->train_fraction = md.at("train_fraction").get<double>();
            meta->timestamp = md.at("timestamp").get<std::string>();
        }
        return model;
    } catch (const json::exception& e) {
        throw data_error(std::string("model file is missing fields: ") + e.what());
    }
}

void save_model(const std::string& path, const trained_model& model,
                const model_metadata& meta) {
    write_file(path, model_to_json(model, meta));
}

trained_model load_model(const std::string& path, model_metadata* meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open model file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str(), meta);
}

std::string sweep_to_csv(const sweep_curve& curve) {
    std::string out = "k,alpha,beta,accuracy,f1,precision,recall,skipped,reason\n";
    auto cell = [](const metric_value& m) { return m.defined ? fmt(m.value) : std::string(); };
    for (const auto& e : curve.entries) {
        out += std::to_string(e.k);
        if (e.skipped) {
            out += ",,,,,,,1," + csv_escape(e.skip_reason);
        } else {
            out += ',' + fmt(e.config.alpha) + ',' + fmt(e.config.beta);
            out += ',' + cell(e.accuracy) + ',' + cell(e.f1);
            out += ',' + cell(e.precision) + ',' + cell(e.recall);
            out += ",0,";
        }
        out += '\n';
    }
    return out;
}

void save_sweep(const std::string& path, const sweep_curve& curve) {
    write_file(path, sweep_to_csv(curve));
}

std::string anneal_trace_to_csv(const std::vector<anneal_trace_entry>& trace) {
    std::string out = "eval,alpha,beta,loss,accepted,temperature\n";
    for (const auto& t : trace) {
        out += std::to_string(t.eval);
        out += ',' + fmt(t.config.alpha) + ',' + fmt(t.config.beta) + ',' + fmt(t.loss);
        out += t.accepted ? ",1," : ",0,";
        out += fmt(t.temperature);
        out += '\n';
    }
    return out;
}

std::string metrics_to_json(const metrics_report& r) {
    json j;
    j["accuracy"] = metric_to_json(r.accuracy);
    j["sensitivity_tpr"] = metric_to_json(r.sensitivity_tpr);
    j["specificity_tnr"] = metric_to_json(r.specificity_tnr);
    j["precision"] = metric_to_json(r.precision);
    j["f1"] = metric_to_json(r.f1);
    j["npv"] = metric_to_json(r.npv);
    j["fpr"] = metric_to_json(r.fpr);
    j["fdr"] = metric_to_json(r.fdr);
    j["fnr"] = metric_to_json(r.fnr);
    j["mcc"] = metric_to_json(r.mcc);
    j["roc_auc"] = metric_to_json(r.roc_auc);
    j["pr_auc"] = metric_to_json(r.pr_auc);
    return j.dump(2) + "\n";
}

} // namespace slr
