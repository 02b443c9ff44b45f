#pragma once

#include <string>

#include "slr/metrics.hpp"
#include "slr/trainer.hpp"

namespace slr {

struct model_metadata {
    std::uint64_t seed = 0;
    std::string dataset;
    double train_fraction = 0.0;
    std::string timestamp; // excluded from determinism comparisons
};

std::string model_to_json(const trained_model& model, const model_metadata& meta);
trained_model model_from_json(const std::string& json_text, model_metadata* meta = nullptr);

void save_model(const std::string& path, const trained_model& model, const model_metadata& meta);
trained_model load_model(const std::string& path, model_metadata* meta = nullptr);

// columns: k,alpha,beta,accuracy,f1,precision,recall,skipped,reason
std::string sweep_to_csv(const sweep_curve& curve);
void save_sweep(const std::string& path, const sweep_curve& curve);

std::string anneal_trace_to_csv(const std::vector<anneal_trace_entry>& trace);

// metric values serialize as numbers, undefined ones as {"undefined": reason}
std::string metrics_to_json(const metrics_report& report);

} // namespace slr
