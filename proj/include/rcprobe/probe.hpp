#ifndef RCPROBE_PROBE_HPP
#define RCPROBE_PROBE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcprobe/backend.hpp"
#include "rcprobe/pair_forge.hpp"

namespace rcprobe::probing {

struct LinearProbe {
    std::vector<double> weights;
    double bias = 0.0;
    int layer = 0;
    backends::Pooling pooling = backends::Pooling::mean;
    std::string backend_id;
    std::uint64_t seed = 0;
    bool converged = false;
    int iterations = 0;
};

struct TrainOptions {
    double l2_strength = 1.0;
    int max_iterations = 1000;
    std::uint64_t seed = 0;
};

// Logistic-regression acceptability probe on pooled sentence vectors.
// Deterministic given inputs and seed; throws ValidationError when all labels
// agree.
LinearProbe train_probe(const std::vector<backends::SentenceVector>& vectors,
                        const std::vector<bool>& labels, const TrainOptions& opts = {});

// w.x + b. Classification is logit > 0 -> acceptable (exact 0 counts as
// unacceptable).
double probe_logit(const LinearProbe& probe, const std::vector<float>& values);
inline bool probe_accepts(const LinearProbe& probe, const std::vector<float>& values) {
    return probe_logit(probe, values) > 0.0;
}

struct ProbeReport {
    backends::BackendInfo backend;
    backends::Pooling pooling = backends::Pooling::mean;
    std::map<int, double> per_layer_accuracy; // test accuracy per layer
    int best_layer = 0;                       // max accuracy, ties -> lowest layer
    std::map<pairs::ModKind, double> per_modification_accuracy; // at best layer
    double baseline_layer0 = 0.0;             // layer-0 baseline, mean-pooled
    std::map<pairs::ModKind, double> baseline_per_modification;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double l2_strength = 1.0;
    int max_iterations = 1000;
    bool features_standardized = false;
    std::map<int, bool> converged_by_layer;
    std::optional<LinearProbe> best_probe; // absent for the rule baseline
};

struct SweepOptions {
    TrainOptions train;
    backends::PoolingOptions pooling_opts;
};

// Trains one probe per layer on the train split, evaluates on the test split,
// and selects the best layer by test accuracy (an optimistic selection; the
// report records it as such). The rule baseline is reported on its single
// pseudo-layer without training. Embeddings are computed once per sentence.
ProbeReport layer_sweep(backends::Backend& backend,
                        const std::vector<pairs::DatasetSample>& train,
                        const std::vector<pairs::DatasetSample>& test, backends::Pooling pooling,
                        const SweepOptions& opts = {});

// Accuracy within each modification subset present among `samples`;
// `predictions[i]` pairs with `samples[i]`.
std::map<pairs::ModKind, double> group_by_modification(
    const std::vector<pairs::DatasetSample>& samples, const std::vector<bool>& predictions);

nlohmann::json probe_to_json(const LinearProbe& probe, const backends::BackendInfo& info);
LinearProbe probe_from_json(const nlohmann::json& j, std::string* backend_name = nullptr);

nlohmann::json report_to_json(const ProbeReport& r);
// CSV rows: backend,layer,pooling,overall,<one column per modification kind>
std::string report_to_csv(const ProbeReport& r);
// Plot data: backend,pooling,layer,accuracy
std::string layer_curve_csv(const ProbeReport& r);

} // namespace rcprobe::probing

#endif
