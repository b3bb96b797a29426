#include "rcprobe/probe.hpp"

#include <Eigen/Core>

#include "rcprobe/error.hpp"
#include "rcprobe/logreg.hpp"
#include "rcprobe/mock_backend.hpp"

namespace rcprobe::probing {

using backends::Backend;
using backends::LayerEmbeddings;
using backends::Pooling;
using backends::SentenceVector;
using pairs::DatasetSample;
using pairs::ModKind;

LinearProbe train_probe(const std::vector<SentenceVector>& vectors, const std::vector<bool>& labels,
                        const TrainOptions& opts) {
    if (vectors.size() != labels.size()) throw ValidationError("vector/label count mismatch");
    if (vectors.empty()) throw ValidationError("cannot train on an empty set");
    Eigen::Index n = static_cast<Eigen::Index>(vectors.size());
    Eigen::Index d = static_cast<Eigen::Index>(vectors[0].values.size());
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(vectors[i].values.size()) != d) {
            throw ValidationError("inconsistent feature dimensions");
        }
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = vectors[i].values[j];
        y[i] = labels[i] ? 1.0 : 0.0;
    }
    LogRegOptions lro;
    lro.l2_strength = opts.l2_strength;
    lro.max_iterations = opts.max_iterations;
    LogRegResult fit = fit_logistic_regression(X, y, lro);

    LinearProbe probe;
    probe.weights.assign(fit.weights.data(), fit.weights.data() + fit.weights.size());
    probe.bias = fit.bias;
    probe.layer = vectors[0].layer;
    probe.pooling = vectors[0].pooling;
    probe.seed = opts.seed;
    probe.converged = fit.converged;
    probe.iterations = fit.iterations;
    return probe;
}

double probe_logit(const LinearProbe& probe, const std::vector<float>& values) {
    if (values.size() != probe.weights.size()) {
        throw ValidationError("probe dimension mismatch: probe has " +
                              std::to_string(probe.weights.size()) + ", vector has " +
                              std::to_string(values.size()));
    }
    double z = probe.bias;
    for (std::size_t i = 0; i < values.size(); ++i) z += probe.weights[i] * values[i];
    return z;
}

std::map<ModKind, double> group_by_modification(const std::vector<DatasetSample>& samples,
                                                const std::vector<bool>& predictions) {
    if (samples.size() != predictions.size()) throw ValidationError("sample/prediction count mismatch");
    std::map<ModKind, std::pair<std::size_t, std::size_t>> counts; // kind -> (correct, total)
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto& [correct, total] = counts[samples[i].modification];
        ++total;
        if (predictions[i] == samples[i].label) ++correct;
    }
    std::map<ModKind, double> acc;
    for (const auto& [kind, ct] : counts) {
        acc[kind] = static_cast<double>(ct.first) / static_cast<double>(ct.second);
    }
    return acc;
}

namespace {

double overall_accuracy(const std::vector<DatasetSample>& samples,
                        const std::vector<bool>& predictions) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (predictions[i] == samples[i].label) ++correct;
    }
    return samples.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(samples.size());
}

ProbeReport rule_report(Backend& backend, const std::vector<DatasetSample>& train,
                        const std::vector<DatasetSample>& test, const SweepOptions& opts) {
    ProbeReport r;
    r.backend = backend.info();
    r.pooling = Pooling::mean;
    r.n_train = train.size();
    r.n_test = test.size();
    r.l2_strength = opts.train.l2_strength;
    r.max_iterations = opts.train.max_iterations;
    std::vector<bool> predictions;
    predictions.reserve(test.size());
    for (const DatasetSample& s : test) predictions.push_back(backends::rule_classify(s.text));
    double acc = overall_accuracy(test, predictions);
    r.per_layer_accuracy[0] = acc;
    r.best_layer = 0;
    r.per_modification_accuracy = group_by_modification(test, predictions);
    r.baseline_layer0 = acc;
    r.baseline_per_modification = r.per_modification_accuracy;
    return r;
}

// Pooled feature matrices for one split: per layer in the sweep's pooling,
// plus layer 0 mean-pooled for the non-contextual baseline.
struct PooledSplit {
    std::vector<Eigen::MatrixXf> by_layer;
    Eigen::MatrixXf layer0_mean;
    std::vector<bool> labels;
};

PooledSplit pool_split(Backend& backend, const std::vector<DatasetSample>& samples, Pooling pooling,
                       const backends::PoolingOptions& popts) {
    PooledSplit out;
    int layer_count = backend.num_layers() + 1;
    out.by_layer.resize(layer_count);
    out.labels.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        backends::TokenizedSentence tok = backend.tokenize(samples[i].text);
        LayerEmbeddings emb = backend.embed_layers(samples[i].text);
        if (emb.num_layers() != static_cast<std::size_t>(layer_count)) {
            throw BackendError("backend returned unexpected layer count");
        }
        for (int layer = 0; layer < layer_count; ++layer) {
            SentenceVector v = backends::pool(emb, layer, pooling, tok, popts);
            if (out.by_layer[layer].rows() == 0) {
                out.by_layer[layer].resize(samples.size(), v.values.size());
            }
            for (std::size_t j = 0; j < v.values.size(); ++j) {
                out.by_layer[layer](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    v.values[j];
            }
        }
        SentenceVector v0 = backends::pool(emb, 0, Pooling::mean, tok, popts);
        if (out.layer0_mean.rows() == 0) out.layer0_mean.resize(samples.size(), v0.values.size());
        for (std::size_t j = 0; j < v0.values.size(); ++j) {
            out.layer0_mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v0.values[j];
        }
        out.labels.push_back(samples[i].label);
    }
    return out;
}

struct LayerFit {
    LinearProbe probe;
    std::vector<bool> test_predictions;
    double test_accuracy = 0.0;
};

LayerFit fit_layer(const Eigen::MatrixXf& train_X, const std::vector<bool>& train_y,
                   const Eigen::MatrixXf& test_X, const std::vector<DatasetSample>& test,
                   const TrainOptions& topts) {
    Eigen::MatrixXd X = train_X.cast<double>();
    Eigen::VectorXd y(train_X.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = train_y[i] ? 1.0 : 0.0;
    LogRegOptions lro;
    lro.l2_strength = topts.l2_strength;
    lro.max_iterations = topts.max_iterations;
    LogRegResult fit = fit_logistic_regression(X, y, lro);

    LayerFit out;
    out.probe.weights.assign(fit.weights.data(), fit.weights.data() + fit.weights.size());
    out.probe.bias = fit.bias;
    out.probe.seed = topts.seed;
    out.probe.converged = fit.converged;
    out.probe.iterations = fit.iterations;

    Eigen::VectorXd w = fit.weights;
    Eigen::VectorXd z = test_X.cast<double>() * w;
    z.array() += fit.bias;
    out.test_predictions.reserve(test.size());
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        bool pred = z[i] > 0.0;
        out.test_predictions.push_back(pred);
        if (pred == test[static_cast<std::size_t>(i)].label) ++correct;
    }
    out.test_accuracy =
        test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
    return out;
}

} // namespace

ProbeReport layer_sweep(Backend& backend, const std::vector<DatasetSample>& train,
                        const std::vector<DatasetSample>& test, Pooling pooling,
                        const SweepOptions& opts) {
    if (backend.caps().rule) return rule_report(backend, train, test, opts);
    if (!backend.caps().embeddings) {
        throw BackendError("backend \"" + backend.info().name + "\" does not provide embeddings");
    }

    // Mock separable backends learn the text->label map from the dataset.
    if (auto* mock = dynamic_cast<mock::MockBackend*>(&backend); mock && mock->wants_priming()) {
        std::vector<std::pair<std::string, bool>> labeled;
        labeled.reserve(train.size() + test.size());
        for (const DatasetSample& s : train) labeled.emplace_back(s.text, s.label);
        for (const DatasetSample& s : test) labeled.emplace_back(s.text, s.label);
        mock->prime(labeled);
    }

    PooledSplit train_pooled = pool_split(backend, train, pooling, opts.pooling_opts);
    PooledSplit test_pooled = pool_split(backend, test, pooling, opts.pooling_opts);

    ProbeReport r;
    r.backend = backend.info();
    r.pooling = pooling;
    r.n_train = train.size();
    r.n_test = test.size();
    r.l2_strength = opts.train.l2_strength;
    r.max_iterations = opts.train.max_iterations;

    int layer_count = backend.num_layers() + 1;
    std::optional<LayerFit> best;
    for (int layer = 0; layer < layer_count; ++layer) {
        LayerFit fit = fit_layer(train_pooled.by_layer[layer], train_pooled.labels,
                                 test_pooled.by_layer[layer], test, opts.train);
        fit.probe.layer = layer;
        fit.probe.pooling = pooling;
        fit.probe.backend_id = backend.info().name;
        r.per_layer_accuracy[layer] = fit.test_accuracy;
        r.converged_by_layer[layer] = fit.probe.converged;
        if (!best || fit.test_accuracy > best->test_accuracy) {
            r.best_layer = layer;
            best = std::move(fit);
        }
    }
    r.per_modification_accuracy = group_by_modification(test, best->test_predictions);
    r.best_probe = best->probe;

    // Non-contextualized baseline: layer 0, mean pooling throughout.
    LayerFit base = fit_layer(train_pooled.layer0_mean, train_pooled.labels, test_pooled.layer0_mean,
                              test, opts.train);
    r.baseline_layer0 = base.test_accuracy;
    r.baseline_per_modification = group_by_modification(test, base.test_predictions);
    return r;
}

nlohmann::json probe_to_json(const LinearProbe& probe, const backends::BackendInfo& info) {
    return nlohmann::json{{"weights", probe.weights},
                          {"bias", probe.bias},
                          {"layer", probe.layer},
                          {"pooling", backends::to_string(probe.pooling)},
                          {"backend",
                           {{"name", info.name},
                            {"kind", info.kind},
                            {"checkpoint", info.checkpoint},
                            {"revision", info.revision},
                            {"tokenizer", info.tokenizer}}},
                          {"seed", probe.seed},
                          {"converged", probe.converged},
                          {"iterations", probe.iterations}};
}

LinearProbe probe_from_json(const nlohmann::json& j, std::string* backend_name) {
    try {
        LinearProbe p;
        p.weights = j.at("weights").get<std::vector<double>>();
        p.bias = j.at("bias").get<double>();
        p.layer = j.at("layer").get<int>();
        std::optional<Pooling> pooling = backends::pooling_from_string(j.at("pooling").get<std::string>());
        if (!pooling) throw ValidationError("unknown pooling in probe file");
        p.pooling = *pooling;
        p.backend_id = j.at("backend").at("name").get<std::string>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.converged = j.value("converged", true);
        p.iterations = j.value("iterations", 0);
        if (backend_name) *backend_name = p.backend_id;
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad probe JSON: ") + e.what());
    }
}

namespace {

const std::vector<ModKind>& all_mod_kinds() {
    static const std::vector<ModKind> kKinds{ModKind::none, ModKind::relativizer_omission,
                                             ModKind::who_to_which, ModKind::which_to_who,
                                             ModKind::which_to_that};
    return kKinds;
}

nlohmann::json mod_map_to_json(const std::map<ModKind, double>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [kind, acc] : m) j[pairs::to_string(kind)] = acc;
    return j;
}

} // namespace

nlohmann::json report_to_json(const ProbeReport& r) {
    nlohmann::json per_layer = nlohmann::json::object();
    for (const auto& [layer, acc] : r.per_layer_accuracy) per_layer[std::to_string(layer)] = acc;
    nlohmann::json converged = nlohmann::json::object();
    for (const auto& [layer, c] : r.converged_by_layer) converged[std::to_string(layer)] = c;
    nlohmann::json j{
        {"backend",
         {{"name", r.backend.name},
          {"kind", r.backend.kind},
          {"checkpoint", r.backend.checkpoint},
          {"revision", r.backend.revision},
          {"tokenizer", r.backend.tokenizer}}},
        {"pooling", backends::to_string(r.pooling)},
        {"per_layer_accuracy", std::move(per_layer)},
        {"best_layer", r.best_layer},
        {"best_layer_selection", "test-accuracy (optimistic)"},
        {"overall_accuracy", r.per_layer_accuracy.count(r.best_layer)
                                 ? r.per_layer_accuracy.at(r.best_layer)
                                 : 0.0},
        {"per_modification_accuracy", mod_map_to_json(r.per_modification_accuracy)},
        {"baseline_layer0", r.baseline_layer0},
        {"baseline_per_modification", mod_map_to_json(r.baseline_per_modification)},
        {"n_train", r.n_train},
        {"n_test", r.n_test},
        {"hyperparameters",
         {{"l2_strength", r.l2_strength},
          {"max_iterations", r.max_iterations},
          {"features_standardized", r.features_standardized}}},
        {"converged_by_layer", std::move(converged)}};
    if (r.best_probe) j["probe"] = probe_to_json(*r.best_probe, r.backend);
    return j;
}

std::string report_to_csv(const ProbeReport& r) {
    std::string csv = "backend,layer,pooling,overall";
    for (ModKind k : all_mod_kinds()) csv += std::string(",") + pairs::to_string(k);
    csv += "\n";
    auto row = [&](int layer, const char* pooling, double overall,
                   const std::map<ModKind, double>& mods) {
        csv += r.backend.name + "," + std::to_string(layer) + "," + pooling + "," +
               std::to_string(overall);
        for (ModKind k : all_mod_kinds()) {
            csv += ",";
            auto it = mods.find(k);
            if (it != mods.end()) csv += std::to_string(it->second);
        }
        csv += "\n";
    };
    row(r.best_layer, backends::to_string(r.pooling),
        r.per_layer_accuracy.count(r.best_layer) ? r.per_layer_accuracy.at(r.best_layer) : 0.0,
        r.per_modification_accuracy);
    row(0, "mean", r.baseline_layer0, r.baseline_per_modification);
    return csv;
}

std::string layer_curve_csv(const ProbeReport& r) {
    std::string csv = "backend,pooling,layer,accuracy\n";
    for (const auto& [layer, acc] : r.per_layer_accuracy) {
        csv += r.backend.name + "," + backends::to_string(r.pooling) + "," + std::to_string(layer) +
               "," + std::to_string(acc) + "\n";
    }
    return csv;
}

} // namespace rcprobe::probing
