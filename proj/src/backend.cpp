#include "rcprobe/backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rcprobe/error.hpp"
#include "rcprobe/mlm_client.hpp"
#include "rcprobe/mock_backend.hpp"
#include "rcprobe/static_backend.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::backends {

const char* to_string(Pooling p) { return p == Pooling::cls ? "cls" : "mean"; }

std::optional<Pooling> pooling_from_string(const std::string& s) {
    if (s == "cls") return Pooling::cls;
    if (s == "mean") return Pooling::mean;
    return std::nullopt;
}

MaskedDistribution finalize_distribution(std::vector<DistributionEntry> entries,
                                         std::size_t vocab_size) {
    if (vocab_size == 0) throw BackendError("masked distribution over an empty vocabulary");
    std::sort(entries.begin(), entries.end(), [](const DistributionEntry& a, const DistributionEntry& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.vocab_index < b.vocab_index;
    });
    double sum = 0.0;
    for (const DistributionEntry& e : entries) sum += e.prob;
    if (std::abs(sum - 1.0) > 1e-6) {
        throw BackendError("masked distribution does not sum to 1 (got " + std::to_string(sum) + ")");
    }
    MaskedDistribution d;
    d.entries = std::move(entries);
    d.vocab_size = vocab_size;
    return d;
}

SentenceVector pool(const LayerEmbeddings& emb, int layer, Pooling strategy,
                    const TokenizedSentence& tok, const PoolingOptions& opts) {
    if (layer < 0 || static_cast<std::size_t>(layer) >= emb.num_layers()) {
        throw BackendError("pooling layer " + std::to_string(layer) + " out of range (have " +
                           std::to_string(emb.num_layers()) + " layers)");
    }
    const std::vector<std::vector<float>>& mat = emb.layers[layer];
    if (mat.empty()) throw BackendError("cannot pool an empty sentence");

    SentenceVector v;
    v.layer = layer;
    v.pooling = strategy;
    if (strategy == Pooling::cls) {
        v.values = mat.front();
        return v;
    }
    std::size_t dim = mat[0].size();
    std::vector<double> acc(dim, 0.0);
    std::size_t n = 0;
    for (std::size_t p = 0; p < mat.size(); ++p) {
        bool special = p < tok.special_mask.size() && tok.special_mask[p];
        if (special && !opts.include_specials) continue;
        for (std::size_t d = 0; d < dim; ++d) acc[d] += mat[p][d];
        ++n;
    }
    if (n == 0) throw BackendError("mean pooling over zero non-special pieces");
    v.values.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) v.values[d] = static_cast<float>(acc[d] / static_cast<double>(n));
    return v;
}

bool rule_classify(const std::string& s) {
    static const std::vector<std::string> kRelativizers{"who", "which", "that"};
    return text::contains_any_word(s, kRelativizers);
}

namespace {

// The rule baseline modeled as a degenerate backend so reports treat all
// baselines uniformly.
class RuleBackend final : public Backend {
public:
    explicit RuleBackend(std::string name) {
        info_.name = std::move(name);
        info_.kind = "rule";
        info_.checkpoint = "builtin:relativizer-presence";
        info_.tokenizer = "word";
    }
    const BackendInfo& info() const override { return info_; }
    Capabilities caps() const override { return {false, false, true}; }
    int num_layers() const override { return 0; }
    TokenizedSentence tokenize(const std::string& text) override {
        TokenizedSentence t;
        for (std::string& w : text::words(text)) {
            t.pieces.push_back(std::move(w));
            t.special_mask.push_back(false);
            t.word_alignment.push_back(static_cast<int>(t.word_alignment.size()));
        }
        return t;
    }
    LayerEmbeddings embed_layers(const std::string&) override {
        throw BackendError("rule backend has no embeddings");
    }
    MaskedDistribution predict_masked(const TokenizedSentence&) override {
        throw BackendError("rule backend has no MLM head");
    }
    int piece_count(const std::string&) override { return 1; }
    bool thread_safe() const override { return true; }

private:
    BackendInfo info_;
};

} // namespace

std::unique_ptr<Backend> make_backend(const nlohmann::json& config) {
    if (!config.is_object() || !config.contains("kind")) {
        throw ValidationError("backend config must be an object with a \"kind\" field");
    }
    std::string kind = config.at("kind").get<std::string>();
    std::string name = config.value("name", kind);
    if (kind == "rule") return std::make_unique<RuleBackend>(name);
    if (kind == "static") return make_static_backend(name, config);
    if (kind == "mock") return make_mock_backend(name, config);
    if (kind == "mlm") return make_mlm_backend(name, config);
    throw ValidationError("unknown backend kind: " + kind);
}

std::unique_ptr<Backend> load_backend_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open backend config: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("invalid JSON in backend config: " + path);
    return make_backend(j);
}

} // namespace rcprobe::backends
