#include "rcprobe/mock_backend.hpp"

#include <functional>

#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::mock {

using backends::Capabilities;
using backends::LayerEmbeddings;
using backends::MaskedDistribution;
using backends::TokenizedSentence;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const char* flavor_name(MockBackend::Flavor f) {
    switch (f) {
        case MockBackend::Flavor::separable: return "separable";
        case MockBackend::Flavor::gaussian: return "gaussian";
        case MockBackend::Flavor::fixed: return "fixed";
    }
    return "?";
}

} // namespace

MockBackend::MockBackend(std::string name, Flavor flavor, int dim, int layers, std::uint64_t seed,
                         double noise, MaskedDistribution fixed)
    : flavor_(flavor), dim_(dim), layers_(layers), seed_(seed), noise_(noise),
      fixed_(std::move(fixed)) {
    info_.name = std::move(name);
    info_.kind = "mock";
    info_.checkpoint = std::string("mock:") + flavor_name(flavor);
    info_.tokenizer = "word+specials";
}

Capabilities MockBackend::caps() const {
    if (flavor_ == Flavor::fixed) return {false, true, false};
    return {true, false, false};
}

TokenizedSentence MockBackend::tokenize(const std::string& sentence) {
    TokenizedSentence t;
    t.pieces.push_back("<s>");
    t.special_mask.push_back(true);
    t.word_alignment.push_back(-1);
    int w = 0;
    std::size_t i = 0;
    // Word-level pieces; "[MASK]" survives as a single mask piece.
    while (i < sentence.size()) {
        if (sentence.compare(i, 6, "[MASK]") == 0) {
            if (t.mask_position) throw BackendError("more than one [MASK] in input");
            t.mask_position = t.pieces.size();
            t.pieces.push_back("[MASK]");
            t.special_mask.push_back(false);
            t.word_alignment.push_back(w++);
            i += 6;
            continue;
        }
        if (!text::is_word_char(sentence[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < sentence.size() && text::is_word_char(sentence[j])) ++j;
        t.pieces.push_back(sentence.substr(i, j - i));
        t.special_mask.push_back(false);
        t.word_alignment.push_back(w++);
        i = j;
    }
    t.pieces.push_back("</s>");
    t.special_mask.push_back(true);
    t.word_alignment.push_back(-1);
    return t;
}

LayerEmbeddings MockBackend::embed_layers(const std::string& sentence) {
    if (sentence.empty()) throw BackendError("cannot embed an empty sentence");
    if (flavor_ == Flavor::fixed) throw BackendError("fixed-distribution mock has no embeddings");
    TokenizedSentence tok = tokenize(sentence);

    int label_dir = 0; // +1 acceptable, -1 unacceptable, 0 unknown/unprimed
    if (flavor_ == Flavor::separable) {
        auto it = labels_.find(sentence);
        if (it != labels_.end()) label_dir = it->second ? 1 : -1;
    }

    std::uint64_t text_key = fnv1a(sentence);
    LayerEmbeddings emb;
    emb.layers.resize(static_cast<std::size_t>(layers_) + 1);
    for (int layer = 0; layer <= layers_; ++layer) {
        auto& mat = emb.layers[layer];
        mat.resize(tok.pieces.size());
        for (std::size_t p = 0; p < tok.pieces.size(); ++p) {
            std::uint64_t piece_seed = seed_ ^ text_key ^ (0x9e37ULL * (layer + 1)) ^ (0x85ebULL * (p + 1));
            text::Rng rng(piece_seed);
            std::vector<float>& v = mat[p];
            v.resize(dim_);
            for (int d = 0; d < dim_; ++d) v[d] = static_cast<float>(noise_ * rng.normal());
            if (label_dir != 0) v[0] += static_cast<float>(label_dir);
        }
    }
    return emb;
}

MaskedDistribution MockBackend::predict_masked(const TokenizedSentence& tok) {
    if (flavor_ != Flavor::fixed) throw BackendError("this mock flavor has no MLM head");
    if (!tok.mask_position) throw BackendError("no [MASK] position in tokenized input");
    return fixed_;
}

int MockBackend::piece_count(const std::string& word) {
    // One piece per word run; hyphenated/multiword targets count their runs.
    std::size_t runs = text::words(word).size();
    return static_cast<int>(runs == 0 ? 1 : runs);
}

void MockBackend::prime(const std::vector<std::pair<std::string, bool>>& labeled_texts) {
    for (const auto& [sentence, label] : labeled_texts) labels_[sentence] = label;
}

std::unique_ptr<backends::Backend> make_mock_backend(const std::string& name,
                                                     const nlohmann::json& config) {
    std::string flavor_str = config.value("mock", "separable");
    MockBackend::Flavor flavor;
    if (flavor_str == "separable") {
        flavor = MockBackend::Flavor::separable;
    } else if (flavor_str == "gaussian") {
        flavor = MockBackend::Flavor::gaussian;
    } else if (flavor_str == "fixed") {
        flavor = MockBackend::Flavor::fixed;
    } else {
        throw ValidationError("unknown mock flavor: " + flavor_str);
    }
    int dim = config.value("dim", 16);
    int layers = config.value("layers", 4);
    std::uint64_t seed = config.value("seed", 1234u);
    double noise = config.value("noise", 0.25);

    MaskedDistribution fixed;
    if (flavor == MockBackend::Flavor::fixed) {
        if (!config.contains("distribution")) {
            throw ValidationError("fixed mock requires a \"distribution\" of [item, prob] pairs");
        }
        const nlohmann::json& dist = config.at("distribution");
        std::vector<backends::DistributionEntry> entries;
        std::size_t idx = 0;
        if (dist.is_object()) { // {"item": prob, ...}
            for (const auto& [item, prob] : dist.items()) {
                entries.push_back({item, prob.get<double>(), idx++});
            }
        } else {
            for (const nlohmann::json& pair : dist) {
                entries.push_back({pair.at(0).get<std::string>(), pair.at(1).get<double>(), idx++});
            }
        }
        fixed = backends::finalize_distribution(std::move(entries), idx);
    }
    return std::make_unique<MockBackend>(name, flavor, dim, layers, seed, noise, std::move(fixed));
}

} // namespace rcprobe::mock
