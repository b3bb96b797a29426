#ifndef RCPROBE_MOCK_BACKEND_HPP
#define RCPROBE_MOCK_BACKEND_HPP

#include <cstdint>
#include <memory>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rcprobe/backend.hpp"

namespace rcprobe::mock {

// Offline test backends. Three flavors:
//   separable — contextual layers place a sentence's vectors around a
//               label-dependent center once primed with (text, label) pairs;
//               layer 0 and unprimed texts are label-independent noise.
//   gaussian  — all layers deterministic noise keyed by the text.
//   fixed     — predict_masked returns the configured distribution verbatim.
class MockBackend final : public backends::Backend {
public:
    enum class Flavor { separable, gaussian, fixed };

    MockBackend(std::string name, Flavor flavor, int dim, int layers, std::uint64_t seed,
                double noise, backends::MaskedDistribution fixed);

    const backends::BackendInfo& info() const override { return info_; }
    backends::Capabilities caps() const override;
    int num_layers() const override { return layers_; }
    backends::TokenizedSentence tokenize(const std::string& text) override;
    backends::LayerEmbeddings embed_layers(const std::string& text) override;
    backends::MaskedDistribution predict_masked(const backends::TokenizedSentence& tok) override;
    int piece_count(const std::string& word) override;

    // Teaches the separable flavor which texts carry which label.
    void prime(const std::vector<std::pair<std::string, bool>>& labeled_texts);
    bool wants_priming() const { return flavor_ == Flavor::separable; }

    Flavor flavor() const { return flavor_; }

private:
    backends::BackendInfo info_;
    Flavor flavor_;
    int dim_;
    int layers_;
    std::uint64_t seed_;
    double noise_;
    backends::MaskedDistribution fixed_;
    std::unordered_map<std::string, bool> labels_;
};

std::unique_ptr<backends::Backend> make_mock_backend(const std::string& name,
                                                     const nlohmann::json& config);

} // namespace rcprobe::mock

namespace rcprobe::backends {
using rcprobe::mock::make_mock_backend;
}

#endif
