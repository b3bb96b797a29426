#ifndef RCPROBE_STATIC_BACKEND_HPP
#define RCPROBE_STATIC_BACKEND_HPP

#include <memory>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rcprobe/backend.hpp"

namespace rcprobe::backends {

// Word-embedding table loaded from a text file, one "word f1 .. fd" per line
// (an optional "count dim" header line is skipped). Word-level tokenization,
// no specials, a single layer 0. Out-of-vocabulary words are skipped and the
// skip count is tracked.
class StaticTableBackend final : public Backend {
public:
    StaticTableBackend(std::string name, const std::string& path, bool lowercase);

    const BackendInfo& info() const override { return info_; }
    Capabilities caps() const override { return {true, false, false}; }
    int num_layers() const override { return 0; }
    TokenizedSentence tokenize(const std::string& text) override;
    LayerEmbeddings embed_layers(const std::string& text) override;
    MaskedDistribution predict_masked(const TokenizedSentence&) override;
    int piece_count(const std::string& word) override;

    std::size_t dim() const { return dim_; }
    std::size_t oov_words() const { return oov_words_; }
    std::size_t seen_words() const { return seen_words_; }

private:
    BackendInfo info_;
    bool lowercase_;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<float>> table_;
    std::size_t oov_words_ = 0;
    std::size_t seen_words_ = 0;
};

std::unique_ptr<Backend> make_static_backend(const std::string& name, const nlohmann::json& config);

} // namespace rcprobe::backends

#endif
