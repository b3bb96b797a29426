#ifndef RCPROBE_MLM_CLIENT_HPP
#define RCPROBE_MLM_CLIENT_HPP

#include <memory>

#include <nlohmann/json.hpp>

#include "rcprobe/backend.hpp"

namespace rcprobe::backends {

// Transformer MLM checkpoints are served out-of-process over a small HTTP
// JSON protocol (see tools/mlm_server.py for the reference server):
//
//   GET  /v1/info?model=M            -> {layers, dim, tokenizer, revision}
//   POST /v1/embed                   {model, revision?, device?, text}
//     -> {pieces, special_mask, word_alignment, layers[L+1][P][d]}
//   POST /v1/predict_masked          {model, revision?, device?, text_with_mask}
//     -> {entries: [[item, prob, vocab_index], ...], vocab_size}
//   POST /v1/piece_count             {model, word} -> {pieces}
//
// The client re-validates and re-sorts distributions (descending probability,
// ties by vocabulary index). Responses may be cached on disk when the
// RCPROBE_CACHE_DIR environment variable is set.
class MlmBridgeBackend final : public Backend {
public:
    MlmBridgeBackend(std::string name, std::string endpoint, std::string checkpoint,
                     std::string revision, std::string device);

    const BackendInfo& info() const override { return info_; }
    Capabilities caps() const override { return {true, true, false}; }
    int num_layers() const override;
    TokenizedSentence tokenize(const std::string& text) override;
    LayerEmbeddings embed_layers(const std::string& text) override;
    MaskedDistribution predict_masked(const TokenizedSentence& tok) override;
    int piece_count(const std::string& word) override;

    // predict_masked needs the original marker text; the harness routes
    // through this entry point for bridge backends.
    MaskedDistribution predict_masked_text(const std::string& text_with_mask);

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body,
                        const std::string& cache_tag);
    void fetch_info();

    BackendInfo info_;
    std::string endpoint_;
    std::string device_;
    std::string cache_dir_;
    int layers_ = -1;
    int dim_ = 0;
    std::string last_text_;            // marker text of the last tokenize()
    bool info_fetched_ = false;
};

std::unique_ptr<Backend> make_mlm_backend(const std::string& name, const nlohmann::json& config);

} // namespace rcprobe::backends

#endif
