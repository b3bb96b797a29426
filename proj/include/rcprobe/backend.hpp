#ifndef RCPROBE_BACKEND_HPP
#define RCPROBE_BACKEND_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rcprobe::backends {

struct TokenizedSentence {
    std::vector<std::string> pieces;
    std::vector<bool> special_mask;  // true for sequence-delimiter specials
    std::vector<int> word_alignment; // piece -> source word index, -1 for specials
    std::optional<std::size_t> mask_position;
};

// layers[0] is the non-contextualized embedding layer; all layers share the
// piece count and dimension.
struct LayerEmbeddings {
    std::vector<std::vector<std::vector<float>>> layers; // layer x piece x dim
    std::size_t num_layers() const { return layers.size(); } // L + 1
    std::size_t num_pieces() const { return layers.empty() ? 0 : layers[0].size(); }
    std::size_t dim() const {
        return layers.empty() || layers[0].empty() ? 0 : layers[0][0].size();
    }
};

struct DistributionEntry {
    std::string item;
    double prob = 0.0;
    std::size_t vocab_index = 0;
};

// Full-vocabulary distribution at a masked position, sorted by probability
// descending, ties broken by vocabulary index.
struct MaskedDistribution {
    std::vector<DistributionEntry> entries;
    std::size_t vocab_size = 0;
};

// Sorts and sanity-checks a raw distribution (probabilities sum to 1 within
// 1e-6, non-increasing order). Throws BackendError on violation.
MaskedDistribution finalize_distribution(std::vector<DistributionEntry> entries,
                                         std::size_t vocab_size);

struct Capabilities {
    bool embeddings = false;
    bool mlm_head = false;
    bool rule = false;
};

enum class Pooling { cls, mean };
const char* to_string(Pooling p);
std::optional<Pooling> pooling_from_string(const std::string& s);

struct PoolingOptions {
    bool include_specials = false; // sensitivity switch; default excludes [CLS]/[SEP]
};

struct SentenceVector {
    int layer = 0;
    Pooling pooling = Pooling::mean;
    std::vector<float> values;
};

// Provenance recorded in every result file.
struct BackendInfo {
    std::string name;
    std::string kind; // mlm | static | rule | mock
    std::string checkpoint;
    std::string revision;
    std::string tokenizer;
};

class Backend {
public:
    virtual ~Backend() = default;

    virtual const BackendInfo& info() const = 0;
    virtual Capabilities caps() const = 0;

    // Number of transformer layers L; embed_layers returns L+1 entries
    // (static backends report 0 and return the single layer 0).
    virtual int num_layers() const = 0;

    virtual TokenizedSentence tokenize(const std::string& text) = 0;
    virtual LayerEmbeddings embed_layers(const std::string& text) = 0;
    virtual MaskedDistribution predict_masked(const TokenizedSentence& tok) = 0;

    // How many pieces a single word occupies under this backend's tokenizer
    // (used to exclude multi-piece cloze targets).
    virtual int piece_count(const std::string& word) = 0;

    virtual bool thread_safe() const { return false; }
};

// cls -> first piece's vector; mean -> arithmetic mean over non-special
// pieces (or all pieces with include_specials). Throws BackendError on a
// layer out of range.
SentenceVector pool(const LayerEmbeddings& emb, int layer, Pooling strategy,
                    const TokenizedSentence& tok, const PoolingOptions& opts = {});

// The rule baseline: grammatical iff the text contains a word-boundary
// occurrence of who, which, or that (whom/whose intentionally excluded).
bool rule_classify(const std::string& text);

// Builds a backend from its config JSON:
//   {"name", "kind": "mlm"|"static"|"rule"|"mock", ...}
// mlm:    {"checkpoint", "endpoint", "revision"?, "device"?}
// static: {"path", "lowercase"?}
// mock:   {"mock": "separable"|"gaussian"|"fixed", "dim"?, "layers"?,
//          "seed"?, "noise"?, "distribution"?: [[item, prob], ...]}
std::unique_ptr<Backend> make_backend(const nlohmann::json& config);
std::unique_ptr<Backend> load_backend_file(const std::string& path);

} // namespace rcprobe::backends

#endif
