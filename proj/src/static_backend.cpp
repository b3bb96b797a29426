#include "rcprobe/static_backend.hpp"

#include <fstream>
#include <sstream>

#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::backends {

StaticTableBackend::StaticTableBackend(std::string name, const std::string& path, bool lowercase)
    : lowercase_(lowercase) {
    info_.name = std::move(name);
    info_.kind = "static";
    info_.checkpoint = path;
    info_.tokenizer = "word";

    std::ifstream in(path);
    if (!in) throw BackendError("cannot open vector file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        std::vector<float> vec;
        float v;
        while (ss >> v) vec.push_back(v);
        if (line_no == 1 && vec.size() == 1) continue; // "count dim" header
        if (vec.empty()) {
            throw BackendError(path + ": line " + std::to_string(line_no) + ": no vector values");
        }
        if (dim_ == 0) dim_ = vec.size();
        if (vec.size() != dim_) {
            throw BackendError(path + ": line " + std::to_string(line_no) + ": dimension mismatch");
        }
        if (lowercase_) word = text::to_lower(word);
        table_.emplace(std::move(word), std::move(vec));
    }
    if (table_.empty()) throw BackendError("empty vector table: " + path);
}

TokenizedSentence StaticTableBackend::tokenize(const std::string& sentence) {
    TokenizedSentence t;
    int w = 0;
    for (std::string& word : text::words(sentence)) {
        t.pieces.push_back(std::move(word));
        t.special_mask.push_back(false);
        t.word_alignment.push_back(w++);
    }
    return t;
}

LayerEmbeddings StaticTableBackend::embed_layers(const std::string& sentence) {
    if (sentence.empty()) throw BackendError("cannot embed an empty sentence");
    TokenizedSentence tok = tokenize(sentence);
    LayerEmbeddings emb;
    emb.layers.resize(1);
    for (const std::string& piece : tok.pieces) {
        ++seen_words_;
        std::string key = lowercase_ ? text::to_lower(piece) : piece;
        auto it = table_.find(key);
        if (it == table_.end()) {
            ++oov_words_; // skipped, not zero-filled
            continue;
        }
        emb.layers[0].push_back(it->second);
    }
    if (emb.layers[0].empty()) {
        // Every word OOV: fall back to a zero vector so pooling stays defined.
        emb.layers[0].emplace_back(dim_, 0.0f);
    }
    return emb;
}

MaskedDistribution StaticTableBackend::predict_masked(const TokenizedSentence&) {
    throw BackendError("static backend has no MLM head");
}

int StaticTableBackend::piece_count(const std::string&) { return 1; }

std::unique_ptr<Backend> make_static_backend(const std::string& name, const nlohmann::json& config) {
    if (!config.contains("path")) throw ValidationError("static backend config requires \"path\"");
    return std::make_unique<StaticTableBackend>(name, config.at("path").get<std::string>(),
                                                config.value("lowercase", true));
}

} // namespace rcprobe::backends
