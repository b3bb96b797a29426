#include "rcprobe/mlm_client.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <httplib.h>

#include "rcprobe/digest.hpp"
#include "rcprobe/error.hpp"

namespace rcprobe::backends {

namespace {

// endpoint "http://host:port" -> (host, port). https is not supported.
std::pair<std::string, int> parse_endpoint(const std::string& endpoint) {
    std::string rest = endpoint;
    const std::string prefix = "http://";
    if (rest.rfind(prefix, 0) == 0) rest = rest.substr(prefix.size());
    if (rest.rfind("https://", 0) == 0) throw ValidationError("mlm endpoint must be http://");
    std::size_t slash = rest.find('/');
    if (slash != std::string::npos) rest = rest.substr(0, slash);
    std::size_t colon = rest.find(':');
    if (colon == std::string::npos) return {rest, 80};
    return {rest.substr(0, colon), std::stoi(rest.substr(colon + 1))};
}

} // namespace

MlmBridgeBackend::MlmBridgeBackend(std::string name, std::string endpoint, std::string checkpoint,
                                   std::string revision, std::string device)
    : endpoint_(std::move(endpoint)), device_(std::move(device)) {
    info_.name = std::move(name);
    info_.kind = "mlm";
    info_.checkpoint = std::move(checkpoint);
    info_.revision = std::move(revision);
    if (const char* dir = std::getenv("RCPROBE_CACHE_DIR")) cache_dir_ = dir;
}

nlohmann::json MlmBridgeBackend::post(const std::string& path, const nlohmann::json& body,
                                      const std::string& cache_tag) {
    std::string cache_file;
    if (!cache_dir_.empty() && !cache_tag.empty()) {
        std::string key = digest::sha256_hex(info_.checkpoint + "\n" + info_.revision + "\n" +
                                             path + "\n" + body.dump());
        cache_file = cache_dir_ + "/" + cache_tag + "-" + key + ".json";
        std::ifstream in(cache_file);
        if (in) {
            nlohmann::json cached = nlohmann::json::parse(in, nullptr, false);
            if (!cached.is_discarded()) return cached;
        }
    }

    auto [host, port] = parse_endpoint(endpoint_);
    httplib::Client client(host, port);
    client.set_read_timeout(600, 0);
    client.set_connection_timeout(10, 0);
    httplib::Result res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        throw BackendError("mlm bridge unreachable at " + endpoint_ + " (" +
                           httplib::to_string(res.error()) + ")");
    }
    if (res->status != 200) {
        throw BackendError("mlm bridge error " + std::to_string(res->status) + " on " + path + ": " +
                           res->body);
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw BackendError("mlm bridge returned invalid JSON on " + path);

    if (!cache_file.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cache_dir_, ec);
        std::ofstream out(cache_file, std::ios::binary);
        if (out) out << j.dump();
    }
    return j;
}

void MlmBridgeBackend::fetch_info() {
    if (info_fetched_) return;
    auto [host, port] = parse_endpoint(endpoint_);
    httplib::Client client(host, port);
    client.set_read_timeout(600, 0);
    httplib::Result res = client.Get(("/v1/info?model=" + info_.checkpoint).c_str());
    if (!res || res->status != 200) {
        throw BackendError("mlm bridge /v1/info failed for " + info_.checkpoint + " at " + endpoint_);
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw BackendError("mlm bridge returned invalid JSON on /v1/info");
    layers_ = j.at("layers").get<int>();
    dim_ = j.at("dim").get<int>();
    info_.tokenizer = j.value("tokenizer", "");
    if (info_.revision.empty()) info_.revision = j.value("revision", "");
    info_fetched_ = true;
}

int MlmBridgeBackend::num_layers() const {
    const_cast<MlmBridgeBackend*>(this)->fetch_info();
    return layers_;
}

TokenizedSentence MlmBridgeBackend::tokenize(const std::string& sentence) {
    nlohmann::json j = post("/v1/tokenize",
                            {{"model", info_.checkpoint},
                             {"revision", info_.revision},
                             {"device", device_},
                             {"text", sentence}},
                            "tok");
    TokenizedSentence t;
    t.pieces = j.at("pieces").get<std::vector<std::string>>();
    t.special_mask = j.at("special_mask").get<std::vector<bool>>();
    t.word_alignment = j.at("word_alignment").get<std::vector<int>>();
    if (j.contains("mask_position") && !j.at("mask_position").is_null()) {
        t.mask_position = j.at("mask_position").get<std::size_t>();
    }
    last_text_ = sentence;
    return t;
}

LayerEmbeddings MlmBridgeBackend::embed_layers(const std::string& sentence) {
    if (sentence.empty()) throw BackendError("cannot embed an empty sentence");
    fetch_info();
    nlohmann::json j = post("/v1/embed",
                            {{"model", info_.checkpoint},
                             {"revision", info_.revision},
                             {"device", device_},
                             {"text", sentence}},
                            "emb");
    LayerEmbeddings emb;
    emb.layers = j.at("layers").get<std::vector<std::vector<std::vector<float>>>>();
    if (emb.layers.size() != static_cast<std::size_t>(layers_) + 1) {
        throw BackendError("mlm bridge returned " + std::to_string(emb.layers.size()) +
                           " layers, expected " + std::to_string(layers_ + 1));
    }
    for (const auto& mat : emb.layers) {
        if (mat.size() != emb.layers[0].size()) {
            throw BackendError("mlm bridge layers disagree on piece count");
        }
    }
    return emb;
}

MaskedDistribution MlmBridgeBackend::predict_masked_text(const std::string& text_with_mask) {
    nlohmann::json j = post("/v1/predict_masked",
                            {{"model", info_.checkpoint},
                             {"revision", info_.revision},
                             {"device", device_},
                             {"text_with_mask", text_with_mask}},
                            "mask");
    std::vector<DistributionEntry> entries;
    for (const nlohmann::json& e : j.at("entries")) {
        entries.push_back({e.at(0).get<std::string>(), e.at(1).get<double>(),
                           e.at(2).get<std::size_t>()});
    }
    return finalize_distribution(std::move(entries), j.at("vocab_size").get<std::size_t>());
}

MaskedDistribution MlmBridgeBackend::predict_masked(const TokenizedSentence& tok) {
    if (!tok.mask_position) throw BackendError("no [MASK] position in tokenized input");
    if (last_text_.empty()) {
        throw BackendError("bridge predict_masked requires tokenize() of the marker text first");
    }
    return predict_masked_text(last_text_);
}

int MlmBridgeBackend::piece_count(const std::string& word) {
    nlohmann::json j = post("/v1/piece_count", {{"model", info_.checkpoint}, {"word", word}}, "pc");
    return j.at("pieces").get<int>();
}

std::unique_ptr<Backend> make_mlm_backend(const std::string& name, const nlohmann::json& config) {
    if (!config.contains("checkpoint") || !config.contains("endpoint")) {
        throw ValidationError("mlm backend config requires \"checkpoint\" and \"endpoint\"");
    }
    return std::make_unique<MlmBridgeBackend>(
        name, config.at("endpoint").get<std::string>(), config.at("checkpoint").get<std::string>(),
        config.value("revision", ""), config.value("device", "cpu"));
}

} // namespace rcprobe::backends
