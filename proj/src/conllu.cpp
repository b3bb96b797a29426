#include "rcprobe/conllu.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rcprobe/error.hpp"

namespace rcprobe::extraction {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

std::vector<ConlluSentence> read_conllu(std::istream& in, const std::string& where) {
    std::vector<ConlluSentence> sentences;
    ConlluSentence current;
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&]() {
        if (!current.tokens.empty()) {
            sentences.push_back(std::move(current));
            current = ConlluSentence{};
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') continue;
        std::vector<std::string> cols = split_tabs(line);
        if (cols.size() < 8) {
            throw ValidationError(where + ": line " + std::to_string(line_no) +
                                  ": expected >= 8 tab-separated CoNLL-U columns");
        }
        const std::string& id = cols[0];
        // Skip multiword-token ranges and empty nodes.
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;
        int head;
        try {
            std::size_t idx = std::stoul(id);
            if (idx != current.tokens.size() + 1) {
                throw ValidationError(where + ": line " + std::to_string(line_no) +
                                      ": non-consecutive token id " + id);
            }
            head = cols[6] == "_" ? 0 : std::stoi(cols[6]);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError(where + ": line " + std::to_string(line_no) + ": bad ID/HEAD field");
        }
        Token t;
        t.surface = cols[1];
        t.lemma = cols[2] == "_" ? cols[1] : cols[2];
        t.head = head == 0 ? kRootHead : head - 1;
        t.deprel = cols[7];
        current.tokens.push_back(std::move(t));
    }
    flush();
    return sentences;
}

std::vector<ConlluSentence> read_conllu_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open parse file: " + path);
    return read_conllu(in, path);
}

std::vector<std::string> read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open corpus file: " + path);
    bool jsonl = has_suffix(path, ".jsonl") || has_suffix(path, ".json");
    std::vector<std::string> texts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (jsonl) {
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("text") || !j["text"].is_string()) {
                throw ValidationError(path + ": line " + std::to_string(line_no) +
                                      ": expected JSONL object with a \"text\" string");
            }
            texts.push_back(j["text"].get<std::string>());
        } else {
            texts.push_back(line);
        }
    }
    return texts;
}

std::vector<ParsedSentence> align_corpus(const std::vector<std::string>& texts,
                                         const std::vector<ConlluSentence>& parses,
                                         const std::string& where) {
    if (texts.size() != parses.size()) {
        throw ValidationError(where + ": corpus has " + std::to_string(texts.size()) +
                              " sentences but parse file has " + std::to_string(parses.size()));
    }
    std::vector<ParsedSentence> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out.push_back(make_parsed_sentence(texts[i], parses[i].tokens,
                                           where + ": sentence " + std::to_string(i + 1)));
    }
    return out;
}

} // namespace rcprobe::extraction
