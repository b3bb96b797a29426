#include "rcprobe/extraction.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::extraction {

const char* to_string(RelativizerForm f) {
    switch (f) {
        case RelativizerForm::who: return "who";
        case RelativizerForm::whom: return "whom";
        case RelativizerForm::whose: return "whose";
        case RelativizerForm::which: return "which";
        case RelativizerForm::that: return "that";
    }
    return "?";
}

std::optional<RelativizerForm> relativizer_from_word(const std::string& w) {
    if (w == "who") return RelativizerForm::who;
    if (w == "whom") return RelativizerForm::whom;
    if (w == "whose") return RelativizerForm::whose;
    if (w == "which") return RelativizerForm::which;
    if (w == "that") return RelativizerForm::that;
    return std::nullopt;
}

const std::vector<std::string>& relativizer_words() {
    static const std::vector<std::string> kWords{"who", "whom", "whose", "which", "that"};
    return kWords;
}

bool filter_single_pronoun(const std::string& sentence_text) {
    int count = 0;
    for (const std::string& w : text::words(sentence_text)) {
        if (relativizer_from_word(text::to_lower(w))) {
            if (++count > 1) return false;
        }
    }
    return count == 1;
}

namespace {

std::optional<int> unique_pronoun_index(const ParsedSentence& s) {
    std::optional<int> found;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (relativizer_from_word(text::to_lower(s[i].surface))) {
            if (found) return std::nullopt;
            found = static_cast<int>(i);
        }
    }
    return found;
}

} // namespace

std::optional<RCStructure> find_relative_clause(const ParsedSentence& parsed,
                                                const ExtractionConfig& cfg) {
    std::optional<int> pronoun = unique_pronoun_index(parsed);
    if (!pronoun) return std::nullopt;

    // Candidate RC verbs whose subtree contains the pronoun; with nested
    // relative clauses the innermost (smallest subtree) wins.
    std::optional<RCStructure> best;
    std::size_t best_size = 0;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (!cfg.rc_labels.count(parsed[i].deprel)) continue;
        if (parsed[i].head == kRootHead) continue; // no antecedent to attach to
        std::vector<int> sub = parsed.subtree(static_cast<int>(i));
        if (!std::binary_search(sub.begin(), sub.end(), *pronoun)) continue;
        int lo = sub.front();
        int hi = sub.back();
        if (static_cast<std::size_t>(hi - lo + 1) != sub.size()) continue; // non-contiguous span
        if (!best || sub.size() < best_size) {
            RCStructure rc;
            rc.rc_verb_idx = static_cast<int>(i);
            rc.antecedent_idx = parsed[i].head;
            rc.rc_span_begin = lo;
            rc.rc_span_end = hi + 1;
            rc.relativizer_idx = *pronoun;
            best = rc;
            best_size = sub.size();
        }
    }
    return best;
}

std::optional<RcRole> classify_role(const RCStructure& rc, const ParsedSentence& parsed,
                                    const ExtractionConfig& cfg) {
    const std::string& label = parsed[rc.relativizer_idx].deprel;
    if (cfg.subject_labels.count(label)) return RcRole::subject;
    if (cfg.object_labels.count(label)) return RcRole::object;
    return std::nullopt;
}

bool annotate_restrictive(const RCStructure& rc, const ParsedSentence& parsed) {
    if (rc.relativizer_idx <= 0) return true;
    return parsed[rc.relativizer_idx - 1].surface != ",";
}

AnimacyWordlists build_exclusive_wordlists(const std::vector<RCCandidate>& candidates) {
    std::set<std::string> with_who;
    std::set<std::string> with_which;
    for (const RCCandidate& c : candidates) {
        if (c.form == RelativizerForm::who || c.form == RelativizerForm::whom) {
            with_who.insert(c.antecedent_lemma);
        } else if (c.form == RelativizerForm::which) {
            with_which.insert(c.antecedent_lemma);
        }
    }
    AnimacyWordlists lists;
    for (const std::string& l : with_who) {
        if (!with_which.count(l)) lists.who_exclusive.insert(l);
    }
    for (const std::string& l : with_which) {
        if (!with_who.count(l)) lists.which_exclusive.insert(l);
    }
    return lists;
}

std::optional<bool> annotate_animacy(RelativizerForm form, const std::string& antecedent_lemma,
                                     const AnimacyWordlists& lists) {
    switch (form) {
        case RelativizerForm::who:
        case RelativizerForm::whom: return true;
        case RelativizerForm::which: return false;
        case RelativizerForm::that:
            if (lists.who_exclusive.count(antecedent_lemma)) return true;
            if (lists.which_exclusive.count(antecedent_lemma)) return false;
            return std::nullopt;
        case RelativizerForm::whose: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<RCRecord> extract_records(const std::vector<ParsedSentence>& parsed,
                                      const ExtractionConfig& cfg, ExtractionStats* stats,
                                      AnimacyWordlists* lists_out) {
    ExtractionStats local;
    local.sentences = parsed.size();

    std::vector<RCCandidate> candidates;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        const ParsedSentence& s = parsed[i];
        if (!filter_single_pronoun(s.text)) {
            ++local.failed_pronoun_filter;
            continue;
        }
        std::optional<RCStructure> rc = find_relative_clause(s, cfg);
        if (!rc) {
            ++local.no_relative_clause;
            continue;
        }
        std::optional<RcRole> role = classify_role(*rc, s, cfg);
        if (!role) {
            ++local.role_discarded;
            continue;
        }
        RCCandidate c;
        c.source_id = i + 1;
        c.sentence = s;
        c.structure = *rc;
        c.role = *role;
        c.restrictive = annotate_restrictive(*rc, s);
        c.form = *relativizer_from_word(text::to_lower(s[rc->relativizer_idx].surface));
        c.antecedent_lemma = text::to_lower(s[rc->antecedent_idx].lemma);
        candidates.push_back(std::move(c));
    }

    AnimacyWordlists lists = build_exclusive_wordlists(candidates);

    std::vector<RCRecord> records;
    for (RCCandidate& c : candidates) {
        std::optional<bool> animate = annotate_animacy(c.form, c.antecedent_lemma, lists);
        if (!animate) {
            ++local.animacy_discarded;
            continue;
        }
        RCRecord r;
        r.source_id = c.source_id;
        r.sentence = std::move(c.sentence);
        r.relativizer_idx = c.structure.relativizer_idx;
        r.antecedent_idx = c.structure.antecedent_idx;
        r.rc_verb_idx = c.structure.rc_verb_idx;
        r.rc_span_begin = c.structure.rc_span_begin;
        r.rc_span_end = c.structure.rc_span_end;
        r.animate = *animate;
        r.restrictive = c.restrictive;
        r.subjrc = c.role == RcRole::subject;
        r.relativizer_form = c.form;
        records.push_back(std::move(r));
    }
    local.emitted = records.size();

    if (stats) *stats = local;
    if (lists_out) *lists_out = std::move(lists);
    return records;
}

nlohmann::json record_to_json(const RCRecord& r) {
    nlohmann::json toks = nlohmann::json::array();
    for (const Token& t : r.sentence.tokens) {
        toks.push_back({{"surface", t.surface},
                        {"lemma", t.lemma},
                        {"head", t.head},
                        {"deprel", t.deprel},
                        {"begin", t.begin},
                        {"end", t.end}});
    }
    return nlohmann::json{{"source_id", r.source_id},
                          {"text", r.sentence.text},
                          {"tokens", std::move(toks)},
                          {"relativizer_idx", r.relativizer_idx},
                          {"antecedent_idx", r.antecedent_idx},
                          {"rc_verb_idx", r.rc_verb_idx},
                          {"rc_span", {r.rc_span_begin, r.rc_span_end}},
                          {"animate", r.animate},
                          {"restrictive", r.restrictive},
                          {"subjrc", r.subjrc},
                          {"relativizer_form", to_string(r.relativizer_form)}};
}

RCRecord record_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        RCRecord r;
        r.source_id = j.at("source_id").get<std::uint64_t>();
        std::vector<Token> tokens;
        for (const nlohmann::json& tj : j.at("tokens")) {
            Token t;
            t.surface = tj.at("surface").get<std::string>();
            t.lemma = tj.at("lemma").get<std::string>();
            t.head = tj.at("head").get<int>();
            t.deprel = tj.at("deprel").get<std::string>();
            t.begin = tj.at("begin").get<std::size_t>();
            t.end = tj.at("end").get<std::size_t>();
            tokens.push_back(std::move(t));
        }
        r.sentence = make_parsed_sentence(j.at("text").get<std::string>(), std::move(tokens), where);
        r.relativizer_idx = j.at("relativizer_idx").get<int>();
        r.antecedent_idx = j.at("antecedent_idx").get<int>();
        r.rc_verb_idx = j.at("rc_verb_idx").get<int>();
        r.rc_span_begin = j.at("rc_span").at(0).get<int>();
        r.rc_span_end = j.at("rc_span").at(1).get<int>();
        r.animate = j.at("animate").get<bool>();
        r.restrictive = j.at("restrictive").get<bool>();
        r.subjrc = j.at("subjrc").get<bool>();
        std::optional<RelativizerForm> form =
            relativizer_from_word(j.at("relativizer_form").get<std::string>());
        if (!form) throw ValidationError("unknown relativizer_form");
        r.relativizer_form = *form;
        int n = static_cast<int>(r.sentence.size());
        if (r.relativizer_idx < 0 || r.relativizer_idx >= n || r.antecedent_idx < 0 ||
            r.antecedent_idx >= n || r.rc_span_begin < 0 || r.rc_span_end > n ||
            r.rc_span_begin > r.relativizer_idx || r.relativizer_idx >= r.rc_span_end) {
            throw ValidationError("record indices out of range");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(where + ": bad record JSON: " + e.what());
    }
}

void write_records_jsonl(const std::string& path, const std::vector<RCRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (const RCRecord& r : records) out << record_to_json(r).dump() << "\n";
}

std::vector<RCRecord> read_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open records file: " + path);
    std::vector<RCRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": invalid JSON");
        }
        records.push_back(record_from_json(j, path + ": line " + std::to_string(line_no)));
    }
    return records;
}

} // namespace rcprobe::extraction
