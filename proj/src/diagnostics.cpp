#include "rcprobe/diagnostics.hpp"

#include <algorithm>
#include <fstream>

#include "rcprobe/digest.hpp"
#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::diagnostics {

const char* to_string(AntecedentKind k) { return k == AntecedentKind::nominal ? "nominal" : "clausal"; }

namespace {

struct BaseSentence {
    AntecedentKind kind;
    bool reconstructed; // false for the published "debate" family
    // Sentence pieces around the relativizer; cases splice into these.
    std::string before;      // text before the antecedent-adjacent position
    std::string intervening; // case-2 modifier (follows the antecedent)
    int intervening_words;
    std::string case3_adverbial; // exactly three words, between relativizer and verb
    std::string attractor;       // case-5 by-phrase
    std::string verb_on;         // RC verb + continuation
    std::string verb_on_case3;   // continuation for case 3 when it differs
    std::string rc_verb;
};

std::vector<DiagnosticSentence> expand(const BaseSentence& b) {
    std::vector<DiagnosticSentence> items;
    auto push = [&](int case_id, bool restrictive, const std::string& text,
                    std::optional<int> intervening) {
        DiagnosticSentence s;
        s.text = text;
        s.case_id = case_id;
        s.antecedent_kind = b.kind;
        s.restrictive = restrictive;
        s.intervening_words = intervening;
        s.expected_acceptable = case_id <= 3;
        s.reconstructed = b.reconstructed;
        s.rc_verb = b.rc_verb;
        items.push_back(std::move(s));
    };

    const std::string comma = ", ";
    const std::string space = " ";
    // case 1: adjacent antecedent and relativizer
    push(1, true, b.before + space + "which " + b.verb_on, std::nullopt);
    push(1, false, b.before + comma + "which " + b.verb_on, std::nullopt);
    // case 2: intervening phrase between antecedent and relativizer
    push(2, true, b.before + space + b.intervening + space + "which " + b.verb_on,
         b.intervening_words);
    push(2, false, b.before + space + b.intervening + comma + "which " + b.verb_on,
         b.intervening_words);
    // case 3: three words between relativizer and RC verb
    const std::string& verb3 = b.verb_on_case3.empty() ? b.verb_on : b.verb_on_case3;
    push(3, true, b.before + space + "which " + b.case3_adverbial + space + verb3, std::nullopt);
    push(3, false, b.before + comma + "which " + b.case3_adverbial + space + verb3, std::nullopt);
    // case 4: wrong agreement, adjacent
    push(4, true, b.before + space + "who " + b.verb_on, std::nullopt);
    // case 5: agreement attractor
    push(5, true, b.before + space + b.attractor + space + "who " + b.verb_on, std::nullopt);
    return items;
}

} // namespace

std::vector<DiagnosticSentence> load_builtin_suite() {
    std::vector<BaseSentence> bases;
    // Published "debate" family; the remaining three families are authored.
    bases.push_back({AntecedentKind::nominal, false, "We just heard a debate",
                     "on one of the most famous television channels", 7, "in many regards",
                     "by DeGeneres", "was about the differences in wage rates.",
                     "was an important one about the differences in wage rates.", "was"});
    bases.push_back({AntecedentKind::nominal, true, "The committee rejected a proposal",
                     "from the review panel", 3, "after much deliberation", "by Johnson",
                     "was submitted by the youngest member.", "", "was"});
    bases.push_back({AntecedentKind::nominal, true, "She finally read the letter",
                     "from her eldest sister in Maine", 5, "against all odds", "by Margaret",
                     "had arrived two weeks earlier.", "", "had"});
    bases.push_back({AntecedentKind::clausal, true, "They canceled the picnic",
                     "at the very last minute", 4, "in all honesty", "by the organizers",
                     "was a shame for everyone involved.", "", "was"});

    std::vector<DiagnosticSentence> suite;
    for (const BaseSentence& b : bases) {
        std::vector<DiagnosticSentence> items = expand(b);
        suite.insert(suite.end(), items.begin(), items.end());
    }
    validate_suite(suite, "builtin suite");
    return suite;
}

void validate_suite(const std::vector<DiagnosticSentence>& suite, const std::string& where) {
    auto fail = [&](std::size_t i, const std::string& msg) {
        throw ValidationError(where + ": item " + std::to_string(i + 1) + ": " + msg);
    };
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const DiagnosticSentence& s = suite[i];
        if (s.text.empty()) fail(i, "empty text");
        if (s.case_id < 1 || s.case_id > 5) fail(i, "case must be 1..5");
        if (s.case_id <= 3 && !s.expected_acceptable) fail(i, "cases 1-3 must be expected acceptable");
        if (s.case_id >= 4) {
            if (s.expected_acceptable) fail(i, "cases 4-5 must be expected unacceptable");
            if (!s.restrictive) fail(i, "cases 4-5 exist only in the restrictive variant");
        }
        if (s.intervening_words) {
            if (s.case_id != 2) fail(i, "intervening_words is only valid for case 2");
            if (*s.intervening_words < 3 || *s.intervening_words > 7) {
                fail(i, "intervening_words must be in 3..7");
            }
        } else if (s.case_id == 2) {
            fail(i, "case 2 requires intervening_words");
        }
        if (s.case_id == 3 && !s.rc_verb.empty()) {
            // Exactly three words between the relativizer and the RC verb.
            std::vector<std::string> words = text::words(s.text);
            std::string verb = text::to_lower(s.rc_verb);
            int rel = -1, verb_idx = -1;
            for (std::size_t w = 0; w < words.size(); ++w) {
                std::string lw = text::to_lower(words[w]);
                if (rel < 0 && (lw == "which" || lw == "who" || lw == "whom" || lw == "that")) {
                    rel = static_cast<int>(w);
                } else if (rel >= 0 && verb_idx < 0 && lw == verb) {
                    verb_idx = static_cast<int>(w);
                }
            }
            if (rel < 0 || verb_idx < 0) fail(i, "relativizer or rc_verb not found in text");
            if (verb_idx - rel - 1 != 3) {
                fail(i, "case 3 requires exactly three words between relativizer and RC verb, found " +
                            std::to_string(verb_idx - rel - 1));
            }
        }
    }
}

nlohmann::json suite_item_to_json(const DiagnosticSentence& s) {
    nlohmann::json j{{"text", s.text},
                     {"case", s.case_id},
                     {"antecedent_kind", to_string(s.antecedent_kind)},
                     {"restrictive", s.restrictive},
                     {"expected_acceptable", s.expected_acceptable},
                     {"reconstructed", s.reconstructed}};
    if (s.intervening_words) j["intervening_words"] = *s.intervening_words;
    if (!s.rc_verb.empty()) j["rc_verb"] = s.rc_verb;
    return j;
}

std::vector<DiagnosticSentence> read_suite_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open suite file: " + path);
    std::vector<DiagnosticSentence> suite;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": invalid JSON");
        }
        try {
            DiagnosticSentence s;
            s.text = j.at("text").get<std::string>();
            s.case_id = j.at("case").get<int>();
            std::string kind = j.at("antecedent_kind").get<std::string>();
            if (kind == "nominal") {
                s.antecedent_kind = AntecedentKind::nominal;
            } else if (kind == "clausal") {
                s.antecedent_kind = AntecedentKind::clausal;
            } else {
                throw ValidationError("unknown antecedent_kind: " + kind);
            }
            s.restrictive = j.at("restrictive").get<bool>();
            if (j.contains("intervening_words") && !j.at("intervening_words").is_null()) {
                s.intervening_words = j.at("intervening_words").get<int>();
            }
            s.expected_acceptable = j.at("expected_acceptable").get<bool>();
            s.reconstructed = j.value("reconstructed", true);
            s.rc_verb = j.value("rc_verb", "");
            suite.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate_suite(suite, path);
    return suite;
}

std::string suite_digest(const std::vector<DiagnosticSentence>& suite) {
    digest::Sha256 h;
    for (const DiagnosticSentence& s : suite) {
        h.update(suite_item_to_json(s).dump());
        h.update("\n");
    }
    return h.hex();
}

DiagnosticReport evaluate_suite(const probing::LinearProbe& probe, backends::Backend& backend,
                                const std::vector<DiagnosticSentence>& suite,
                                const backends::PoolingOptions& popts) {
    DiagnosticReport r;
    r.suite_sha256 = suite_digest(suite);
    r.backend = backend.info();
    r.probe_layer = probe.layer;
    r.pooling = probe.pooling;

    r.logits.reserve(suite.size());
    for (const DiagnosticSentence& s : suite) {
        backends::TokenizedSentence tok = backend.tokenize(s.text);
        backends::LayerEmbeddings emb = backend.embed_layers(s.text);
        backends::SentenceVector v = backends::pool(emb, probe.layer, probe.pooling, tok, popts);
        r.logits.push_back(probing::probe_logit(probe, v.values));
    }

    struct Agg {
        double sum = 0.0;
        std::size_t n = 0;
    };
    std::map<std::tuple<int, std::string, bool>, Agg> cells;
    std::map<int, std::pair<std::size_t, std::size_t>> case_counts; // correct, total
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const DiagnosticSentence& s = suite[i];
        double logit = r.logits[i];
        Agg& a = cells[{s.case_id, to_string(s.antecedent_kind), s.restrictive}];
        a.sum += logit;
        a.n += 1;
        if (s.case_id == 2 && s.intervening_words) {
            std::string bucket = *s.intervening_words <= 4 ? "3-4 words" : ">4 words";
            Agg& b = cells[{2, bucket, s.restrictive}];
            b.sum += logit;
            b.n += 1;
        }
        auto& [correct, total] = case_counts[s.case_id];
        ++total;
        bool predicted = logit > 0.0;
        if (predicted == s.expected_acceptable) ++correct;
    }
    for (const auto& [key, agg] : cells) {
        DiagnosticCell c;
        c.case_id = std::get<0>(key);
        c.factor = std::get<1>(key);
        c.restrictive = std::get<2>(key);
        c.mean_logit = agg.sum / static_cast<double>(agg.n);
        c.count = agg.n;
        r.cells.push_back(std::move(c));
    }
    for (const auto& [case_id, ct] : case_counts) {
        r.accuracy_by_case[case_id] =
            static_cast<double>(ct.first) / static_cast<double>(ct.second);
    }
    return r;
}

nlohmann::json diagnostic_report_to_json(const DiagnosticReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const DiagnosticCell& c : r.cells) {
        cells.push_back({{"case", c.case_id},
                         {"factor", c.factor},
                         {"restrictive", c.restrictive},
                         {"mean_logit", c.mean_logit},
                         {"count", c.count}});
    }
    nlohmann::json acc = nlohmann::json::object();
    for (const auto& [case_id, a] : r.accuracy_by_case) acc[std::to_string(case_id)] = a;
    return nlohmann::json{{"suite_sha256", r.suite_sha256},
                          {"backend",
                           {{"name", r.backend.name},
                            {"kind", r.backend.kind},
                            {"checkpoint", r.backend.checkpoint},
                            {"revision", r.backend.revision},
                            {"tokenizer", r.backend.tokenizer}}},
                          {"probe_layer", r.probe_layer},
                          {"pooling", backends::to_string(r.pooling)},
                          {"cells", std::move(cells)},
                          {"accuracy_by_case", std::move(acc)},
                          {"logits", r.logits}};
}

std::string diagnostic_report_to_csv(const DiagnosticReport& r) {
    // One row per case x factor; restrictive and non-restrictive as columns.
    std::map<std::pair<int, std::string>, std::pair<std::optional<double>, std::optional<double>>> rows;
    for (const DiagnosticCell& c : r.cells) {
        auto& row = rows[{c.case_id, c.factor}];
        (c.restrictive ? row.first : row.second) = c.mean_logit;
    }
    std::string csv = "case,factor,restrictive,non_restrictive\n";
    for (const auto& [key, row] : rows) {
        csv += std::to_string(key.first) + "," + key.second + ",";
        if (row.first) csv += std::to_string(*row.first);
        csv += ",";
        if (row.second) csv += std::to_string(*row.second);
        csv += "\n";
    }
    return csv;
}

} // namespace rcprobe::diagnostics
