#include "rcprobe/cloze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::cloze {

using extraction::RCRecord;
using extraction::RelativizerForm;

const char* to_string(TargetKind k) {
    return k == TargetKind::relativizer ? "relativizer" : "antecedent";
}

std::optional<ClozeInstance> make_cloze(const RCRecord& record, TargetKind kind,
                                        backends::Backend& backend, std::size_t* skipped_multipiece,
                                        std::size_t* excluded_nonrestrictive) {
    if (!record.restrictive) {
        if (excluded_nonrestrictive) ++*excluded_nonrestrictive;
        return std::nullopt;
    }
    int target_idx = kind == TargetKind::relativizer ? record.relativizer_idx : record.antecedent_idx;
    const extraction::Token& tok = record.sentence.tokens[target_idx];
    if (backend.piece_count(tok.surface) != 1) {
        if (skipped_multipiece) ++*skipped_multipiece;
        return std::nullopt;
    }
    ClozeInstance inst;
    inst.text_with_mask = record.sentence.text;
    inst.text_with_mask.replace(tok.begin, tok.end - tok.begin, "[MASK]");
    inst.target = tok.surface;
    inst.target_kind = kind;
    inst.subjrc = record.subjrc;
    inst.relativizer_form = record.relativizer_form;
    inst.source_id = record.source_id;
    return inst;
}

std::size_t target_rank(const backends::MaskedDistribution& d, const std::string& target,
                        TargetKind kind) {
    bool fold = kind == TargetKind::relativizer; // closed class, case-insensitive
    std::string needle = fold ? text::to_lower(target) : target;
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
        const std::string& item = d.entries[i].item;
        if (fold ? text::to_lower(item) == needle : item == needle) return i + 1;
    }
    throw ValidationError("target \"" + target + "\" is not in the backend vocabulary");
}

double mp_at_1(const std::vector<ClozeResult>& results) {
    if (results.empty()) throw ValidationError("mp_at_1 over an empty result set");
    std::size_t hits = 0;
    for (const ClozeResult& r : results) {
        if (r.distribution.entries.empty()) throw ValidationError("empty distribution");
        bool fold = r.target_kind == TargetKind::relativizer;
        const std::string& top = r.distribution.entries.front().item;
        if (fold ? text::to_lower(top) == text::to_lower(r.target) : top == r.target) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

double mtr(const std::vector<ClozeResult>& results) {
    if (results.empty()) throw ValidationError("mtr over an empty result set");
    double sum = 0.0;
    for (const ClozeResult& r : results) {
        sum += static_cast<double>(target_rank(r.distribution, r.target, r.target_kind));
    }
    return sum / static_cast<double>(results.size());
}

double nme(const std::vector<ClozeResult>& results) {
    if (results.empty()) throw ValidationError("nme over an empty result set");
    double sum = 0.0;
    for (const ClozeResult& r : results) {
        if (r.distribution.vocab_size == 0) throw ValidationError("zero-size vocabulary");
        double h = 0.0;
        for (const backends::DistributionEntry& e : r.distribution.entries) {
            if (e.prob > 0.0) h -= e.prob * std::log(e.prob);
        }
        double denom = std::log(static_cast<double>(r.distribution.vocab_size));
        // H <= ln(V) exactly; clamp away float round-off so the result stays
        // in [0, 1].
        double normalized = h == 0.0 ? 0.0 : std::min(1.0, std::max(0.0, h / denom));
        sum += normalized;
    }
    return sum / static_cast<double>(results.size());
}

double relativizer_ratio(const std::vector<ClozeResult>& results) {
    if (results.empty()) throw ValidationError("relativizer_ratio over an empty result set");
    std::size_t hits = 0;
    for (const ClozeResult& r : results) {
        if (r.distribution.entries.empty()) throw ValidationError("empty distribution");
        if (extraction::relativizer_from_word(text::to_lower(r.distribution.entries.front().item))) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

namespace {

std::string cell_name(bool subjrc, RelativizerForm form) {
    return std::string(subjrc ? "subjRC" : "objRC") + "/" + extraction::to_string(form);
}

nlohmann::json metrics_to_json(const ClozeMetrics& m) {
    nlohmann::json j{{"mp_at_1", m.mp_at_1},
                     {"mtr", m.mtr},
                     {"nme", m.nme},
                     {"n_evaluated", m.n_evaluated},
                     {"n_skipped", m.n_skipped}};
    if (m.relativizer_ratio) j["relativizer_ratio"] = *m.relativizer_ratio;
    return j;
}

} // namespace

nlohmann::json cloze_report_to_json(const ClozeReport& r) {
    nlohmann::json cells = nlohmann::json::object();
    for (const auto& [key, m] : r.by_cell) cells[cell_name(key.first, key.second)] = metrics_to_json(m);
    return nlohmann::json{{"target_kind", to_string(r.target_kind)},
                          {"backend",
                           {{"name", r.backend.name},
                            {"kind", r.backend.kind},
                            {"checkpoint", r.backend.checkpoint},
                            {"revision", r.backend.revision},
                            {"tokenizer", r.backend.tokenizer}}},
                          {"by_cell", std::move(cells)},
                          {"overall", metrics_to_json(r.overall)},
                          {"excluded_nonrestrictive", r.excluded_nonrestrictive}};
}

std::string cloze_report_to_csv(const ClozeReport& r) {
    std::vector<std::pair<bool, RelativizerForm>> cols;
    for (const auto& [key, m] : r.by_cell) cols.push_back(key);
    // objRC block first, then subjRC, matching the table layout.
    std::stable_sort(cols.begin(), cols.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string csv = "metric";
    for (const auto& c : cols) csv += "," + cell_name(c.first, c.second);
    csv += "\n";
    auto row = [&](const std::string& name, auto getter) {
        csv += name;
        for (const auto& c : cols) {
            csv += ",";
            csv += getter(r.by_cell.at(c));
        }
        csv += "\n";
    };
    row("mp_at_1", [](const ClozeMetrics& m) { return std::to_string(m.mp_at_1); });
    row("mtr", [](const ClozeMetrics& m) { return std::to_string(m.mtr); });
    row("nme", [](const ClozeMetrics& m) { return std::to_string(m.nme); });
    if (r.target_kind == TargetKind::relativizer) {
        row("relativizer_ratio", [](const ClozeMetrics& m) {
            return m.relativizer_ratio ? std::to_string(*m.relativizer_ratio) : std::string();
        });
    }
    row("n_evaluated", [](const ClozeMetrics& m) { return std::to_string(m.n_evaluated); });
    row("n_skipped", [](const ClozeMetrics& m) { return std::to_string(m.n_skipped); });
    return csv;
}

nlohmann::json instance_to_json(const ClozeInstance& inst) {
    return nlohmann::json{{"text_with_mask", inst.text_with_mask},
                          {"target", inst.target},
                          {"target_kind", to_string(inst.target_kind)},
                          {"rc_type", inst.subjrc ? "subjRC" : "objRC"},
                          {"relativizer_form", extraction::to_string(inst.relativizer_form)},
                          {"source_id", inst.source_id}};
}

ClozeInstance instance_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        ClozeInstance inst;
        inst.text_with_mask = j.at("text_with_mask").get<std::string>();
        std::size_t first = inst.text_with_mask.find("[MASK]");
        if (first == std::string::npos ||
            inst.text_with_mask.find("[MASK]", first + 1) != std::string::npos) {
            throw ValidationError("text_with_mask must contain exactly one [MASK]");
        }
        inst.target = j.at("target").get<std::string>();
        std::string kind = j.at("target_kind").get<std::string>();
        if (kind == "relativizer") {
            inst.target_kind = TargetKind::relativizer;
        } else if (kind == "antecedent") {
            inst.target_kind = TargetKind::antecedent;
        } else {
            throw ValidationError("unknown target_kind: " + kind);
        }
        std::string rc = j.at("rc_type").get<std::string>();
        if (rc == "subjRC") {
            inst.subjrc = true;
        } else if (rc == "objRC") {
            inst.subjrc = false;
        } else {
            throw ValidationError("unknown rc_type: " + rc);
        }
        std::optional<RelativizerForm> form =
            extraction::relativizer_from_word(j.at("relativizer_form").get<std::string>());
        if (!form) throw ValidationError("unknown relativizer_form");
        inst.relativizer_form = *form;
        inst.source_id = j.at("source_id").get<std::uint64_t>();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(where + ": bad instance JSON: " + e.what());
    }
}

void write_instances_jsonl(const std::string& path, const std::vector<ClozeInstance>& instances) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (const ClozeInstance& inst : instances) out << instance_to_json(inst).dump() << "\n";
}

std::vector<ClozeInstance> read_instances_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instances file: " + path);
    std::vector<ClozeInstance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": invalid JSON");
        }
        out.push_back(instance_from_json(j, path + ": line " + std::to_string(line_no)));
    }
    return out;
}

const char* to_string(AntecedentType t) {
    switch (t) {
        case AntecedentType::identical: return "identical";
        case AntecedentType::synonym: return "synonym";
        case AntecedentType::hypernym: return "hypernym";
        case AntecedentType::hyponym: return "hyponym";
        case AntecedentType::unrelated: return "unrelated";
    }
    return "?";
}

std::optional<AntecedentType> antecedent_type_from_string(const std::string& s) {
    if (s == "identical") return AntecedentType::identical;
    if (s == "synonym") return AntecedentType::synonym;
    if (s == "hypernym") return AntecedentType::hypernym;
    if (s == "hyponym") return AntecedentType::hyponym;
    if (s == "unrelated") return AntecedentType::unrelated;
    return std::nullopt;
}

namespace {

bool parse_bool_field(const std::string& v, const std::string& path, std::size_t line_no) {
    std::string lv = text::to_lower(v);
    if (lv == "1" || lv == "true" || lv == "yes") return true;
    if (lv == "0" || lv == "false" || lv == "no") return false;
    throw ValidationError(path + ": line " + std::to_string(line_no) + ": bad boolean \"" + v + "\"");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::vector<QualitativeRecord> read_qualitative_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open annotation file: " + path);
    std::vector<QualitativeRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (cols.size() < 4 || cols[0] != "source_id") {
                throw ValidationError(path + ": expected header "
                                             "source_id,animacy,plausibility,grammaticality,antecedent_type");
            }
            continue;
        }
        if (cols.size() < 4) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": too few columns");
        }
        QualitativeRecord r;
        try {
            r.source_id = std::stoull(cols[0]);
        } catch (const std::exception&) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": bad source_id");
        }
        r.animacy = parse_bool_field(cols[1], path, line_no);
        r.plausibility = parse_bool_field(cols[2], path, line_no);
        r.grammaticality = parse_bool_field(cols[3], path, line_no);
        if (cols.size() >= 5 && !cols[4].empty()) {
            std::optional<AntecedentType> t = antecedent_type_from_string(cols[4]);
            if (!t) {
                throw ValidationError(path + ": line " + std::to_string(line_no) +
                                      ": unknown antecedent_type \"" + cols[4] + "\"");
            }
            r.antecedent_type = t;
        }
        records.push_back(r);
    }
    return records;
}

void validate_entailment(const std::vector<QualitativeRecord>& records) {
    std::string offenders;
    for (const QualitativeRecord& r : records) {
        if (r.plausibility && !r.grammaticality) {
            if (!offenders.empty()) offenders += ", ";
            offenders += std::to_string(r.source_id);
        }
    }
    if (!offenders.empty()) {
        throw ValidationError("plausibility entails grammaticality; violated by source_ids: " +
                              offenders);
    }
}

std::map<std::pair<bool, RelativizerForm>, QualitativeCell> aggregate_qualitative(
    const std::vector<QualitativeRecord>& records, const std::vector<ClozeInstance>& instances) {
    validate_entailment(records);
    std::map<std::uint64_t, std::pair<bool, RelativizerForm>> cell_of;
    for (const ClozeInstance& inst : instances) {
        cell_of[inst.source_id] = {inst.subjrc, inst.relativizer_form};
    }
    struct Acc {
        std::size_t an = 0, pl = 0, gr = 0, n = 0;
        std::map<AntecedentType, std::size_t> types;
        std::size_t typed = 0;
    };
    std::map<std::pair<bool, RelativizerForm>, Acc> acc;
    for (const QualitativeRecord& r : records) {
        auto it = cell_of.find(r.source_id);
        if (it == cell_of.end()) {
            throw ValidationError("annotation for unknown source_id " + std::to_string(r.source_id));
        }
        Acc& a = acc[it->second];
        ++a.n;
        if (r.animacy) ++a.an;
        if (r.plausibility) ++a.pl;
        if (r.grammaticality) ++a.gr;
        if (r.antecedent_type) {
            ++a.types[*r.antecedent_type];
            ++a.typed;
        }
    }
    std::map<std::pair<bool, RelativizerForm>, QualitativeCell> out;
    for (const auto& [key, a] : acc) {
        QualitativeCell c;
        c.count = a.n;
        c.animacy = static_cast<double>(a.an) / static_cast<double>(a.n);
        c.plausibility = static_cast<double>(a.pl) / static_cast<double>(a.n);
        c.grammaticality = static_cast<double>(a.gr) / static_cast<double>(a.n);
        if (a.typed > 0) {
            for (const auto& [t, n] : a.types) {
                c.antecedent_types[t] = static_cast<double>(n) / static_cast<double>(a.typed);
            }
        }
        out[key] = std::move(c);
    }
    return out;
}

nlohmann::json qualitative_to_json(
    const std::map<std::pair<bool, RelativizerForm>, QualitativeCell>& cells) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, c] : cells) {
        nlohmann::json types = nlohmann::json::object();
        for (const auto& [t, p] : c.antecedent_types) types[to_string(t)] = p;
        j[cell_name(key.first, key.second)] = {{"animacy", c.animacy},
                                               {"plausibility", c.plausibility},
                                               {"grammaticality", c.grammaticality},
                                               {"antecedent_types", std::move(types)},
                                               {"count", c.count}};
    }
    return j;
}

} // namespace rcprobe::cloze
