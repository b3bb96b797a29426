#include "rcprobe/pair_forge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::pairs {

using extraction::RCRecord;
using extraction::RelativizerForm;

const char* to_string(ModKind k) {
    switch (k) {
        case ModKind::none: return "none";
        case ModKind::relativizer_omission: return "relativizer_omission";
        case ModKind::who_to_which: return "who_to_which";
        case ModKind::which_to_who: return "which_to_who";
        case ModKind::which_to_that: return "which_to_that";
    }
    return "?";
}

std::optional<ModKind> mod_kind_from_string(const std::string& s) {
    if (s == "none") return ModKind::none;
    if (s == "relativizer_omission") return ModKind::relativizer_omission;
    if (s == "who_to_which") return ModKind::who_to_which;
    if (s == "which_to_who") return ModKind::which_to_who;
    if (s == "which_to_that") return ModKind::which_to_that;
    return std::nullopt;
}

std::vector<Modification> applicable_modifications(bool animate, bool restrictive, bool subjrc,
                                                   LabelMode mode) {
    std::vector<Modification> mods;
    mods.push_back({ModKind::none, true});
    bool omission_ok = mode == LabelMode::main_text ? (restrictive && !subjrc)
                                                    : (animate && restrictive && !subjrc);
    mods.push_back({ModKind::relativizer_omission, omission_ok});
    if (animate) {
        mods.push_back({ModKind::who_to_which, false});
    } else {
        mods.push_back({ModKind::which_to_who, false});
        if (restrictive) mods.push_back({ModKind::which_to_that, true});
    }
    return mods;
}

bool form_compatible(ModKind kind, RelativizerForm form) {
    switch (kind) {
        case ModKind::none:
        case ModKind::relativizer_omission: return true;
        case ModKind::who_to_which:
            return form == RelativizerForm::who || form == RelativizerForm::whom;
        case ModKind::which_to_who:
        case ModKind::which_to_that: return form == RelativizerForm::which;
    }
    return false;
}

namespace {

std::string substitute_relativizer(const RCRecord& r, const std::string& replacement) {
    const extraction::Token& tok = r.sentence.tokens[r.relativizer_idx];
    std::string cased = text::match_casing(tok.surface, replacement);
    std::string out = r.sentence.text;
    out.replace(tok.begin, tok.end - tok.begin, cased);
    return out;
}

std::string omit_relativizer(const RCRecord& r) {
    const extraction::Token& tok = r.sentence.tokens[r.relativizer_idx];
    const std::string& src = r.sentence.text;
    std::size_t begin = tok.begin;
    std::size_t end = tok.end;
    if (begin > 0 && src[begin - 1] == ' ') {
        --begin;
    } else if (end < src.size() && src[end] == ' ') {
        ++end;
    }
    std::string out = src;
    out.erase(begin, end - begin);
    return out;
}

} // namespace

DatasetSample apply_modification(const RCRecord& record, const Modification& mod, LabelMode mode) {
    std::vector<Modification> applicable =
        applicable_modifications(record.animate, record.restrictive, record.subjrc, mode);
    auto it = std::find_if(applicable.begin(), applicable.end(),
                           [&](const Modification& m) { return m.kind == mod.kind; });
    if (it == applicable.end() || it->label != mod.label) {
        throw ParadigmMismatchError(std::string("modification ") + to_string(mod.kind) +
                                    " is not in the paradigm for this record");
    }
    if (!form_compatible(mod.kind, record.relativizer_form)) {
        throw ParadigmMismatchError(std::string("modification ") + to_string(mod.kind) +
                                    " does not match relativizer form " +
                                    extraction::to_string(record.relativizer_form));
    }

    DatasetSample s;
    switch (mod.kind) {
        case ModKind::none: s.text = record.sentence.text; break;
        case ModKind::relativizer_omission: s.text = omit_relativizer(record); break;
        case ModKind::who_to_which: s.text = substitute_relativizer(record, "which"); break;
        case ModKind::which_to_who: s.text = substitute_relativizer(record, "who"); break;
        case ModKind::which_to_that: s.text = substitute_relativizer(record, "that"); break;
    }
    s.label = mod.label;
    s.modification = mod.kind;
    s.animate = record.animate;
    s.restrictive = record.restrictive;
    s.subjrc = record.subjrc;
    s.relativizer_form = record.relativizer_form;
    s.source_id = record.source_id;
    return s;
}

Bag make_bag(const RCRecord& record, LabelMode mode) {
    Bag bag;
    bag.source_id = record.source_id;
    for (const Modification& m :
         applicable_modifications(record.animate, record.restrictive, record.subjrc, mode)) {
        if (!form_compatible(m.kind, record.relativizer_form)) continue;
        bag.samples.push_back(apply_modification(record, m, mode));
    }
    return bag;
}

SampledDataset sample_balanced(const std::vector<Bag>& bags, std::uint64_t seed) {
    text::Rng rng(seed);
    // Bags offering a single label force their contribution; handling them
    // before the flexible bags lets the greedy rule repair the running
    // balance whenever balance is attainable at all.
    std::vector<std::size_t> order;
    order.reserve(bags.size());
    for (int forced_pass = 1; forced_pass >= 0; --forced_pass) {
        for (std::size_t b = 0; b < bags.size(); ++b) {
            if (bags[b].samples.empty()) {
                throw ValidationError("empty bag for source " + std::to_string(bags[b].source_id));
            }
            bool has_true = false, has_false = false;
            for (const DatasetSample& s : bags[b].samples) (s.label ? has_true : has_false) = true;
            bool forced = !(has_true && has_false);
            if (forced == (forced_pass == 1)) order.push_back(b);
        }
    }

    std::vector<std::size_t> choice(bags.size());
    std::size_t n_true = 0, n_false = 0;
    std::vector<std::size_t> pool;
    for (std::size_t b : order) {
        const Bag& bag = bags[b];
        pool.clear();
        if (n_true != n_false) {
            bool want = n_true < n_false;
            for (std::size_t i = 0; i < bag.samples.size(); ++i) {
                if (bag.samples[i].label == want) pool.push_back(i);
            }
        }
        if (pool.empty()) {
            for (std::size_t i = 0; i < bag.samples.size(); ++i) pool.push_back(i);
        }
        choice[b] = pool[rng.bounded(pool.size())];
        (bag.samples[choice[b]].label ? n_true : n_false)++;
    }

    SampledDataset out;
    out.samples.reserve(bags.size());
    for (std::size_t b = 0; b < bags.size(); ++b) out.samples.push_back(bags[b].samples[choice[b]]);
    std::size_t diff = n_true > n_false ? n_true - n_false : n_false - n_true;
    out.infeasible_balance = diff > bags.size() % 2;
    return out;
}

void split_samples(std::vector<DatasetSample>& samples, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("test_fraction must be in (0, 1)");
    }
    // Group indices by source_id, in order of first appearance.
    std::vector<std::uint64_t> group_ids;
    std::map<std::uint64_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto [it, inserted] = groups.try_emplace(samples[i].source_id);
        if (inserted) group_ids.push_back(samples[i].source_id);
        it->second.push_back(i);
    }

    std::size_t n = samples.size();
    std::size_t n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    std::size_t quota_true = n_test / 2;
    std::size_t quota_false = n_test - quota_true;

    text::Rng rng(seed);
    for (std::size_t i = group_ids.size(); i > 1; --i) {
        std::swap(group_ids[i - 1], group_ids[rng.bounded(i)]);
    }

    for (DatasetSample& s : samples) s.split = Split::train;
    for (std::uint64_t gid : group_ids) {
        const std::vector<std::size_t>& members = groups[gid];
        std::size_t g_true = 0, g_false = 0;
        for (std::size_t i : members) (samples[i].label ? g_true : g_false)++;
        if (g_true <= quota_true && g_false <= quota_false && (g_true || g_false)) {
            for (std::size_t i : members) samples[i].split = Split::test;
            quota_true -= g_true;
            quota_false -= g_false;
        }
        if (quota_true == 0 && quota_false == 0) break;
    }
}

nlohmann::json dataset_stats(const std::vector<DatasetSample>& samples) {
    auto split_block = [&](Split split) {
        nlohmann::json mods = nlohmann::json::object();
        std::size_t total = 0, acc1 = 0, ani1 = 0, res1 = 0;
        for (ModKind k : {ModKind::none, ModKind::relativizer_omission, ModKind::who_to_which,
                          ModKind::which_to_who, ModKind::which_to_that}) {
            std::size_t c0 = 0, c1 = 0;
            for (const DatasetSample& s : samples) {
                if (s.split != split || s.modification != k) continue;
                (s.label ? c1 : c0)++;
            }
            mods[to_string(k)] = {{"unacceptable", c0}, {"acceptable", c1}};
        }
        for (const DatasetSample& s : samples) {
            if (s.split != split) continue;
            ++total;
            if (s.label) ++acc1;
            if (s.animate) ++ani1;
            if (s.restrictive) ++res1;
        }
        return nlohmann::json{{"total", total},
                              {"acceptable", {{"0", total - acc1}, {"1", acc1}}},
                              {"animate", {{"0", total - ani1}, {"1", ani1}}},
                              {"restrictive", {{"0", total - res1}, {"1", res1}}},
                              {"by_modification", std::move(mods)}};
    };
    return nlohmann::json{{"train", split_block(Split::train)}, {"test", split_block(Split::test)}};
}

nlohmann::json sample_to_json(const DatasetSample& s) {
    return nlohmann::json{{"text", s.text},
                          {"label", s.label},
                          {"modification", to_string(s.modification)},
                          {"animate", s.animate},
                          {"restrictive", s.restrictive},
                          {"subjrc", s.subjrc},
                          {"relativizer_form", extraction::to_string(s.relativizer_form)},
                          {"source_id", s.source_id},
                          {"split", s.split == Split::test ? "test" : "train"}};
}

DatasetSample sample_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        DatasetSample s;
        s.text = j.at("text").get<std::string>();
        s.label = j.at("label").get<bool>();
        std::optional<ModKind> kind = mod_kind_from_string(j.at("modification").get<std::string>());
        if (!kind) throw ValidationError("unknown modification kind");
        s.modification = *kind;
        s.animate = j.at("animate").get<bool>();
        s.restrictive = j.at("restrictive").get<bool>();
        s.subjrc = j.at("subjrc").get<bool>();
        std::optional<extraction::RelativizerForm> form =
            extraction::relativizer_from_word(j.at("relativizer_form").get<std::string>());
        if (!form) throw ValidationError("unknown relativizer_form");
        s.relativizer_form = *form;
        s.source_id = j.at("source_id").get<std::uint64_t>();
        std::string split = j.at("split").get<std::string>();
        if (split == "train") {
            s.split = Split::train;
        } else if (split == "test") {
            s.split = Split::test;
        } else {
            throw ValidationError("unknown split: " + split);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(where + ": bad sample JSON: " + e.what());
    }
}

void write_samples_jsonl(const std::string& path, const std::vector<DatasetSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (const DatasetSample& s : samples) out << sample_to_json(s).dump() << "\n";
}

std::vector<DatasetSample> read_samples_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path);
    std::vector<DatasetSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": invalid JSON");
        }
        samples.push_back(sample_from_json(j, path + ": line " + std::to_string(line_no)));
    }
    return samples;
}

} // namespace rcprobe::pairs
