#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "rcprobe/error.hpp"
#include "rcprobe/pair_forge.hpp"

using namespace rcprobe;
using extraction::RCRecord;
using extraction::RelativizerForm;
using pairs::LabelMode;
using pairs::ModKind;
using pairs::Modification;

namespace {

std::map<ModKind, bool> label_table(bool animate, bool restrictive, bool subjrc, LabelMode mode) {
    std::map<ModKind, bool> t;
    for (const Modification& m : pairs::applicable_modifications(animate, restrictive, subjrc, mode)) {
        t[m.kind] = m.label;
    }
    return t;
}

RCRecord record_for(const testfix::ParadigmFixture& f, std::uint64_t id) {
    auto rc = extraction::find_relative_clause(f.parsed);
    REQUIRE(rc.has_value());
    RCRecord r;
    r.source_id = id;
    r.sentence = f.parsed;
    r.relativizer_idx = rc->relativizer_idx;
    r.antecedent_idx = rc->antecedent_idx;
    r.rc_verb_idx = rc->rc_verb_idx;
    r.rc_span_begin = rc->rc_span_begin;
    r.rc_span_end = rc->rc_span_end;
    r.animate = f.animate;
    r.restrictive = f.restrictive;
    r.subjrc = f.subjrc;
    r.relativizer_form = f.form;
    return r;
}

} // namespace

TEST_CASE("label table covers all eight paradigms exactly (both modes)") {
    // Exhaustive oracle over the 8 triples; kind=none is always acceptable,
    // substitutions carry fixed labels, omission depends on the mode.
    for (int a = 0; a <= 1; ++a) {
        for (int re = 0; re <= 1; ++re) {
            for (int s = 0; s <= 1; ++s) {
                for (LabelMode mode : {LabelMode::main_text, LabelMode::appendix}) {
                    CAPTURE(a);
                    CAPTURE(re);
                    CAPTURE(s);
                    auto t = label_table(a, re, s, mode);
                    CHECK(t.at(ModKind::none) == true);
                    bool omission_expected = mode == LabelMode::main_text
                                                 ? (re == 1 && s == 0)
                                                 : (a == 1 && re == 1 && s == 0);
                    CHECK(t.at(ModKind::relativizer_omission) == omission_expected);
                    if (a) {
                        CHECK(t.at(ModKind::who_to_which) == false);
                        CHECK_FALSE(t.count(ModKind::which_to_who));
                        CHECK_FALSE(t.count(ModKind::which_to_that));
                        CHECK(t.size() == 3);
                    } else {
                        CHECK(t.at(ModKind::which_to_who) == false);
                        CHECK_FALSE(t.count(ModKind::who_to_which));
                        if (re) {
                            CHECK(t.at(ModKind::which_to_that) == true);
                            CHECK(t.size() == 4);
                        } else {
                            CHECK_FALSE(t.count(ModKind::which_to_that));
                            CHECK(t.size() == 3);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("surface surgery reproduces the published minimal pairs") {
    auto fixtures = testfix::paradigm_fixtures();
    REQUIRE(fixtures.size() == 8);
    auto rec = [&](int i) { return record_for(fixtures[i], i + 1); };

    SUBCASE("who -> which keeps spacing and casing") {
        auto s = pairs::apply_modification(rec(0), {ModKind::who_to_which, false});
        CHECK(s.text == "Katrina Haus was a woman which sought to attract stares, not turn them away.");
        CHECK(s.label == false);
    }
    SUBCASE("omission removes the token plus one adjacent space") {
        auto s = pairs::apply_modification(rec(0), {ModKind::relativizer_omission, false});
        CHECK(s.text == "Katrina Haus was a woman sought to attract stares, not turn them away.");
        auto s2 = pairs::apply_modification(rec(1), {ModKind::relativizer_omission, true});
        CHECK(s2.text == "Two people I loved very much have left me .");
        CHECK(s2.label == true);
        auto s3 = pairs::apply_modification(rec(6), {ModKind::relativizer_omission, false});
        CHECK(s3.text == "I never saw a penny in royalties, was all right with me.");
    }
    SUBCASE("whom participates in the who -> which substitution") {
        auto s = pairs::apply_modification(rec(3), {ModKind::who_to_which, false});
        CHECK(s.text ==
              "Sally turned with a welcoming grin , expecting to see Gus , which she liked a lot.");
    }
    SUBCASE("which -> that and which -> who") {
        auto s = pairs::apply_modification(rec(5), {ModKind::which_to_that, true});
        CHECK(s.text ==
              "She pulls out a course catalog, various forms, and a letter that she hands to Kevin.");
        CHECK(s.label == true);
        auto s2 = pairs::apply_modification(rec(6), {ModKind::which_to_who, false});
        CHECK(s2.text == "I never saw a penny in royalties, who was all right with me.");
    }
    SUBCASE("sentence-initial relativizer casing is copied") {
        auto s = testfix::sentence("Which option she picked mattered .",
                                   {{"Which", 2, "det"},
                                    {"option", 4, "dobj"},
                                    {"she", 4, "nsubj"},
                                    {"picked", 5, "csubj"},
                                    {"mattered", 0, "ROOT"},
                                    {".", 5, "punct"}});
        RCRecord r;
        r.source_id = 99;
        r.sentence = s;
        r.relativizer_idx = 0;
        r.antecedent_idx = 1;
        r.rc_verb_idx = 3;
        r.rc_span_begin = 0;
        r.rc_span_end = 4;
        r.animate = false;
        r.restrictive = true;
        r.subjrc = false;
        r.relativizer_form = RelativizerForm::which;
        auto mod = pairs::apply_modification(r, {ModKind::which_to_that, true});
        CHECK(mod.text == "That option she picked mattered .");
        auto omit = pairs::apply_modification(r, {ModKind::relativizer_omission, true});
        CHECK(omit.text == "option she picked mattered .");
    }
}

TEST_CASE("paradigm mismatches are rejected") {
    auto fixtures = testfix::paradigm_fixtures();
    auto animate_rec = record_for(fixtures[0], 1);  // who, subject
    auto inanimate_rec = record_for(fixtures[5], 6); // which, object

    CHECK_THROWS_AS(pairs::apply_modification(animate_rec, {ModKind::which_to_who, false}),
                    ParadigmMismatchError);
    CHECK_THROWS_AS(pairs::apply_modification(inanimate_rec, {ModKind::who_to_which, false}),
                    ParadigmMismatchError);
    // Right kind, wrong label for the paradigm
    CHECK_THROWS_AS(pairs::apply_modification(animate_rec, {ModKind::relativizer_omission, true}),
                    ParadigmMismatchError);
    // that-relativizer record cannot take which -> that
    auto that_rec = inanimate_rec;
    that_rec.relativizer_form = RelativizerForm::that;
    CHECK_THROWS_AS(pairs::apply_modification(that_rec, {ModKind::which_to_that, true}),
                    ParadigmMismatchError);
}

TEST_CASE("round-trip: re-inserting the relativizer reconstructs the source") {
    testfix::SynthOptions opts;
    opts.count = 120;
    auto corpus = testfix::synthetic_corpus(opts);
    auto records = extraction::extract_records(corpus, {});
    REQUIRE(!records.empty());
    for (const RCRecord& r : records) {
        const auto& tok = r.sentence.tokens[r.relativizer_idx];
        for (const pairs::DatasetSample& s : pairs::make_bag(r, LabelMode::main_text).samples) {
            if (s.modification == ModKind::none) {
                CHECK(s.text == r.sentence.text);
            } else if (s.modification == ModKind::relativizer_omission) {
                std::string rebuilt = s.text;
                std::size_t begin = tok.begin;
                std::string insert = tok.surface;
                if (begin > 0 && r.sentence.text[begin - 1] == ' ') {
                    rebuilt.insert(begin - 1, " " + insert);
                } else {
                    rebuilt.insert(begin, insert + " ");
                }
                CHECK(rebuilt == r.sentence.text);
            } else {
                // substitution: swap the replacement span back
                std::string rebuilt = s.text;
                std::size_t len = s.text.size() - r.sentence.text.size() + (tok.end - tok.begin);
                rebuilt.replace(tok.begin, len, tok.surface);
                CHECK(rebuilt == r.sentence.text);
            }
        }
    }
}

TEST_CASE("bags contain exactly one sample per applicable compatible modification") {
    auto fixtures = testfix::paradigm_fixtures();
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        auto bag = pairs::make_bag(record_for(fixtures[i], i + 1), LabelMode::main_text);
        std::set<ModKind> kinds;
        for (const auto& s : bag.samples) kinds.insert(s.modification);
        CHECK(kinds.size() == bag.samples.size()); // unique kinds
        CHECK(kinds.count(ModKind::none));
        CHECK(kinds.count(ModKind::relativizer_omission));
        if (fixtures[i].animate) {
            CHECK(kinds.count(ModKind::who_to_which));
        } else {
            CHECK(kinds.count(ModKind::which_to_who));
        }
    }
    // that-relativizer: substitutions are form-incompatible, bag shrinks
    auto r = record_for(fixtures[5], 6);
    r.relativizer_form = RelativizerForm::that;
    auto bag = pairs::make_bag(r, LabelMode::main_text);
    CHECK(bag.samples.size() == 2); // none + omission
}

TEST_CASE("balanced sampling: forced by the rule on two dual-label bags") {
    auto fixtures = testfix::paradigm_fixtures();
    std::vector<pairs::Bag> bags{pairs::make_bag(record_for(fixtures[0], 1), LabelMode::main_text),
                                 pairs::make_bag(record_for(fixtures[2], 2), LabelMode::main_text)};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto sampled = pairs::sample_balanced(bags, seed);
        REQUIRE(sampled.samples.size() == 2);
        CHECK_FALSE(sampled.infeasible_balance);
        int n_true = (sampled.samples[0].label ? 1 : 0) + (sampled.samples[1].label ? 1 : 0);
        CHECK(n_true == 1);
    }
}

TEST_CASE("balanced sampling holds at scale and is deterministic") {
    testfix::SynthOptions opts;
    opts.count = 300;
    auto corpus = testfix::synthetic_corpus(opts);
    auto records = extraction::extract_records(corpus, {});
    std::vector<pairs::Bag> bags;
    for (const auto& r : records) bags.push_back(pairs::make_bag(r, LabelMode::main_text));

    auto a = pairs::sample_balanced(bags, 7);
    auto b = pairs::sample_balanced(bags, 7);
    auto c = pairs::sample_balanced(bags, 8);
    REQUIRE(a.samples.size() == bags.size());
    CHECK_FALSE(a.infeasible_balance);
    std::size_t n_true = 0;
    for (const auto& s : a.samples) n_true += s.label ? 1 : 0;
    std::size_t n_false = a.samples.size() - n_true;
    CHECK((n_true > n_false ? n_true - n_false : n_false - n_true) <= bags.size() % 2);
    // determinism / seed sensitivity
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        same = same && a.samples[i].text == b.samples[i].text;
        differs = differs || a.samples[i].text != c.samples[i].text;
    }
    CHECK(same);
    CHECK(differs);
    // samples come back in bag order
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].source_id == bags[i].source_id);
    }
}

TEST_CASE("infeasible balance is flagged") {
    auto fixtures = testfix::paradigm_fixtures();
    auto r = record_for(fixtures[5], 1); // (0,1,0): omission grammatical in main mode
    r.relativizer_form = RelativizerForm::that;
    std::vector<pairs::Bag> bags;
    for (std::uint64_t i = 0; i < 10; ++i) {
        auto bag = pairs::make_bag(r, LabelMode::main_text); // {none:1, omission:1}
        bag.source_id = i + 1;
        for (auto& s : bag.samples) s.source_id = i + 1;
        bags.push_back(std::move(bag));
    }
    auto sampled = pairs::sample_balanced(bags, 3);
    CHECK(sampled.infeasible_balance);
    for (const auto& s : sampled.samples) CHECK(s.label == true);
}

TEST_CASE("split: 900 samples at 1/9 give 800/100 exactly, balanced, by source") {
    std::vector<pairs::DatasetSample> samples;
    for (int i = 0; i < 900; ++i) {
        pairs::DatasetSample s;
        s.text = "t" + std::to_string(i);
        s.label = i % 2 == 0;
        s.source_id = static_cast<std::uint64_t>(i + 1);
        samples.push_back(std::move(s));
    }
    pairs::split_samples(samples, 1.0 / 9.0, 42);
    std::size_t test_n = 0, test_true = 0, train_true = 0;
    for (const auto& s : samples) {
        if (s.split == pairs::Split::test) {
            ++test_n;
            test_true += s.label;
        } else {
            train_true += s.label;
        }
    }
    CHECK(test_n == 100);
    CHECK(test_true == 50);
    CHECK(train_true == 400);

    // determinism
    auto copy = samples;
    pairs::split_samples(copy, 1.0 / 9.0, 42);
    bool same = true;
    for (std::size_t i = 0; i < samples.size(); ++i) same = same && samples[i].split == copy[i].split;
    CHECK(same);
}

TEST_CASE("split keeps sources intact and handles fraction 0.5") {
    std::vector<pairs::DatasetSample> samples;
    for (int i = 0; i < 4; ++i) {
        pairs::DatasetSample s;
        s.text = "t" + std::to_string(i);
        s.label = i % 2 == 0;
        s.source_id = static_cast<std::uint64_t>(i / 2 + 1); // two samples per source
        samples.push_back(std::move(s));
    }
    pairs::split_samples(samples, 0.5, 5);
    // sources never straddle splits
    std::map<std::uint64_t, std::set<int>> by_source;
    for (const auto& s : samples) by_source[s.source_id].insert(static_cast<int>(s.split));
    for (const auto& [id, splits] : by_source) CHECK(splits.size() == 1);

    CHECK_THROWS_AS(pairs::split_samples(samples, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(pairs::split_samples(samples, 1.0, 1), ValidationError);
}

TEST_CASE("dataset stats mirror the split x modification x label counts") {
    auto fixtures = testfix::paradigm_fixtures();
    std::vector<pairs::DatasetSample> samples;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        auto bag = pairs::make_bag(record_for(fixtures[i], i + 1), LabelMode::main_text);
        for (auto& s : bag.samples) {
            s.split = i % 2 == 0 ? pairs::Split::train : pairs::Split::test;
            samples.push_back(std::move(s));
        }
    }
    auto stats = pairs::dataset_stats(samples);
    std::size_t train_total = stats["train"]["total"].get<std::size_t>();
    std::size_t test_total = stats["test"]["total"].get<std::size_t>();
    CHECK(train_total + test_total == samples.size());
    std::size_t sum = 0;
    for (const char* split : {"train", "test"}) {
        for (const auto& [kind, counts] : stats[split]["by_modification"].items()) {
            sum += counts["acceptable"].get<std::size_t>();
            sum += counts["unacceptable"].get<std::size_t>();
        }
    }
    CHECK(sum == samples.size());
}

TEST_CASE("samples round-trip through JSONL byte-identically") {
    auto fixtures = testfix::paradigm_fixtures();
    auto bag = pairs::make_bag(record_for(fixtures[0], 1), LabelMode::main_text);
    for (const auto& s : bag.samples) {
        auto j = pairs::sample_to_json(s);
        auto back = pairs::sample_from_json(j, "t");
        CHECK(pairs::sample_to_json(back).dump() == j.dump());
    }
}
