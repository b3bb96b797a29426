#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "rcprobe/cloze.hpp"
#include "rcprobe/error.hpp"
#include "rcprobe/mock_backend.hpp"
#include "rcprobe/text.hpp"

using namespace rcprobe;
using backends::DistributionEntry;
using backends::MaskedDistribution;
using cloze::ClozeResult;
using cloze::TargetKind;

namespace {

MaskedDistribution dist(std::vector<std::pair<std::string, double>> items,
                        std::size_t vocab_size = 0) {
    std::vector<DistributionEntry> entries;
    std::size_t idx = 0;
    for (auto& [item, p] : items) entries.push_back({item, p, idx++});
    return backends::finalize_distribution(std::move(entries),
                                           vocab_size ? vocab_size : items.size());
}

ClozeResult result(MaskedDistribution d, const std::string& target,
                   TargetKind kind = TargetKind::relativizer) {
    ClozeResult r;
    r.distribution = std::move(d);
    r.target = target;
    r.target_kind = kind;
    return r;
}

extraction::RCRecord sample_record(bool restrictive) {
    // "The woman who praised the mayor smiled ." with known indices.
    auto s = restrictive
                 ? testfix::sentence("The woman who praised the mayor smiled .",
                                     {{"The", 2, "det"},
                                      {"woman", 7, "nsubj"},
                                      {"who", 4, "nsubj"},
                                      {"praised", 2, "relcl"},
                                      {"the", 6, "det"},
                                      {"mayor", 4, "dobj"},
                                      {"smiled", 0, "ROOT"},
                                      {".", 7, "punct"}})
                 : testfix::sentence("The woman , who praised the mayor , smiled .",
                                     {{"The", 2, "det"},
                                      {"woman", 9, "nsubj"},
                                      {",", 5, "punct"},
                                      {"who", 5, "nsubj"},
                                      {"praised", 2, "relcl"},
                                      {"the", 7, "det"},
                                      {"mayor", 5, "dobj"},
                                      {",", 5, "punct"},
                                      {"smiled", 0, "ROOT"},
                                      {".", 9, "punct"}});
    extraction::RCRecord r;
    r.source_id = 42;
    r.sentence = s;
    r.relativizer_idx = restrictive ? 2 : 3;
    r.antecedent_idx = 1;
    r.rc_verb_idx = restrictive ? 3 : 4;
    r.rc_span_begin = restrictive ? 2 : 2;
    r.rc_span_end = restrictive ? 6 : 8;
    r.animate = true;
    r.restrictive = restrictive;
    r.subjrc = true;
    r.relativizer_form = extraction::RelativizerForm::who;
    return r;
}

} // namespace

TEST_CASE("make_cloze masks the right token and tracks exclusions") {
    mock::MockBackend backend("m", mock::MockBackend::Flavor::gaussian, 4, 1, 3, 0.2, {});
    std::size_t skipped = 0, excluded = 0;

    auto rel = cloze::make_cloze(sample_record(true), TargetKind::relativizer, backend, &skipped,
                                 &excluded);
    REQUIRE(rel.has_value());
    CHECK(rel->text_with_mask == "The woman [MASK] praised the mayor smiled .");
    CHECK(rel->target == "who");
    CHECK(rel->subjrc);
    CHECK(rel->source_id == 42);

    auto ant = cloze::make_cloze(sample_record(true), TargetKind::antecedent, backend, &skipped,
                                 &excluded);
    REQUIRE(ant.has_value());
    CHECK(ant->text_with_mask == "The [MASK] who praised the mayor smiled .");
    CHECK(ant->target == "woman");

    auto none = cloze::make_cloze(sample_record(false), TargetKind::relativizer, backend, &skipped,
                                  &excluded);
    CHECK_FALSE(none.has_value());
    CHECK(excluded == 1);
    CHECK(skipped == 0);
}

TEST_CASE("multi-piece targets are skipped and counted") {
    // The mock counts word-runs; a hyphenated antecedent splits into two.
    mock::MockBackend backend("m", mock::MockBackend::Flavor::gaussian, 4, 1, 3, 0.2, {});
    auto s = testfix::sentence("The vice-chair who presided smiled .",
                               {{"The", 2, "det"},
                                {"vice-chair", 6, "nsubj"},
                                {"who", 4, "nsubj"},
                                {"presided", 2, "relcl"},
                                {"smiled", 0, "ROOT"},
                                {".", 5, "punct"}});
    extraction::RCRecord r;
    r.source_id = 7;
    r.sentence = s;
    r.relativizer_idx = 2;
    r.antecedent_idx = 1;
    r.rc_verb_idx = 3;
    r.rc_span_begin = 2;
    r.rc_span_end = 4;
    r.animate = true;
    r.restrictive = true;
    r.subjrc = true;
    r.relativizer_form = extraction::RelativizerForm::who;

    std::size_t skipped = 0, excluded = 0;
    auto inst = cloze::make_cloze(r, TargetKind::antecedent, backend, &skipped, &excluded);
    CHECK_FALSE(inst.has_value());
    CHECK(skipped == 1);
    CHECK(excluded == 0);
    // the relativizer itself is single-piece
    auto rel = cloze::make_cloze(r, TargetKind::relativizer, backend, &skipped, &excluded);
    CHECK(rel.has_value());
}

TEST_CASE("mp_at_1: fraction of rank-1 hits") {
    std::vector<ClozeResult> results;
    for (int i = 0; i < 4; ++i) results.push_back(result(dist({{"that", 0.6}, {"who", 0.4}}), "that"));
    results.push_back(result(dist({{"that", 0.6}, {"who", 0.4}}), "who"));
    CHECK(cloze::mp_at_1(results) == doctest::Approx(0.8));
    results.assign(3, result(dist({{"who", 1.0}}, 1), "who"));
    CHECK(cloze::mp_at_1(results) == 1.0);
    CHECK_THROWS_AS(cloze::mp_at_1({}), ValidationError);
    // relativizer matching is case-insensitive
    std::vector<ClozeResult> cased{result(dist({{"That", 0.9}, {"who", 0.1}}), "that")};
    CHECK(cloze::mp_at_1(cased) == 1.0);
    // antecedent matching is case-sensitive
    std::vector<ClozeResult> strict{
        result(dist({{"Spain", 0.9}, {"spain", 0.1}}), "spain", TargetKind::antecedent)};
    CHECK(cloze::mp_at_1(strict) == 0.0);
}

TEST_CASE("mtr: mean of 1-based target ranks; OOV is an error") {
    std::vector<ClozeResult> results{
        result(dist({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}), "a"),
        result(dist({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}), "a"),
        result(dist({{"a", 0.4}, {"b", 0.3}, {"c", 0.2}, {"d", 0.1}}), "d"),
    };
    CHECK(cloze::mtr(results) == doctest::Approx(2.0)); // ranks 1, 1, 4
    std::vector<ClozeResult> oov{result(dist({{"a", 1.0}}, 1), "zebra")};
    CHECK_THROWS_AS(cloze::mtr(oov), ValidationError);
}

TEST_CASE("mtr equals a brute-force sort oracle on random distributions") {
    text::Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t vocab = 2 + rng.bounded(999);
        std::vector<double> weights(vocab);
        double total = 0.0;
        for (double& w : weights) {
            w = rng.uniform() + 1e-9;
            total += w;
        }
        std::vector<DistributionEntry> entries;
        for (std::size_t i = 0; i < vocab; ++i) entries.push_back({"w" + std::to_string(i), weights[i] / total, i});
        // force some exact ties to exercise the vocab-index tie-break
        if (vocab > 4) {
            entries[1].prob = entries[3].prob;
            double sum = 0.0;
            for (const auto& e : entries) sum += e.prob;
            for (auto& e : entries) e.prob /= sum;
        }
        auto d = backends::finalize_distribution(entries, vocab);
        std::size_t target_idx = rng.bounded(vocab);
        std::string target = "w" + std::to_string(target_idx);

        // oracle: full stable sort on (-prob, vocab_index)
        std::vector<DistributionEntry> sorted = entries;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            if (a.prob != b.prob) return a.prob > b.prob;
            return a.vocab_index < b.vocab_index;
        });
        std::size_t oracle_rank = 0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i].item == target) oracle_rank = i + 1;
        }
        CHECK(cloze::target_rank(d, target, TargetKind::antecedent) == oracle_rank);
    }
}

TEST_CASE("nme: closed-form values") {
    std::vector<ClozeResult> uniform{result(
        dist({{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}}), "a")};
    CHECK(cloze::nme(uniform) == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<ClozeResult> onehot{result(dist({{"a", 1.0}, {"b", 0.0}, {"c", 0.0}}, 3), "a")};
    CHECK(cloze::nme(onehot) == doctest::Approx(0.0).epsilon(1e-9));

    // H(0.5, 0.5, 0, 0) / ln(4) = ln2/ln4 = 0.5
    std::vector<ClozeResult> half{result(dist({{"a", 0.5}, {"b", 0.5}, {"c", 0.0}, {"d", 0.0}}, 4), "a")};
    CHECK(std::abs(cloze::nme(half) - 0.5) <= 1e-9);
}

TEST_CASE("nme is monotone under mixing toward uniform") {
    double prev = -1.0;
    for (int step = 0; step <= 10; ++step) {
        double t = step / 10.0;
        // mixture (1-t)*one-hot + t*uniform over 5 items
        std::vector<std::pair<std::string, double>> items;
        for (int i = 0; i < 5; ++i) {
            double p = t * 0.2 + (i == 0 ? 1.0 - t : 0.0);
            items.emplace_back("w" + std::to_string(i), p);
        }
        std::vector<ClozeResult> rs{result(dist(items), "w0")};
        double value = cloze::nme(rs);
        CHECK(value >= prev - 1e-12);
        CHECK(value >= 0.0);
        CHECK(value <= 1.0);
        prev = value;
    }
}

TEST_CASE("mp_at_1 == 1 implies mtr == 1") {
    text::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ClozeResult> rs;
        for (int i = 0; i < 5; ++i) {
            std::vector<std::pair<std::string, double>> items{{"hit", 0.5 + rng.uniform() * 0.4}};
            double rest = 1.0 - items[0].second;
            items.emplace_back("other1", rest * 0.6);
            items.emplace_back("other2", rest * 0.4);
            rs.push_back(result(dist(items), "hit"));
        }
        if (cloze::mp_at_1(rs) == 1.0) CHECK(cloze::mtr(rs) == 1.0);
    }
}

TEST_CASE("relativizer_ratio counts top-1 relativizers of any form") {
    std::vector<ClozeResult> rs{
        result(dist({{"that", 0.9}, {"x", 0.1}}), "who"),
        result(dist({{"who", 0.9}, {"x", 0.1}}), "who"),
        result(dist({{"wind", 0.9}, {"who", 0.1}}), "who"),
    };
    CHECK(cloze::relativizer_ratio(rs) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(cloze::relativizer_ratio({}), ValidationError);
}

TEST_CASE("qualitative: entailment validation and per-cell proportions") {
    std::vector<cloze::ClozeInstance> instances;
    for (std::uint64_t id = 1; id <= 4; ++id) {
        cloze::ClozeInstance inst;
        inst.text_with_mask = "x [MASK] y";
        inst.target = "who";
        inst.target_kind = TargetKind::relativizer;
        inst.subjrc = id % 2 == 0;
        inst.relativizer_form = extraction::RelativizerForm::who;
        inst.source_id = id;
        instances.push_back(inst);
    }
    std::vector<cloze::QualitativeRecord> records;
    for (std::uint64_t id = 1; id <= 4; ++id) {
        cloze::QualitativeRecord r;
        r.source_id = id;
        r.animacy = id != 3;
        r.plausibility = id == 1 || id == 2;
        r.grammaticality = true;
        r.antecedent_type = id % 2 == 0 ? std::optional(cloze::AntecedentType::identical)
                                        : std::optional(cloze::AntecedentType::hypernym);
        records.push_back(r);
    }
    auto cells = cloze::aggregate_qualitative(records, instances);
    REQUIRE(cells.size() == 2);
    auto& subj = cells.at({true, extraction::RelativizerForm::who});
    CHECK(subj.count == 2);
    CHECK(subj.animacy == doctest::Approx(1.0));
    CHECK(subj.antecedent_types.at(cloze::AntecedentType::identical) == doctest::Approx(1.0));
    auto& obj = cells.at({false, extraction::RelativizerForm::who});
    CHECK(obj.animacy == doctest::Approx(0.5));
    // type proportions sum to 1 per cell
    for (const auto& [key, cell] : cells) {
        double sum = 0.0;
        for (const auto& [t, p] : cell.antecedent_types) sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }

    // AN {1,1,0,1} -> 0.75 when all ids share one cell
    for (auto& inst : instances) inst.subjrc = true;
    auto one_cell = cloze::aggregate_qualitative(records, instances);
    CHECK(one_cell.at({true, extraction::RelativizerForm::who}).animacy == doctest::Approx(0.75));

    // entailment violation lists the offending id
    records[0].plausibility = true;
    records[0].grammaticality = false;
    try {
        cloze::aggregate_qualitative(records, instances);
        FAIL("expected entailment violation");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("qualitative CSV import") {
    std::string path = "qual_test.csv";
    {
        std::ofstream out(path);
        out << "source_id,animacy,plausibility,grammaticality,antecedent_type\n";
        out << "1,1,1,1,identical\n";
        out << "2,true,false,true,\n";
        out << "3,0,0,0,unrelated\n";
    }
    auto records = cloze::read_qualitative_csv(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].antecedent_type == cloze::AntecedentType::identical);
    CHECK_FALSE(records[1].antecedent_type.has_value());
    CHECK(records[1].animacy);
    CHECK_FALSE(records[1].plausibility);
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "source_id,animacy,plausibility,grammaticality\n";
        out << "1,1,maybe,1\n";
    }
    CHECK_THROWS_AS(cloze::read_qualitative_csv(path), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("instances JSONL round-trip and mask validation") {
    cloze::ClozeInstance inst;
    inst.text_with_mask = "so many of the [MASK] that we treat are obscure.";
    inst.target = "diseases";
    inst.target_kind = TargetKind::antecedent;
    inst.subjrc = false;
    inst.relativizer_form = extraction::RelativizerForm::that;
    inst.source_id = 5;
    auto j = cloze::instance_to_json(inst);
    auto back = cloze::instance_from_json(j, "t");
    CHECK(back.text_with_mask == inst.text_with_mask);
    CHECK(back.target == inst.target);
    CHECK(back.target_kind == inst.target_kind);
    CHECK(back.subjrc == inst.subjrc);

    auto bad = j;
    bad["text_with_mask"] = "no mask here";
    CHECK_THROWS_AS(cloze::instance_from_json(bad, "t"), ValidationError);
    bad["text_with_mask"] = "[MASK] and [MASK]";
    CHECK_THROWS_AS(cloze::instance_from_json(bad, "t"), ValidationError);
}
