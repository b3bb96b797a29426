#ifndef RCPROBE_DIAGNOSTICS_HPP
#define RCPROBE_DIAGNOSTICS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcprobe/backend.hpp"
#include "rcprobe/probe.hpp"

namespace rcprobe::diagnostics {

enum class AntecedentKind { nominal, clausal };
const char* to_string(AntecedentKind k);

// Cases: 1 adjacent antecedent/relativizer, 2 distance antecedent to
// relativizer, 3 distance relativizer to RC verb, 4 wrong agreement,
// 5 agreement attractor. 1-3 are grammatical, 4-5 ungrammatical.
struct DiagnosticSentence {
    std::string text;
    int case_id = 1; // 1..5
    AntecedentKind antecedent_kind = AntecedentKind::nominal;
    bool restrictive = true;
    std::optional<int> intervening_words; // case 2 only, 3..7
    bool expected_acceptable = true;
    bool reconstructed = true;      // false only for the published "debate" items
    std::string rc_verb;            // optional; enables the case-3 distance check
};

// The built-in 32-sentence suite: 4 base sentences (3 nominal, 1 clausal),
// cases 1-3 in restrictive and non-restrictive variants, cases 4-5
// restrictive only.
std::vector<DiagnosticSentence> load_builtin_suite();

// Validates the per-item invariants (expected labels per case, restrictive
// flags, intervening-word range, case-3 three-word distance when rc_verb is
// given). Throws ValidationError.
void validate_suite(const std::vector<DiagnosticSentence>& suite, const std::string& where = {});

std::vector<DiagnosticSentence> read_suite_jsonl(const std::string& path);
nlohmann::json suite_item_to_json(const DiagnosticSentence& s);

// Stable digest of a suite (hash over its canonical JSONL form).
std::string suite_digest(const std::vector<DiagnosticSentence>& suite);

struct DiagnosticCell {
    int case_id = 0;
    std::string factor; // "nominal" | "clausal" | "3-4 words" | ">4 words"
    bool restrictive = true;
    double mean_logit = 0.0;
    std::size_t count = 0;
};

struct DiagnosticReport {
    std::string suite_sha256;
    backends::BackendInfo backend;
    int probe_layer = 0;
    backends::Pooling pooling = backends::Pooling::mean;
    std::vector<DiagnosticCell> cells;
    std::map<int, double> accuracy_by_case;
    std::vector<double> logits; // per suite item, suite order
};

// Embeds every suite sentence with the probe's layer/pooling and groups mean
// logits by (case x antecedent_kind x restrictive) plus the case-2 length
// buckets {3-4, >4}. Accuracy per case compares sign(logit) to the expected
// label (logit exactly 0 counts as unacceptable).
DiagnosticReport evaluate_suite(const probing::LinearProbe& probe, backends::Backend& backend,
                                const std::vector<DiagnosticSentence>& suite,
                                const backends::PoolingOptions& popts = {});

nlohmann::json diagnostic_report_to_json(const DiagnosticReport& r);
// Table layout: rows case x factor, columns restrictive / non-restrictive.
std::string diagnostic_report_to_csv(const DiagnosticReport& r);

} // namespace rcprobe::diagnostics

#endif
