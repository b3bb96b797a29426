#ifndef RCPROBE_CLOZE_HPP
#define RCPROBE_CLOZE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcprobe/backend.hpp"
#include "rcprobe/extraction.hpp"

namespace rcprobe::cloze {

enum class TargetKind { relativizer, antecedent };
const char* to_string(TargetKind k);

struct ClozeInstance {
    std::string text_with_mask; // contains exactly one "[MASK]" marker
    std::string target;
    TargetKind target_kind = TargetKind::relativizer;
    bool subjrc = true; // rc_type: subjRC vs objRC
    extraction::RelativizerForm relativizer_form = extraction::RelativizerForm::who;
    std::uint64_t source_id = 0;
};

// Masks the relativizer or antecedent token of a restrictive record. Returns
// nothing for non-restrictive records (excluded by design) and for targets
// that are not a single vocabulary item under the backend's tokenizer
// (counted in `skipped_multipiece` when provided).
std::optional<ClozeInstance> make_cloze(const extraction::RCRecord& record, TargetKind kind,
                                        backends::Backend& backend,
                                        std::size_t* skipped_multipiece = nullptr,
                                        std::size_t* excluded_nonrestrictive = nullptr);

struct ClozeResult {
    backends::MaskedDistribution distribution;
    std::string target;
    TargetKind target_kind = TargetKind::relativizer;
};

// 1-based rank of the target in the distribution. Relativizer targets match
// case-insensitively, antecedent targets exactly. Throws ValidationError when
// the target is not in the vocabulary.
std::size_t target_rank(const backends::MaskedDistribution& d, const std::string& target,
                        TargetKind kind);

// Fraction of results whose rank-1 item equals the target.
double mp_at_1(const std::vector<ClozeResult>& results);
// Arithmetic mean of 1-based target ranks.
double mtr(const std::vector<ClozeResult>& results);
// Mean of H(p)/ln(vocab_size) with natural-log entropy; in [0, 1].
double nme(const std::vector<ClozeResult>& results);
// Fraction of results whose rank-1 item is one of {who, whom, whose, which,
// that}, case-insensitive.
double relativizer_ratio(const std::vector<ClozeResult>& results);

struct ClozeMetrics {
    double mp_at_1 = 0.0;
    double mtr = 0.0;
    double nme = 0.0;
    std::optional<double> relativizer_ratio; // relativizer targets only
    std::size_t n_evaluated = 0;
    std::size_t n_skipped = 0; // multi-piece targets
};

// Metrics per (rc_type x relativizer_form) cell plus an "overall" entry.
struct ClozeReport {
    TargetKind target_kind = TargetKind::relativizer;
    backends::BackendInfo backend;
    std::map<std::pair<bool, extraction::RelativizerForm>, ClozeMetrics> by_cell; // key: (subjrc, form)
    ClozeMetrics overall;
    std::size_t excluded_nonrestrictive = 0;
};

nlohmann::json cloze_report_to_json(const ClozeReport& r);
// Rows: metric; columns: rc_type x relativizer (objRC/subjRC x who/which/that/...).
std::string cloze_report_to_csv(const ClozeReport& r);

nlohmann::json instance_to_json(const ClozeInstance& inst);
ClozeInstance instance_from_json(const nlohmann::json& j, const std::string& where = {});
void write_instances_jsonl(const std::string& path, const std::vector<ClozeInstance>& instances);
std::vector<ClozeInstance> read_instances_jsonl(const std::string& path);

enum class AntecedentType { identical, synonym, hypernym, hyponym, unrelated };
const char* to_string(AntecedentType t);
std::optional<AntecedentType> antecedent_type_from_string(const std::string& s);

struct QualitativeRecord {
    std::uint64_t source_id = 0;
    bool animacy = false;
    bool plausibility = false;
    bool grammaticality = false;
    std::optional<AntecedentType> antecedent_type;
};

// CSV with header: source_id,animacy,plausibility,grammaticality,antecedent_type
std::vector<QualitativeRecord> read_qualitative_csv(const std::string& path);

// Validates plausibility => grammaticality; throws ValidationError listing
// offending source_ids.
void validate_entailment(const std::vector<QualitativeRecord>& records);

struct QualitativeCell {
    double animacy = 0.0;
    double plausibility = 0.0;
    double grammaticality = 0.0;
    std::map<AntecedentType, double> antecedent_types; // sums to 1 per cell when present
    std::size_t count = 0;
};

// Joins annotations with instances by source_id and reports proportions per
// (rc_type x relativizer_form) cell.
std::map<std::pair<bool, extraction::RelativizerForm>, QualitativeCell> aggregate_qualitative(
    const std::vector<QualitativeRecord>& records, const std::vector<ClozeInstance>& instances);

nlohmann::json qualitative_to_json(
    const std::map<std::pair<bool, extraction::RelativizerForm>, QualitativeCell>& cells);

} // namespace rcprobe::cloze

#endif
