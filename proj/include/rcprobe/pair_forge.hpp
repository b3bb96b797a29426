#ifndef RCPROBE_PAIR_FORGE_HPP
#define RCPROBE_PAIR_FORGE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcprobe/extraction.hpp"

namespace rcprobe::pairs {

enum class ModKind { none, relativizer_omission, who_to_which, which_to_who, which_to_that };

const char* to_string(ModKind k);
std::optional<ModKind> mod_kind_from_string(const std::string& s);

struct Modification {
    ModKind kind = ModKind::none;
    bool label = true; // acceptability of the modified sentence
};

// Label convention for relativizer omission. The main-text rule makes
// omission grammatical for every restrictive object RC; the appendix table
// additionally requires an animate antecedent.
enum class LabelMode { main_text, appendix };

// The paradigm rows for one (animate, restrictive, subjrc) triple, in a fixed
// order: none, relativizer_omission, then the substitutions.
std::vector<Modification> applicable_modifications(bool animate, bool restrictive, bool subjrc,
                                                   LabelMode mode = LabelMode::main_text);

enum class Split { unassigned, train, test };

struct DatasetSample {
    std::string text;
    bool label = true;
    ModKind modification = ModKind::none;
    bool animate = false;
    bool restrictive = false;
    bool subjrc = false;
    extraction::RelativizerForm relativizer_form = extraction::RelativizerForm::who;
    std::uint64_t source_id = 0;
    Split split = Split::unassigned;
};

struct Bag {
    std::uint64_t source_id = 0;
    std::vector<DatasetSample> samples;
};

// True when the record's relativizer form admits the substitution
// (who_to_which needs who/whom; which_to_* need which; none and omission
// always apply).
bool form_compatible(ModKind kind, extraction::RelativizerForm form);

// Surface surgery at the relativizer span. Substitutions copy the original
// token's casing; omission removes the token plus exactly one adjacent space.
// Throws ParadigmMismatchError when `mod` is not admissible for the record.
DatasetSample apply_modification(const extraction::RCRecord& record, const Modification& mod,
                                 LabelMode mode = LabelMode::main_text);

// One sample per applicable, form-compatible modification (always includes
// kind=none).
Bag make_bag(const extraction::RCRecord& record, LabelMode mode = LabelMode::main_text);

struct SampledDataset {
    std::vector<DatasetSample> samples;
    bool infeasible_balance = false; // one label class globally unattainable
};

// Picks exactly one sample per bag, greedily steering toward label balance:
// when the running counts are unequal and the bag offers the minority label,
// choose uniformly among those; otherwise uniformly over the whole bag.
// Deterministic given seed.
SampledDataset sample_balanced(const std::vector<Bag>& bags, std::uint64_t seed);

// Splits by source_id (a source never straddles splits); the test split gets
// round(n * test_fraction) samples, label-balanced within +-1, as is the
// remainder. Deterministic given seed.
void split_samples(std::vector<DatasetSample>& samples, double test_fraction, std::uint64_t seed);

// Counts per split for the sidecar stats file: totals, label/animate/
// restrictive breakdowns, and per-modification label counts.
nlohmann::json dataset_stats(const std::vector<DatasetSample>& samples);

nlohmann::json sample_to_json(const DatasetSample& s);
DatasetSample sample_from_json(const nlohmann::json& j, const std::string& where = {});

void write_samples_jsonl(const std::string& path, const std::vector<DatasetSample>& samples);
std::vector<DatasetSample> read_samples_jsonl(const std::string& path);

} // namespace rcprobe::pairs

#endif
