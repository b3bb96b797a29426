#ifndef RCPROBE_EXTRACTION_HPP
#define RCPROBE_EXTRACTION_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcprobe/parsed_sentence.hpp"

namespace rcprobe::extraction {

enum class RelativizerForm { who, whom, whose, which, that };

const char* to_string(RelativizerForm f);
std::optional<RelativizerForm> relativizer_from_word(const std::string& lowercase_word);

// The five relativizer pronouns, lowercase.
const std::vector<std::string>& relativizer_words();

enum class RcRole { subject, object };

struct ExtractionConfig {
    std::set<std::string> subject_labels{"nsubj", "nsubjpass"};
    std::set<std::string> object_labels{"dobj", "obj"};
    // An incoming edge whose label (or its subtype-stripped base, e.g.
    // acl:relcl -> relcl handled via exact entries here) marks the RC verb.
    std::set<std::string> rc_labels{"relcl", "acl:relcl"};
};

struct RCStructure {
    int antecedent_idx = -1;
    int rc_verb_idx = -1;
    int rc_span_begin = -1; // inclusive
    int rc_span_end = -1;   // exclusive
    int relativizer_idx = -1;
};

struct RCRecord {
    std::uint64_t source_id = 0; // 1-based corpus line number
    ParsedSentence sentence;
    int relativizer_idx = -1;
    int antecedent_idx = -1;
    int rc_verb_idx = -1;
    int rc_span_begin = -1;
    int rc_span_end = -1;
    bool animate = false;
    bool restrictive = false;
    bool subjrc = false;
    RelativizerForm relativizer_form = RelativizerForm::who;
};

struct AnimacyWordlists {
    std::set<std::string> who_exclusive;   // lemmas, case-folded
    std::set<std::string> which_exclusive; // lemmas, case-folded
};

// True iff the sentence contains exactly one word-boundary occurrence of any
// of {who, whom, whose, which, that}, case-insensitive.
bool filter_single_pronoun(const std::string& sentence_text);

// Locates the relative clause: the RC verb is a token with an incoming edge
// in `rc_labels`; its subtree is the RC span; the unique relativizer pronoun
// must lie inside the span and the span must be contiguous. Returns nothing
// when any condition fails.
std::optional<RCStructure> find_relative_clause(const ParsedSentence& parsed,
                                                const ExtractionConfig& cfg = {});

// Subject/object role from the relativizer's incoming dependency label;
// nothing when the label is in neither set (record discarded).
std::optional<RcRole> classify_role(const RCStructure& rc, const ParsedSentence& parsed,
                                    const ExtractionConfig& cfg = {});

// Non-restrictive iff the token immediately preceding the relativizer is a
// comma.
bool annotate_restrictive(const RCStructure& rc, const ParsedSentence& parsed);

// A candidate between the structural pass and the animacy pass.
struct RCCandidate {
    std::uint64_t source_id = 0;
    ParsedSentence sentence;
    RCStructure structure;
    RcRole role = RcRole::subject;
    bool restrictive = true;
    RelativizerForm form = RelativizerForm::who;
    std::string antecedent_lemma; // case-folded
};

// Antecedent lemmas attested exclusively with who(/whom) vs. exclusively with
// which. Candidates with other relativizers are ignored.
AnimacyWordlists build_exclusive_wordlists(const std::vector<RCCandidate>& candidates);

// who/whom -> animate; which -> inanimate; that -> wordlist membership or
// nothing; whose -> nothing.
std::optional<bool> annotate_animacy(RelativizerForm form, const std::string& antecedent_lemma,
                                     const AnimacyWordlists& lists);

struct ExtractionStats {
    std::size_t sentences = 0;
    std::size_t failed_pronoun_filter = 0;
    std::size_t no_relative_clause = 0;
    std::size_t role_discarded = 0;
    std::size_t animacy_discarded = 0;
    std::size_t emitted = 0;
};

// Full two-pass pipeline over aligned (text, parse) sentences. Pass 1 finds
// candidates and collects who/which attestations; pass 2 annotates animacy
// and emits records. Indices into `parsed` become 1-based source ids.
std::vector<RCRecord> extract_records(const std::vector<ParsedSentence>& parsed,
                                      const ExtractionConfig& cfg, ExtractionStats* stats = nullptr,
                                      AnimacyWordlists* lists_out = nullptr);

nlohmann::json record_to_json(const RCRecord& r);
RCRecord record_from_json(const nlohmann::json& j, const std::string& where = {});

void write_records_jsonl(const std::string& path, const std::vector<RCRecord>& records);
std::vector<RCRecord> read_records_jsonl(const std::string& path);

} // namespace rcprobe::extraction

#endif
