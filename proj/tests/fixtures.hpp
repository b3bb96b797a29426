#ifndef RCPROBE_TESTS_FIXTURES_HPP
#define RCPROBE_TESTS_FIXTURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rcprobe/extraction.hpp"

namespace rcprobe::testfix {

// Compact token spec: head is 1-based, 0 means root. Spans are derived by
// aligning surfaces against the sentence text.
struct Tok {
    const char* surface;
    int head;
    const char* deprel;
};

extraction::ParsedSentence sentence(const std::string& text, const std::vector<Tok>& tokens);

// One hand-parsed sentence per (animate, restrictive, subjrc) paradigm, with
// the expected annotations.
struct ParadigmFixture {
    extraction::ParsedSentence parsed;
    bool animate;
    bool restrictive;
    bool subjrc;
    extraction::RelativizerForm form;
    std::string antecedent_surface;
};

std::vector<ParadigmFixture> paradigm_fixtures();

// Deterministic synthetic RC corpus cycling over all paradigms and
// relativizer forms (who/whom/which/that), with occasional sentences that the
// pipeline must discard (whose, ambiguous that-antecedents, no RC at all).
struct SynthOptions {
    std::size_t count = 64;
    std::uint64_t seed = 11;
    bool include_whom = true;
    bool include_that = true;
    bool include_discards = true;
};

std::vector<extraction::ParsedSentence> synthetic_corpus(const SynthOptions& opts);

// Serializes sentences as corpus (one text per line) + CoNLL-U files.
void write_corpus_files(const std::vector<extraction::ParsedSentence>& sentences,
                        const std::string& corpus_path, const std::string& conllu_path);

std::string conllu_of(const extraction::ParsedSentence& s);

} // namespace rcprobe::testfix

#endif
