#ifndef RCPROBE_CONLLU_HPP
#define RCPROBE_CONLLU_HPP

#include <istream>
#include <string>
#include <vector>

#include "rcprobe/parsed_sentence.hpp"

namespace rcprobe::extraction {

// One CoNLL-U sentence block: FORM/LEMMA/HEAD/DEPREL of the word lines.
// Multiword-token ranges (1-2) and empty nodes (1.1) are skipped; comment
// lines are ignored.
struct ConlluSentence {
    std::vector<Token> tokens; // head remapped to 0-based, 0 -> kRootHead
};

std::vector<ConlluSentence> read_conllu(std::istream& in, const std::string& where = {});
std::vector<ConlluSentence> read_conllu_file(const std::string& path);

// Corpus text: UTF-8, one sentence per line; or JSONL with {"text": ...} when
// the path ends in .jsonl/.json. Blank lines are dropped in plain-text mode.
std::vector<std::string> read_corpus_file(const std::string& path);

// Pairs corpus sentences with their parses by order and validates each into a
// ParsedSentence (spans aligned against the corpus text). Counts must match.
std::vector<ParsedSentence> align_corpus(const std::vector<std::string>& texts,
                                         const std::vector<ConlluSentence>& parses,
                                         const std::string& where = {});

} // namespace rcprobe::extraction

#endif
