#ifndef RCPROBE_PARSED_SENTENCE_HPP
#define RCPROBE_PARSED_SENTENCE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace rcprobe::extraction {

constexpr int kRootHead = -1;

struct Token {
    std::string surface;
    std::string lemma;
    int head = kRootHead;   // index into tokens, kRootHead for the root
    std::string deprel;
    std::size_t begin = 0;  // char offsets into the sentence text, [begin, end)
    std::size_t end = 0;
};

// A dependency-parsed sentence. Construct through `make_parsed_sentence`,
// which enforces the invariants:
//   - exactly one root, head indices in range, no cycles
//   - token spans ordered, non-overlapping, matching the text, with only
//     whitespace between and around them
struct ParsedSentence {
    std::string text;
    std::vector<Token> tokens;
    int root = kRootHead;

    std::size_t size() const { return tokens.size(); }
    const Token& operator[](std::size_t i) const { return tokens[i]; }

    // Indices of all tokens in the subtree rooted at `idx` (including idx),
    // ascending.
    std::vector<int> subtree(int idx) const;
};

// Validates and finalizes; throws ValidationError on any broken invariant.
// `where` is prepended to error messages (e.g. "parses.conllu sentence 12").
ParsedSentence make_parsed_sentence(std::string tokens_text, std::vector<Token> tokens,
                                    const std::string& where = {});

// Computes token char spans by aligning surfaces against `tokens_text` left to
// right, skipping whitespace. Throws ValidationError when the tokens do not
// reconstruct the text.
void align_spans(const std::string& tokens_text, std::vector<Token>& tokens,
                 const std::string& where = {});

} // namespace rcprobe::extraction

#endif
