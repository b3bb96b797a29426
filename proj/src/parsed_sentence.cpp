#include "rcprobe/parsed_sentence.hpp"

#include <algorithm>
#include <cctype>

#include "rcprobe/error.hpp"

namespace rcprobe::extraction {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ValidationError(where.empty() ? msg : where + ": " + msg);
}

} // namespace

std::vector<int> ParsedSentence::subtree(int idx) const {
    std::vector<std::vector<int>> children(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].head != kRootHead) children[tokens[i].head].push_back(static_cast<int>(i));
    }
    std::vector<int> out;
    std::vector<int> stack{idx};
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        out.push_back(t);
        for (int c : children[t]) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void align_spans(const std::string& tokens_text, std::vector<Token>& tokens, const std::string& where) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        while (pos < tokens_text.size() && is_space(tokens_text[pos])) ++pos;
        const std::string& form = tokens[i].surface;
        if (form.empty()) fail(where, "empty token surface at index " + std::to_string(i));
        if (tokens_text.compare(pos, form.size(), form) != 0) {
            fail(where, "token \"" + form + "\" does not match text at offset " + std::to_string(pos));
        }
        tokens[i].begin = pos;
        tokens[i].end = pos + form.size();
        pos = tokens[i].end;
    }
    while (pos < tokens_text.size() && is_space(tokens_text[pos])) ++pos;
    if (pos != tokens_text.size()) {
        fail(where, "trailing non-whitespace text not covered by tokens at offset " + std::to_string(pos));
    }
}

ParsedSentence make_parsed_sentence(std::string tokens_text, std::vector<Token> tokens,
                                    const std::string& where) {
    if (tokens.empty()) fail(where, "sentence has no tokens");

    ParsedSentence s;
    s.text = std::move(tokens_text);
    s.tokens = std::move(tokens);

    int n = static_cast<int>(s.tokens.size());
    int root_count = 0;
    for (int i = 0; i < n; ++i) {
        int h = s.tokens[i].head;
        if (h == kRootHead) {
            ++root_count;
            s.root = i;
        } else if (h < 0 || h >= n) {
            fail(where, "head index out of range for token " + std::to_string(i));
        } else if (h == i) {
            fail(where, "token " + std::to_string(i) + " is its own head");
        }
    }
    if (root_count != 1) {
        fail(where, "expected exactly one root token, found " + std::to_string(root_count));
    }
    // Cycle check: every token must reach the root in at most n steps.
    for (int i = 0; i < n; ++i) {
        int cur = i;
        int steps = 0;
        while (s.tokens[cur].head != kRootHead) {
            cur = s.tokens[cur].head;
            if (++steps > n) fail(where, "cyclic head chain involving token " + std::to_string(i));
        }
    }

    bool spans_set = false;
    for (const Token& t : s.tokens) {
        if (t.end > t.begin) spans_set = true;
    }
    if (!spans_set) {
        align_spans(s.text, s.tokens, where);
    } else {
        std::size_t prev_end = 0;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            const Token& t = s.tokens[i];
            if (t.end <= t.begin || t.end > s.text.size()) {
                fail(where, "bad char span for token " + std::to_string(i));
            }
            if (t.begin < prev_end) fail(where, "overlapping or unordered spans at token " + std::to_string(i));
            for (std::size_t p = prev_end; p < t.begin; ++p) {
                if (!is_space(s.text[p])) fail(where, "non-whitespace gap before token " + std::to_string(i));
            }
            if (s.text.compare(t.begin, t.end - t.begin, t.surface) != 0) {
                fail(where, "span does not match surface for token " + std::to_string(i));
            }
            prev_end = t.end;
        }
        for (std::size_t p = prev_end; p < s.text.size(); ++p) {
            if (!is_space(s.text[p])) fail(where, "non-whitespace text after last token");
        }
    }
    return s;
}

} // namespace rcprobe::extraction
