#ifndef RCPROBE_TEXT_HPP
#define RCPROBE_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rcprobe::text {

// Word characters follow \w semantics: [A-Za-z0-9_]. Everything else,
// including UTF-8 multibyte sequences, acts as a boundary.
bool is_word_char(char c);

std::string to_lower(std::string_view s);

// Maximal runs of word characters, in order of appearance.
std::vector<std::string> words(std::string_view s);

// Number of word-boundary occurrences of `word` in `s`, case-insensitive.
// `word` must already be lowercase.
int count_word(std::string_view s, std::string_view word);

// True iff `s` contains a word-boundary occurrence of any of `vocab`
// (all lowercase), case-insensitive.
bool contains_any_word(std::string_view s, const std::vector<std::string>& vocab);

// Re-cases `replacement` after the pattern of `original`: all-caps stays
// all-caps, leading capital stays a leading capital, anything else is
// lowercase. `replacement` is expected lowercase on input.
std::string match_casing(std::string_view original, std::string_view replacement);

// splitmix64; the project's portable deterministic RNG primitive.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform integer in [0, n). n must be > 0.
    std::size_t bounded(std::size_t n);

    // Uniform double in [0, 1).
    double uniform();

    // Standard normal via Box-Muller (single value; spare discarded so the
    // stream stays position-independent).
    double normal();

private:
    std::uint64_t state_;
};

} // namespace rcprobe::text

#endif
