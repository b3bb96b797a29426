#include "rcprobe/text.hpp"

#include <cctype>
#include <cmath>

namespace rcprobe::text {

bool is_word_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') || u == '_';
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_word_char(s[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && is_word_char(s[j])) ++j;
        out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

int count_word(std::string_view s, std::string_view word) {
    int n = 0;
    for (const std::string& w : words(s)) {
        if (to_lower(w) == word) ++n;
    }
    return n;
}

bool contains_any_word(std::string_view s, const std::vector<std::string>& vocab) {
    for (const std::string& w : words(s)) {
        std::string lw = to_lower(w);
        for (const std::string& v : vocab) {
            if (lw == v) return true;
        }
    }
    return false;
}

std::string match_casing(std::string_view original, std::string_view replacement) {
    auto upper = [](char c) { return c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c; };
    bool all_caps = original.size() > 1;
    for (char c : original) {
        if (c >= 'a' && c <= 'z') all_caps = false;
    }
    std::string out(replacement);
    if (all_caps) {
        for (char& c : out) c = upper(c);
    } else if (!original.empty() && original.front() >= 'A' && original.front() <= 'Z') {
        if (!out.empty()) out.front() = upper(out.front());
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t Rng::bounded(std::size_t n) {
    // Rejection sampling keeps the draw exactly uniform and portable.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % static_cast<std::uint64_t>(n);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return static_cast<std::size_t>(x % static_cast<std::uint64_t>(n));
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace rcprobe::text
