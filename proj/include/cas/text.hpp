#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cas/error.hpp"
#include "cas/stopwords.hpp"

namespace cas {

using Tokens = std::vector<std::string>;

namespace detail {

// Lowercased words that do not end a sentence when followed by a period.
inline constexpr std::array<std::string_view, 32> kNonBreakingPrefixes = {
    "al", "approx", "ca", "cf", "co", "corp", "dept", "dr", "e.g", "eq", "eqs", "est", "fig",
    "figs", "i.e", "inc", "jr", "ltd", "mr", "mrs", "ms", "no", "nos", "prof", "ref", "refs",
    "resp", "sr", "st", "viz", "vol", "vs",
};

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline bool is_closing(char c) { return c == ')' || c == ']' || c == '"' || c == '\''; }

inline bool is_sentence_start(char c)
{
    const auto u = static_cast<unsigned char>(c);
    return std::isupper(u) || std::isdigit(u) || c == '(' || c == '[' || c == '"' || c == '\'';
}

inline std::string lower_ascii(std::string_view s)
{
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// Word immediately before position `dot` (exclusive), without leading brackets/quotes.
inline std::string_view word_before(std::string_view text, std::size_t dot)
{
    std::size_t begin = dot;
    while (begin > 0 && !is_space(text[begin - 1])) {
        --begin;
    }
    while (begin < dot && (text[begin] == '(' || text[begin] == '[' || text[begin] == '"' ||
                           text[begin] == '\'')) {
        ++begin;
    }
    return text.substr(begin, dot - begin);
}

inline bool suppresses_break(std::string_view word, char next)
{
    if (word.empty()) {
        return false;
    }
    const std::string lw = lower_ascii(word);
    if (lw == "no" || lw == "nos") {
        return std::isdigit(static_cast<unsigned char>(next)) != 0;
    }
    if (std::find(kNonBreakingPrefixes.begin(), kNonBreakingPrefixes.end(), lw) !=
        kNonBreakingPrefixes.end()) {
        return true;
    }
    // Initials ("J. Smith") and dotted acronyms ("U.S. Army").
    if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) {
        return true;
    }
    const bool has_alpha = std::any_of(word.begin(), word.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) != 0;
    });
    return has_alpha && word.find('.') != std::string_view::npos;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

// Byte length of a UTF-8 punctuation sequence starting at `s`, or 0.
inline std::size_t utf8_punct_length(std::string_view s)
{
    const auto b = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    if (s.size() >= 2 && b(0) == 0xC2 && (b(1) == 0xA0 || b(1) == 0xB1 || b(1) == 0xB7)) {
        return 2; // nbsp, plus-minus, middle dot
    }
    if (s.size() >= 3 && b(0) == 0xE2 && b(1) == 0x80 &&
        ((b(2) >= 0x90 && b(2) <= 0x9F) || b(2) == 0xA6)) {
        return 3; // dashes, curly quotes, ellipsis
    }
    return 0;
}

inline const std::unordered_set<std::string_view>& stopword_set()
{
    static const std::unordered_set<std::string_view> set(kEnglishStopwords.begin(),
                                                          kEnglishStopwords.end());
    return set;
}

} // namespace detail

inline bool is_stopword(std::string_view token) { return detail::stopword_set().count(token) != 0; }

/// Rule-based sentence splitter.
///
/// A break is placed after a run of `.`, `?` or `!` (plus any closing brackets or
/// quotes) when it is followed by whitespace and then an uppercase letter, digit
/// or opening bracket/quote. A single period does not break after a
/// non-breaking prefix (`e.g.`, `Fig.`, `et al.`), a single capital initial, or a
/// dotted acronym. Decimal points never break since no whitespace follows them.
inline std::vector<std::string> split_sentences(std::string_view text)
{
    if (detail::trim(text).empty()) {
        throw ValidationError("cannot split empty text into sentences");
    }
    std::vector<std::string> sentences;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c != '.' && c != '?' && c != '!') {
            ++i;
            continue;
        }
        const std::size_t term_begin = i;
        while (i < text.size() && (text[i] == '.' || text[i] == '?' || text[i] == '!')) {
            ++i;
        }
        const bool single_period = (i - term_begin == 1) && c == '.';
        while (i < text.size() && detail::is_closing(text[i])) {
            ++i;
        }
        const std::size_t end = i;
        std::size_t j = i;
        while (j < text.size() && detail::is_space(text[j])) {
            ++j;
        }
        if (j == i || j == text.size() || !detail::is_sentence_start(text[j])) {
            continue;
        }
        if (single_period &&
            detail::suppresses_break(detail::word_before(text, term_begin), text[j])) {
            continue;
        }
        const auto sentence = detail::trim(text.substr(start, end - start));
        if (!sentence.empty()) {
            sentences.emplace_back(sentence);
        }
        start = j;
        i = j;
    }
    const auto tail = detail::trim(text.substr(start));
    if (!tail.empty()) {
        sentences.emplace_back(tail);
    }
    return sentences;
}

/// Lowercases, strips punctuation, splits on whitespace, then drops stopwords
/// and any token containing a digit. Idempotent on its own joined output.
inline Tokens preprocess_sentence(std::string_view sentence)
{
    std::string cleaned;
    cleaned.reserve(sentence.size());
    for (std::size_t i = 0; i < sentence.size();) {
        const auto u = static_cast<unsigned char>(sentence[i]);
        if (u >= 0x80) {
            if (const std::size_t len = detail::utf8_punct_length(sentence.substr(i)); len > 0) {
                cleaned.push_back(' ');
                i += len;
                continue;
            }
            cleaned.push_back(sentence[i]);
        } else if (std::ispunct(u)) {
            cleaned.push_back(' ');
        } else {
            cleaned.push_back(static_cast<char>(std::tolower(u)));
        }
        ++i;
    }

    Tokens tokens;
    std::size_t pos = 0;
    while (pos < cleaned.size()) {
        while (pos < cleaned.size() && detail::is_space(cleaned[pos])) {
            ++pos;
        }
        std::size_t end = pos;
        while (end < cleaned.size() && !detail::is_space(cleaned[end])) {
            ++end;
        }
        if (end > pos) {
            std::string_view token(cleaned.data() + pos, end - pos);
            const bool has_digit = std::any_of(token.begin(), token.end(), [](char ch) {
                return std::isdigit(static_cast<unsigned char>(ch)) != 0;
            });
            if (!has_digit && !is_stopword(token)) {
                tokens.emplace_back(token);
            }
        }
        pos = end;
    }
    return tokens;
}

} // namespace cas
