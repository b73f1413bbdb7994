#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cas/corpus.hpp"
#include "cas/cycle.hpp"
#include "cas/error.hpp"
#include "cas/rng.hpp"

namespace cas {

/// Planted corpus generator. Premise sentences repeat a few per-abstract key
/// terms (plus topic words shared by abstracts of the same topic); conclusion
/// sentences draw from a larger per-abstract vocabulary. Gold conclusions are
/// a uniformly chosen cycled window. All words are alphabetic so they survive
/// preprocessing unchanged.
struct SyntheticSpec {
    std::size_t num_abstracts = 50;
    std::size_t min_sentences = 9;
    std::size_t max_sentences = 12;
    std::size_t key_terms = 2;
    std::size_t premise_words = 4;
    std::size_t conclusion_words = 5;
    std::size_t conclusion_vocab = 60;
    std::size_t num_topics = 5;
    std::size_t topic_vocab = 3;
    std::size_t topic_words = 1; // per premise sentence
    std::uint64_t seed = 0;

    void validate() const
    {
        if (num_abstracts < 1) {
            throw ValidationError("synthetic corpus needs at least one abstract");
        }
        if (min_sentences < 2 || max_sentences < min_sentences) {
            throw ValidationError("synthetic sentence range must satisfy 2 <= min <= max");
        }
        if (key_terms < 1 || premise_words < 1 || conclusion_words < 1 || conclusion_vocab < 1) {
            throw ValidationError("synthetic vocabulary sizes must be >= 1");
        }
        if (topic_words > 0 && (num_topics < 1 || topic_vocab < 1)) {
            throw ValidationError("topic words need at least one topic and one topic term");
        }
    }
};

namespace detail {

// Fixed-width base-26 spelling of n.
inline std::string letters(std::size_t n, std::size_t width)
{
    std::string out(width, 'a');
    for (std::size_t i = width; i-- > 0;) {
        out[i] = static_cast<char>('a' + n % 26);
        n /= 26;
    }
    return out;
}

} // namespace detail

inline std::vector<RawAbstract> synthetic_corpus(const SyntheticSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    std::vector<RawAbstract> out;
    for (std::size_t a = 0; a < spec.num_abstracts; ++a) {
        RawAbstract raw;
        raw.id = "syn" + std::to_string(a);
        raw.title = "synthetic abstract " + std::to_string(a);
        const std::size_t n = spec.min_sentences + rng.index(spec.max_sentences - spec.min_sentences + 1);
        const auto cands = enumerate_candidates(n, raw.id);
        const SentenceIndices gold = cands[rng.index(cands.size())].sorted_window();
        const std::size_t topic = spec.num_topics > 0 ? rng.index(spec.num_topics) : 0;
        std::vector<bool> in_gold(n, false);
        for (const auto i : gold) {
            in_gold[i] = true;
        }
        for (std::size_t s = 0; s < n; ++s) {
            std::string text;
            const auto add = [&text](const std::string& w) {
                text += (text.empty() ? "" : " ") + w;
            };
            if (in_gold[s]) {
                for (std::size_t w = 0; w < spec.conclusion_words; ++w) {
                    add("res" + detail::letters(a, 3) + detail::letters(rng.index(spec.conclusion_vocab), 2));
                }
            } else {
                for (std::size_t w = 0; w < spec.premise_words; ++w) {
                    add("key" + detail::letters(a, 3) + detail::letters(rng.index(spec.key_terms), 1));
                }
                for (std::size_t w = 0; w < spec.topic_words; ++w) {
                    add("top" + detail::letters(topic, 2) + detail::letters(rng.index(spec.topic_vocab), 1));
                }
            }
            raw.sentences.push_back(text + ".");
        }
        raw.gold = gold;
        out.push_back(std::move(raw));
    }
    return out;
}

inline void write_corpus(std::ostream& out, const std::vector<RawAbstract>& corpus)
{
    for (const auto& a : corpus) {
        nlohmann::ordered_json j;
        j["id"] = a.id;
        j["title"] = a.title;
        j["sentences"] = a.sentences;
        if (a.gold) {
            j["gold_conclusion_indices"] = *a.gold;
        }
        out << j.dump() << '\n';
    }
}

} // namespace cas
