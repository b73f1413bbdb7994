#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cas/error.hpp"
#include "cas/text.hpp"

namespace cas {

using SentenceIndices = std::vector<std::size_t>;

struct RawAbstract {
    std::string id;
    std::string title;
    std::vector<std::string> sentences;             // resolved from `sentences` or a split `body`
    std::optional<SentenceIndices> gold;            // sorted, unique, 0-based
    std::optional<std::vector<std::string>> section_tags;
};

struct TokenizedAbstract {
    std::string id;
    std::vector<Tokens> sentences;
    std::optional<SentenceIndices> gold;

    std::size_t n() const noexcept { return sentences.size(); }

    std::size_t token_count() const noexcept
    {
        std::size_t total = 0;
        for (const auto& s : sentences) {
            total += s.size();
        }
        return total;
    }
};

using Corpus = std::vector<TokenizedAbstract>;

struct CorpusStats {
    std::size_t num_abstracts = 0;
    std::size_t num_gold_abstracts = 0;
    std::size_t num_conclusion_sentences = 0;
    std::size_t num_premise_sentences = 0;
    std::size_t total_sentences = 0;
    double avg_sentences_per_abstract = 0.0;
    std::map<long, std::size_t> conclusion_position_from_start; // 0, 1, ...
    std::map<long, std::size_t> conclusion_position_from_end;   // -1, -2, ...
};

namespace detail {

inline bool is_conclusion_tag(const std::string& tag)
{
    const std::string t = lower_ascii(trim(tag));
    return t == "conclusion" || t == "conclusions";
}

template<class T>
T field_as(const nlohmann::json& record, const char* key, std::size_t line)
{
    try {
        return record.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line, std::string("field '") + key + "': " + e.what());
    }
}

inline RawAbstract parse_record(const nlohmann::json& record, std::size_t line)
{
    if (!record.is_object()) {
        throw ParseError(line, "record is not a JSON object");
    }
    RawAbstract a;
    if (!record.contains("id")) {
        throw ValidationError("line " + std::to_string(line) + ": missing 'id'");
    }
    a.id = field_as<std::string>(record, "id", line);
    if (a.id.empty()) {
        throw ValidationError("line " + std::to_string(line) + ": empty id");
    }
    if (record.contains("title") && !record.at("title").is_null()) {
        a.title = field_as<std::string>(record, "title", line);
    }

    if (record.contains("sentences")) {
        a.sentences = field_as<std::vector<std::string>>(record, "sentences", line);
    } else if (record.contains("body")) {
        const auto body = field_as<std::string>(record, "body", line);
        try {
            a.sentences = split_sentences(body);
        } catch (const ValidationError&) {
            throw ValidationError("abstract '" + a.id + "': empty body");
        }
    } else {
        throw ValidationError("abstract '" + a.id + "': needs 'sentences' or 'body'");
    }
    if (a.sentences.empty()) {
        throw ValidationError("abstract '" + a.id + "': no sentences");
    }
    const std::size_t n = a.sentences.size();

    if (record.contains("section_tags") && !record.at("section_tags").is_null()) {
        a.section_tags = field_as<std::vector<std::string>>(record, "section_tags", line);
        if (a.section_tags->size() != n) {
            throw ValidationError("abstract '" + a.id + "': " +
                                  std::to_string(a.section_tags->size()) + " section tags for " +
                                  std::to_string(n) + " sentences");
        }
    }

    if (record.contains("gold_conclusion_indices") &&
        !record.at("gold_conclusion_indices").is_null()) {
        const auto raw = field_as<std::vector<long long>>(record, "gold_conclusion_indices", line);
        if (raw.empty()) {
            throw ValidationError("abstract '" + a.id + "': empty gold_conclusion_indices");
        }
        std::set<std::size_t> unique;
        for (const long long idx : raw) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
                throw ValidationError("abstract '" + a.id + "': gold index " +
                                      std::to_string(idx) + " out of range [0, " +
                                      std::to_string(n - 1) + "]");
            }
            if (!unique.insert(static_cast<std::size_t>(idx)).second) {
                throw ValidationError("abstract '" + a.id + "': duplicate gold index " +
                                      std::to_string(idx));
            }
        }
        a.gold = SentenceIndices(unique.begin(), unique.end());
    }

    if (a.section_tags) {
        SentenceIndices tagged;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_conclusion_tag((*a.section_tags)[i])) {
                tagged.push_back(i);
            }
        }
        if (a.gold && !tagged.empty() && *a.gold != tagged) {
            throw ValidationError("abstract '" + a.id +
                                  "': gold_conclusion_indices disagree with Conclusions tags");
        }
        if (!a.gold && !tagged.empty()) {
            a.gold = std::move(tagged);
        }
    }
    return a;
}

} // namespace detail

/// Reads a JSONL corpus: one record per line, blank lines ignored.
inline std::vector<RawAbstract> load_corpus(std::istream& in)
{
    std::vector<RawAbstract> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, e.what());
        }
        auto a = detail::parse_record(record, line_no);
        if (!seen.insert(a.id).second) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate id '" + a.id +
                                  "'");
        }
        out.push_back(std::move(a));
    }
    return out;
}

inline std::vector<RawAbstract> load_corpus(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open corpus file '" + path + "'");
    }
    return load_corpus(in);
}

inline TokenizedAbstract tokenize(const RawAbstract& raw)
{
    TokenizedAbstract a;
    a.id = raw.id;
    a.gold = raw.gold;
    a.sentences.reserve(raw.sentences.size());
    for (const auto& s : raw.sentences) {
        a.sentences.push_back(preprocess_sentence(s));
    }
    return a;
}

inline Corpus tokenize(const std::vector<RawAbstract>& raw)
{
    Corpus out;
    out.reserve(raw.size());
    for (const auto& a : raw) {
        out.push_back(tokenize(a));
    }
    return out;
}

inline Corpus load_tokenized_corpus(const std::string& path) { return tokenize(load_corpus(path)); }

inline CorpusStats corpus_stats(const Corpus& corpus)
{
    if (corpus.empty()) {
        throw ValidationError("corpus statistics need at least one abstract");
    }
    CorpusStats stats;
    stats.num_abstracts = corpus.size();
    for (const auto& a : corpus) {
        stats.total_sentences += a.n();
        if (!a.gold) {
            continue;
        }
        ++stats.num_gold_abstracts;
        stats.num_conclusion_sentences += a.gold->size();
        stats.num_premise_sentences += a.n() - a.gold->size();
        for (const std::size_t idx : *a.gold) {
            ++stats.conclusion_position_from_start[static_cast<long>(idx)];
            ++stats.conclusion_position_from_end[static_cast<long>(idx) -
                                                 static_cast<long>(a.n())];
        }
    }
    stats.avg_sentences_per_abstract =
        static_cast<double>(stats.total_sentences) / static_cast<double>(stats.num_abstracts);
    return stats;
}

inline const TokenizedAbstract* find_abstract(const Corpus& corpus, const std::string& id)
{
    const auto it = std::find_if(corpus.begin(), corpus.end(),
                                 [&](const TokenizedAbstract& a) { return a.id == id; });
    return it == corpus.end() ? nullptr : &*it;
}

} // namespace cas
