#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cas/corpus.hpp"
#include "cas/error.hpp"

namespace cas {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double cosine(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw ContractError("cosine of vectors with different dimensions");
    }
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot(a, b) / (na * nb);
}

/// Dense vectors keyed by id (abstract id, or "abstract_id#sentence_index").
class SimilarityProvider {
public:
    void add(const std::string& id, Vector v)
    {
        if (v.empty()) {
            throw ValidationError("vector for '" + id + "' is empty");
        }
        if (dim_ != 0 && v.size() != dim_) {
            throw ValidationError("vector for '" + id + "' has dimension " + std::to_string(v.size()) +
                                  ", expected " + std::to_string(dim_));
        }
        if (!(std::sqrt(dot(v, v)) > 0.0)) {
            throw ValidationError("vector for '" + id + "' is zero");
        }
        if (!vectors_.emplace(id, std::move(v)).second) {
            throw ValidationError("duplicate vector id '" + id + "'");
        }
        dim_ = vectors_.begin()->second.size();
    }

    bool contains(const std::string& id) const { return vectors_.count(id) != 0; }

    const Vector& at(const std::string& id) const
    {
        const auto it = vectors_.find(id);
        if (it == vectors_.end()) {
            throw ValidationError("no vector for '" + id + "'");
        }
        return it->second;
    }

    double similarity(const std::string& a, const std::string& b) const { return cosine(at(a), at(b)); }

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }

    void require_all(const Corpus& corpus) const
    {
        std::vector<std::string> missing;
        for (const auto& a : corpus) {
            if (!contains(a.id)) {
                missing.push_back(a.id);
            }
        }
        if (!missing.empty()) {
            std::string msg = "no vector for " + std::to_string(missing.size()) + " abstract(s):";
            for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
                msg += " " + missing[i];
            }
            throw ValidationError(msg);
        }
    }

private:
    std::map<std::string, Vector> vectors_;
    std::size_t dim_ = 0;
};

inline std::string sentence_vector_id(const std::string& abstract_id, std::size_t sentence)
{
    return abstract_id + "#" + std::to_string(sentence);
}

/// Reads an embedding file: JSONL records {"id": str, "vector": [float]} and an
/// optional trailing manifest line {"manifest": {"model": str, "dimension": int,
/// "count": int}} whose dimension and count are checked when present.
inline SimilarityProvider load_embeddings(std::istream& in)
{
    SimilarityProvider provider;
    std::optional<nlohmann::json> manifest;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, e.what());
        }
        if (rec.is_object() && rec.contains("manifest")) {
            manifest = rec.at("manifest");
            continue;
        }
        if (manifest) {
            throw ParseError(line_no, "record after the manifest line");
        }
        try {
            provider.add(rec.at("id").get<std::string>(), rec.at("vector").get<Vector>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (manifest && manifest->is_object()) {
        if (manifest->contains("dimension") &&
            manifest->at("dimension").get<std::size_t>() != provider.dimension()) {
            throw ValidationError("manifest dimension does not match the vectors");
        }
        if (manifest->contains("count") && manifest->at("count").get<std::size_t>() != provider.size()) {
            throw ValidationError("manifest count does not match the number of records");
        }
    }
    return provider;
}

inline SimilarityProvider load_embeddings(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open embeddings file '" + path + "'");
    }
    return load_embeddings(in);
}

/// Abstract-level vectors for NN search from a loaded embedding file: an
/// abstract's own record when present, otherwise the mean of its sentence
/// records.
inline SimilarityProvider abstract_vectors(const Corpus& corpus, const SimilarityProvider& loaded)
{
    SimilarityProvider out;
    for (const auto& a : corpus) {
        if (loaded.contains(a.id)) {
            out.add(a.id, loaded.at(a.id));
            continue;
        }
        Vector mean(loaded.dimension(), 0.0);
        for (std::size_t i = 0; i < a.n(); ++i) {
            const auto id = sentence_vector_id(a.id, i);
            if (!loaded.contains(id)) {
                throw ValidationError("no abstract or sentence vectors for '" + a.id + "' (missing '" + id + "')");
            }
            const auto& v = loaded.at(id);
            for (std::size_t d = 0; d < mean.size(); ++d) {
                mean[d] += v[d] / static_cast<double>(a.n());
            }
        }
        out.add(a.id, std::move(mean));
    }
    return out;
}

/// L2-normalised tf-idf vectors over the corpus vocabulary, with smoothed idf
/// log((1 + N) / (1 + df)) + 1. An abstract with no tokens gets a uniform
/// vector and a warning.
inline SimilarityProvider build_tfidf_provider(const Corpus& corpus, std::ostream* warnings = &std::cerr)
{
    if (corpus.empty()) {
        throw ValidationError("tf-idf provider needs a non-empty corpus");
    }
    std::map<std::string, std::size_t> index;
    for (const auto& a : corpus) {
        for (const auto& s : a.sentences) {
            for (const auto& t : s) {
                index.emplace(t, 0);
            }
        }
    }
    if (index.empty()) {
        throw ValidationError("tf-idf provider: corpus has no tokens");
    }
    std::size_t next = 0;
    for (auto& [tok, idx] : index) {
        idx = next++;
    }
    const std::size_t dim = index.size();

    std::vector<std::vector<double>> tf(corpus.size(), std::vector<double>(dim, 0.0));
    std::vector<double> df(dim, 0.0);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        for (const auto& s : corpus[d].sentences) {
            for (const auto& t : s) {
                tf[d][index.at(t)] += 1.0;
            }
        }
        for (std::size_t j = 0; j < dim; ++j) {
            if (tf[d][j] > 0.0) {
                df[j] += 1.0;
            }
        }
    }
    const double n_docs = static_cast<double>(corpus.size());
    SimilarityProvider provider;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        Vector v(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j) {
            if (tf[d][j] > 0.0) {
                v[j] = tf[d][j] * (std::log((1.0 + n_docs) / (1.0 + df[j])) + 1.0);
            }
        }
        double norm = std::sqrt(dot(v, v));
        if (norm == 0.0) {
            if (warnings) {
                *warnings << "warning: abstract '" << corpus[d].id
                          << "' has no tokens; using a uniform tf-idf vector\n";
            }
            std::fill(v.begin(), v.end(), 1.0);
            norm = std::sqrt(static_cast<double>(dim));
        }
        for (double& x : v) {
            x /= norm;
        }
        provider.add(corpus[d].id, std::move(v));
    }
    return provider;
}

/// The seed followed by its b-1 most cosine-similar pool members (ties by id).
/// Returns the whole pool when b exceeds it.
inline std::vector<std::string> nn_search(const std::string& seed, const std::vector<std::string>& pool,
                                          std::size_t b, const SimilarityProvider& provider)
{
    if (b < 1) {
        throw ValidationError("nn_search needs b >= 1");
    }
    if (std::find(pool.begin(), pool.end(), seed) == pool.end()) {
        throw ContractError("seed '" + seed + "' is not in the pool");
    }
    const Vector& sv = provider.at(seed);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& id : pool) {
        if (id != seed) {
            scored.emplace_back(cosine(sv, provider.at(id)), id);
        }
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> out{seed};
    for (std::size_t i = 0; i < scored.size() && out.size() < b; ++i) {
        out.push_back(scored[i].second);
    }
    return out;
}

} // namespace cas
