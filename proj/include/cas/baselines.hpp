#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "cas/corpus.hpp"
#include "cas/cycle.hpp"
#include "cas/error.hpp"
#include "cas/rng.hpp"
#include "cas/nmi.hpp"
#include "cas/similarity.hpp"

namespace cas {

namespace detail {

inline void require_two_sentences(const TokenizedAbstract& a)
{
    if (a.n() < 2) {
        throw ValidationError("abstract '" + a.id + "' has fewer than two sentences");
    }
}

// Boundary after sentence `split` plus the end boundary.
inline BoundaryLabeling split_with_end(std::size_t split, std::size_t n)
{
    BoundaryLabeling out{std::string(n, '0')};
    out.bits[split] = '1';
    out.bits[n - 1] = '1';
    return out;
}

} // namespace detail

/// Boundaries after two distinct, uniformly chosen sentences.
inline BoundaryLabeling random_base(std::size_t n, Rng& rng)
{
    if (n < 2) {
        throw ValidationError("random-base needs at least two sentences");
    }
    const std::size_t first = rng.index(n);
    std::size_t second = rng.index(n - 1);
    if (second >= first) {
        ++second;
    }
    BoundaryLabeling out{std::string(n, '0')};
    out.bits[first] = '1';
    out.bits[second] = '1';
    return out;
}

inline BoundaryLabeling random_base(const TokenizedAbstract& a, Rng& rng) { return random_base(a.n(), rng); }

/// Uniform pick among the cycled candidates.
inline CandidateSegmentation random_plus(const TokenizedAbstract& a, Rng& rng)
{
    auto cands = enumerate_candidates(a.n(), a.id);
    return cands[rng.index(cands.size())];
}

struct TextTilingParams {
    std::size_t block_size = 2;
    std::size_t smoothing_width = 1;
    double depth_cutoff_multiplier = 0.5;

    void validate() const
    {
        if (block_size < 1) {
            throw ValidationError("TextTiling block size must be >= 1");
        }
    }
};

/// Per-gap scores; gap g sits between sentences g and g+1.
struct TextTilingScores {
    std::vector<double> similarity;
    std::vector<double> smoothed;
    std::vector<double> depth;
    double cutoff = 0.0;
    std::vector<std::size_t> boundaries; // gaps with depth above the cutoff
};

inline TextTilingScores texttiling_scores(const TokenizedAbstract& a, const TextTilingParams& p)
{
    p.validate();
    detail::require_two_sentences(a);
    const std::size_t n = a.n();
    const std::size_t gaps = n - 1;
    TextTilingScores s;

    const auto block_vector = [&](std::size_t from, std::size_t to) { // [from, to)
        std::map<std::string, double> tf;
        for (std::size_t i = from; i < to; ++i) {
            for (const auto& t : a.sentences[i]) {
                tf[t] += 1.0;
            }
        }
        return tf;
    };
    for (std::size_t g = 0; g < gaps; ++g) {
        const std::size_t left_begin = g + 1 >= p.block_size ? g + 1 - p.block_size : 0;
        const auto left = block_vector(left_begin, g + 1);
        const auto right = block_vector(g + 1, std::min(n, g + 1 + p.block_size));
        double num = 0.0;
        double nl = 0.0;
        double nr = 0.0;
        for (const auto& [t, c] : left) {
            nl += c * c;
            if (const auto it = right.find(t); it != right.end()) {
                num += c * it->second;
            }
        }
        for (const auto& [t, c] : right) {
            nr += c * c;
        }
        s.similarity.push_back(nl > 0.0 && nr > 0.0 ? num / std::sqrt(nl * nr) : 0.0);
    }

    for (std::size_t g = 0; g < gaps; ++g) {
        const std::size_t lo = g >= p.smoothing_width ? g - p.smoothing_width : 0;
        const std::size_t hi = std::min(gaps - 1, g + p.smoothing_width);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            sum += s.similarity[j];
        }
        s.smoothed.push_back(sum / static_cast<double>(hi - lo + 1));
    }

    for (std::size_t g = 0; g < gaps; ++g) {
        double left_peak = s.smoothed[g];
        for (std::size_t j = g; j > 0 && s.smoothed[j - 1] >= left_peak; --j) {
            left_peak = s.smoothed[j - 1];
        }
        double right_peak = s.smoothed[g];
        for (std::size_t j = g + 1; j < gaps && s.smoothed[j] >= right_peak; ++j) {
            right_peak = s.smoothed[j];
        }
        s.depth.push_back((left_peak - s.smoothed[g]) + (right_peak - s.smoothed[g]));
    }

    double mean = 0.0;
    for (const double d : s.depth) {
        mean += d;
    }
    mean /= static_cast<double>(gaps);
    double var = 0.0;
    for (const double d : s.depth) {
        var += (d - mean) * (d - mean);
    }
    var /= static_cast<double>(gaps);
    s.cutoff = mean - p.depth_cutoff_multiplier * std::sqrt(var);
    for (std::size_t g = 0; g < gaps; ++g) {
        if (s.depth[g] > s.cutoff) {
            s.boundaries.push_back(g);
        }
    }
    return s;
}

/// TextTiling reduced to one topic boundary plus the end boundary. When several
/// gaps pass the depth cutoff the deepest is kept (earliest on ties); when none
/// does, the deepest gap is used anyway.
inline BoundaryLabeling texttiling(const TokenizedAbstract& a, const TextTilingParams& p = {})
{
    const auto s = texttiling_scores(a, p);
    const auto& pool = s.boundaries;
    std::size_t best = 0;
    double best_depth = -std::numeric_limits<double>::infinity();
    const auto consider = [&](std::size_t g) {
        if (s.depth[g] > best_depth) {
            best_depth = s.depth[g];
            best = g;
        }
    };
    if (pool.empty()) {
        for (std::size_t g = 0; g < s.depth.size(); ++g) {
            consider(g);
        }
    } else {
        for (const std::size_t g : pool) {
            consider(g);
        }
    }
    return detail::split_with_end(best, a.n());
}

namespace detail {

inline Vector mean_vector(const TokenizedAbstract& a, const std::vector<bool>& take,
                          const SimilarityProvider& sentences)
{
    Vector acc(sentences.dimension(), 0.0);
    double count = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        if (!take[i]) {
            continue;
        }
        const auto& v = sentences.at(sentence_vector_id(a.id, i));
        for (std::size_t d = 0; d < acc.size(); ++d) {
            acc[d] += v[d];
        }
        count += 1.0;
    }
    for (double& x : acc) {
        x /= count;
    }
    return acc;
}

} // namespace detail

/// Two-segment split maximising the cosine between the mean sentence vectors of
/// the segments. Linear splits by default (premise = sentences before the
/// split, plus the end boundary); `cycled` searches the cycled candidates
/// instead. Ties go to the earliest split / lowest config rank.
inline BoundaryLabeling embed_sim_baseline(const TokenizedAbstract& a, const SimilarityProvider& sentences,
                                           bool cycled = false)
{
    detail::require_two_sentences(a);
    for (std::size_t i = 0; i < a.n(); ++i) {
        if (!sentences.contains(sentence_vector_id(a.id, i))) {
            throw ValidationError("no sentence vector for '" + sentence_vector_id(a.id, i) + "'");
        }
    }
    const std::size_t n = a.n();
    double best = -std::numeric_limits<double>::infinity();
    if (cycled) {
        const auto cands = enumerate_candidates(n, a.id);
        std::size_t best_rank = 0;
        for (const auto& c : cands) {
            const auto mask = conclusion_mask(c.conclusion_window, n);
            std::vector<bool> premise(n);
            for (std::size_t i = 0; i < n; ++i) {
                premise[i] = !mask[i];
            }
            const double sim = cosine(detail::mean_vector(a, premise, sentences),
                                      detail::mean_vector(a, mask, sentences));
            if (sim > best) {
                best = sim;
                best_rank = c.config_rank;
            }
        }
        return boundary_labeling(cands[best_rank], n);
    }
    std::size_t best_split = 1;
    for (std::size_t split = 1; split < n; ++split) {
        std::vector<bool> premise(n, false);
        std::vector<bool> conclusion(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            (i < split ? premise : conclusion)[i] = true;
        }
        const double sim = cosine(detail::mean_vector(a, premise, sentences),
                                  detail::mean_vector(a, conclusion, sentences));
        if (sim > best) {
            best = sim;
            best_split = split;
        }
    }
    return detail::split_with_end(best_split - 1, n);
}

} // namespace cas
