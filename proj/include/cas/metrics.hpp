#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cas/cycle.hpp"
#include "cas/error.hpp"
#include "cas/text.hpp"

namespace cas {

namespace detail {

inline void require_comparable(const BoundaryLabeling& ref, const BoundaryLabeling& hyp, std::size_t k)
{
    if (ref.size() != hyp.size()) {
        throw ValidationError("labelings differ in length: " + std::to_string(ref.size()) + " vs " +
                              std::to_string(hyp.size()));
    }
    if (k < 1) {
        throw ValidationError("window size must be >= 1");
    }
    if (k >= ref.size()) {
        throw ValidationError("window size " + std::to_string(k) + " leaves no window over " +
                              std::to_string(ref.size()) + " sentences");
    }
}

// Segment id of each sentence in linear order.
inline std::vector<std::size_t> segment_ids(const BoundaryLabeling& l)
{
    std::vector<std::size_t> ids(l.size());
    std::size_t seg = 0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        ids[i] = seg;
        if (l.boundary(i)) {
            ++seg;
        }
    }
    return ids;
}

} // namespace detail

/// Half the mean reference segment length, rounded, at least 1. A trailing
/// run without a final boundary counts as a segment.
inline std::size_t default_window_k(const BoundaryLabeling& ref)
{
    if (ref.size() == 0) {
        throw ValidationError("empty labeling");
    }
    std::size_t segments = ref.count();
    if (!ref.boundary(ref.size() - 1)) {
        ++segments;
    }
    const double half = static_cast<double>(ref.size()) / static_cast<double>(segments) / 2.0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(half)));
}

/// Fraction of pairs (i, i+k) whose same-segment status differs.
inline double pk(const BoundaryLabeling& ref, const BoundaryLabeling& hyp, std::size_t k)
{
    detail::require_comparable(ref, hyp, k);
    const auto r = detail::segment_ids(ref);
    const auto h = detail::segment_ids(hyp);
    const std::size_t windows = ref.size() - k;
    std::size_t miss = 0;
    for (std::size_t i = 0; i < windows; ++i) {
        if ((r[i] == r[i + k]) != (h[i] == h[i + k])) {
            ++miss;
        }
    }
    return static_cast<double>(miss) / static_cast<double>(windows);
}

inline double pk(const BoundaryLabeling& ref, const BoundaryLabeling& hyp)
{
    return pk(ref, hyp, default_window_k(ref));
}

/// Fraction of windows [i, i+k] whose boundary counts differ.
inline double window_diff(const BoundaryLabeling& ref, const BoundaryLabeling& hyp, std::size_t k)
{
    detail::require_comparable(ref, hyp, k);
    const std::size_t windows = ref.size() - k;
    std::size_t miss = 0;
    for (std::size_t i = 0; i < windows; ++i) {
        std::size_t br = 0;
        std::size_t bh = 0;
        for (std::size_t j = i; j < i + k; ++j) {
            br += ref.boundary(j) ? 1 : 0;
            bh += hyp.boundary(j) ? 1 : 0;
        }
        if (br != bh) {
            ++miss;
        }
    }
    return static_cast<double>(miss) / static_cast<double>(windows);
}

inline double window_diff(const BoundaryLabeling& ref, const BoundaryLabeling& hyp)
{
    return window_diff(ref, hyp, default_window_k(ref));
}

inline double jaccard(const SentenceIndices& hyp, const SentenceIndices& ref)
{
    const std::set<std::size_t> h(hyp.begin(), hyp.end());
    const std::set<std::size_t> r(ref.begin(), ref.end());
    if (h.empty() && r.empty()) {
        return 1.0;
    }
    std::size_t common = 0;
    for (const auto i : h) {
        common += r.count(i);
    }
    return static_cast<double>(common) / static_cast<double>(h.size() + r.size() - common);
}

struct RougeScores {
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rouge_lsum = 0.0;

    double mean() const { return (rouge1 + rouge2 + rouge_lsum) / 3.0; }
};

namespace detail {

inline double f_measure(double hits, double hyp_total, double ref_total)
{
    if (hits <= 0.0 || hyp_total <= 0.0 || ref_total <= 0.0) {
        return 0.0;
    }
    const double p = hits / hyp_total;
    const double r = hits / ref_total;
    return 2.0 * p * r / (p + r);
}

inline double ngram_f(const Tokens& hyp, const Tokens& ref, std::size_t order)
{
    const auto grams = [order](const Tokens& t) {
        std::map<std::vector<std::string>, std::size_t> out;
        for (std::size_t i = 0; i + order <= t.size(); ++i) {
            ++out[std::vector<std::string>(t.begin() + static_cast<long>(i),
                                           t.begin() + static_cast<long>(i + order))];
        }
        return out;
    };
    const auto h = grams(hyp);
    const auto r = grams(ref);
    std::size_t hits = 0;
    std::size_t h_total = 0;
    std::size_t r_total = 0;
    for (const auto& [g, c] : h) {
        h_total += c;
        if (const auto it = r.find(g); it != r.end()) {
            hits += std::min(c, it->second);
        }
    }
    for (const auto& [g, c] : r) {
        r_total += c;
    }
    return f_measure(static_cast<double>(hits), static_cast<double>(h_total), static_cast<double>(r_total));
}

// Indices into `ref` of one LCS of (ref, hyp), recovered by the usual
// backtrack preferring to drop a reference token on ties.
inline std::vector<std::size_t> lcs_indices(const Tokens& ref, const Tokens& hyp)
{
    const std::size_t rows = ref.size();
    const std::size_t cols = hyp.size();
    std::vector<std::vector<std::size_t>> t(rows + 1, std::vector<std::size_t>(cols + 1, 0));
    for (std::size_t i = 1; i <= rows; ++i) {
        for (std::size_t j = 1; j <= cols; ++j) {
            t[i][j] = ref[i - 1] == hyp[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
        }
    }
    std::vector<std::size_t> out;
    std::size_t i = rows;
    std::size_t j = cols;
    while (i > 0 && j > 0) {
        if (ref[i - 1] == hyp[j - 1]) {
            out.push_back(i - 1);
            --i;
            --j;
        } else if (t[i][j - 1] > t[i - 1][j]) {
            --j;
        } else {
            --i;
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline Tokens flatten(const std::vector<Tokens>& sentences)
{
    Tokens out;
    for (const auto& s : sentences) {
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

// Summary-level LCS: per reference sentence, the union of its LCS hits with
// every hypothesis sentence, with hits clipped by the token counts.
inline double lsum_f(const std::vector<Tokens>& hyp, const std::vector<Tokens>& ref)
{
    std::map<std::string, std::size_t> ref_left;
    std::map<std::string, std::size_t> hyp_left;
    std::size_t ref_total = 0;
    std::size_t hyp_total = 0;
    for (const auto& s : ref) {
        for (const auto& t : s) {
            ++ref_left[t];
            ++ref_total;
        }
    }
    for (const auto& s : hyp) {
        for (const auto& t : s) {
            ++hyp_left[t];
            ++hyp_total;
        }
    }
    std::size_t hits = 0;
    for (const auto& r : ref) {
        std::set<std::size_t> uni;
        for (const auto& h : hyp) {
            const auto idx = lcs_indices(r, h);
            uni.insert(idx.begin(), idx.end());
        }
        for (const auto i : uni) {
            auto& cr = ref_left[r[i]];
            auto& ch = hyp_left[r[i]];
            if (cr > 0 && ch > 0) {
                --cr;
                --ch;
                ++hits;
            }
        }
    }
    return f_measure(static_cast<double>(hits), static_cast<double>(hyp_total), static_cast<double>(ref_total));
}

} // namespace detail

/// ROUGE-1, ROUGE-2 and ROUGE-Lsum f-measures over sentence-split token lists.
inline RougeScores rouge(const std::vector<Tokens>& hyp, const std::vector<Tokens>& ref)
{
    const Tokens r = detail::flatten(ref);
    if (r.empty()) {
        throw ValidationError("ROUGE reference is empty");
    }
    const Tokens h = detail::flatten(hyp);
    RougeScores s;
    if (h.empty()) {
        return s;
    }
    s.rouge1 = detail::ngram_f(h, r, 1);
    s.rouge2 = detail::ngram_f(h, r, 2);
    s.rouge_lsum = detail::lsum_f(hyp, ref);
    return s;
}

inline double rouge_mean(const std::vector<Tokens>& hyp, const std::vector<Tokens>& ref)
{
    return rouge(hyp, ref).mean();
}

inline double rouge_mean(const Tokens& hyp, const Tokens& ref)
{
    return rouge(std::vector<Tokens>{hyp}, std::vector<Tokens>{ref}).mean();
}

} // namespace cas
