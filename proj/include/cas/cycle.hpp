#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cas/corpus.hpp"
#include "cas/error.hpp"

namespace cas {

inline constexpr std::size_t kMaxConclusionSentences = 3;

/// One cycled (premise, conclusion) split. The conclusion window is a
/// contiguous run on the sentence cycle that always contains sentence n-1;
/// `alpha` is its first sentence, `xi` its last, both in cycle order.
struct CandidateSegmentation {
    std::string abstract_id;
    SentenceIndices conclusion_window; // in cycle order, e.g. {6, 0, 1}
    std::size_t alpha = 0;
    std::size_t xi = 0;
    std::size_t config_rank = 0;

    std::size_t length() const noexcept { return conclusion_window.size(); }

    // Number of conclusion sentences after the wrap from n-1 to 0.
    std::size_t wrapped() const noexcept { return xi < alpha || length() == 0 ? xi + 1 : 0; }

    SentenceIndices sorted_window() const
    {
        SentenceIndices out = conclusion_window;
        std::sort(out.begin(), out.end());
        return out;
    }

    bool operator==(const CandidateSegmentation&) const = default;
};

/// Bit string over sentences; '1' marks the final sentence of a segment.
struct BoundaryLabeling {
    std::string bits;

    std::size_t size() const noexcept { return bits.size(); }
    bool boundary(std::size_t i) const { return bits.at(i) == '1'; }
    std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), '1')); }

    bool operator==(const BoundaryLabeling&) const = default;
};

/// Enumerates every conclusion window of length 1..min(3, n-1) that is
/// contiguous on the cycle and contains sentence n-1. Order: window length
/// ascending, then number of wrapped sentences ascending.
inline std::vector<CandidateSegmentation> enumerate_candidates(std::size_t n,
                                                               const std::string& abstract_id = {})
{
    if (n < 2) {
        throw ValidationError("abstract '" + abstract_id + "' has " + std::to_string(n) +
                              " sentence(s); a premise/conclusion split needs at least 2");
    }
    std::vector<CandidateSegmentation> out;
    const std::size_t max_len = std::min(kMaxConclusionSentences, n - 1);
    for (std::size_t len = 1; len <= max_len; ++len) {
        for (std::size_t wrap = 0; wrap < len; ++wrap) {
            CandidateSegmentation c;
            c.abstract_id = abstract_id;
            c.alpha = (n - len + wrap) % n;
            for (std::size_t t = 0; t < len; ++t) {
                c.conclusion_window.push_back((c.alpha + t) % n);
            }
            c.xi = c.conclusion_window.back();
            c.config_rank = out.size();
            out.push_back(std::move(c));
        }
    }
    return out;
}

/// Marks sentence i when it and its cyclic successor lie in different
/// segments. Works for any conclusion set (gold sets may be non-contiguous);
/// a set covering every sentence marks only the final one.
inline BoundaryLabeling labeling_from_conclusions(const SentenceIndices& conclusion, std::size_t n)
{
    std::vector<bool> in(n, false);
    for (const std::size_t i : conclusion) {
        in.at(i) = true;
    }
    BoundaryLabeling out{std::string(n, '0')};
    for (std::size_t i = 0; i < n; ++i) {
        if (in[i] != in[(i + 1) % n]) {
            out.bits[i] = '1';
        }
    }
    if (out.count() == 0 && n > 0) {
        out.bits[n - 1] = '1';
    }
    return out;
}

inline BoundaryLabeling boundary_labeling(const CandidateSegmentation& c, std::size_t n)
{
    return labeling_from_conclusions(c.conclusion_window, n);
}

/// Conclusion sentences implied by a labeling: the cyclic segment holding
/// sentence n-1, i.e. from just after the last boundary before n-1 (cyclically)
/// through the first boundary at or after n-1.
inline SentenceIndices conclusions_from_labeling(const BoundaryLabeling& labeling)
{
    const std::size_t n = labeling.size();
    if (n == 0 || labeling.count() == 0) {
        throw ValidationError("labeling has no boundary");
    }
    std::size_t end = n - 1;
    while (!labeling.boundary(end)) {
        end = (end + 1) % n;
    }
    SentenceIndices out;
    std::size_t i = end;
    do {
        out.push_back(i);
        i = (i + n - 1) % n;
    } while (!labeling.boundary(i) && out.size() < n);
    std::sort(out.begin(), out.end());
    return out;
}

struct SegmentTokens {
    Tokens premise;
    Tokens conclusion;
};

inline SegmentTokens apply_segmentation(const TokenizedAbstract& a, const CandidateSegmentation& c)
{
    if (c.abstract_id != a.id) {
        throw ContractError("segmentation for '" + c.abstract_id + "' applied to abstract '" + a.id +
                            "'");
    }
    std::vector<bool> in(a.n(), false);
    for (const std::size_t i : c.conclusion_window) {
        in.at(i) = true;
    }
    SegmentTokens out;
    for (std::size_t i = 0; i < a.n(); ++i) {
        auto& side = in[i] ? out.conclusion : out.premise;
        side.insert(side.end(), a.sentences[i].begin(), a.sentences[i].end());
    }
    return out;
}

/// Corpus-wide choice of one candidate per abstract.
class SegmentationAssignment {
public:
    void set(const CandidateSegmentation& c) { choices_[c.abstract_id] = c; }

    bool contains(const std::string& id) const { return choices_.count(id) != 0; }

    const CandidateSegmentation& at(const std::string& id) const
    {
        const auto it = choices_.find(id);
        if (it == choices_.end()) {
            throw ContractError("assignment has no choice for abstract '" + id + "'");
        }
        return it->second;
    }

    std::size_t size() const noexcept { return choices_.size(); }
    const std::map<std::string, CandidateSegmentation>& choices() const noexcept { return choices_; }

    void merge(const SegmentationAssignment& other)
    {
        for (const auto& [id, c] : other.choices_) {
            if (!choices_.emplace(id, c).second) {
                throw ContractError("abstract '" + id + "' assigned twice");
            }
        }
    }

private:
    std::map<std::string, CandidateSegmentation> choices_;
};

/// The gold conclusion set as a candidate, when it is one of the cycled windows.
inline std::optional<CandidateSegmentation> gold_candidate(const TokenizedAbstract& a)
{
    if (!a.gold || a.n() < 2) {
        return std::nullopt;
    }
    for (auto& c : enumerate_candidates(a.n(), a.id)) {
        if (c.sorted_window() == *a.gold) {
            return c;
        }
    }
    return std::nullopt;
}

} // namespace cas
