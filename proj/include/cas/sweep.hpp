#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cas/corpus.hpp"
#include "cas/error.hpp"
#include "cas/nmi.hpp"

namespace cas {

/// 1-D Gaussian smoothing with mirror ("reflect") boundaries and a kernel
/// truncated at 4 sigma; matches scipy.ndimage.gaussian_filter1d defaults.
inline std::vector<double> gaussian_filter1d(std::span<const double> input, double sigma)
{
    if (!(sigma > 0.0)) {
        throw ValidationError("gaussian filter sigma must be positive");
    }
    const auto n = static_cast<long>(input.size());
    if (n == 0) {
        return {};
    }
    const long radius = static_cast<long>(4.0 * sigma + 0.5);
    std::vector<double> weights(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (long x = -radius; x <= radius; ++x) {
        const double w = std::exp(-0.5 * static_cast<double>(x * x) / (sigma * sigma));
        weights[static_cast<std::size_t>(x + radius)] = w;
        norm += w;
    }
    for (double& w : weights) {
        w /= norm;
    }
    const auto reflect = [n](long i) {
        long m = i % (2 * n);
        if (m < 0) {
            m += 2 * n;
        }
        return m < n ? m : 2 * n - m - 1;
    };
    std::vector<double> out(input.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long x = -radius; x <= radius; ++x) {
            acc += weights[static_cast<std::size_t>(x + radius)] *
                   input[static_cast<std::size_t>(reflect(i + x))];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

struct SweepPoint {
    std::size_t position = 0; // words kept in the premise; the boundary follows word position-1
    double nmi = 0.0;
    double smoothed = 0.0;
    bool sentence_end = false; // boundary coincides with a sentence end
};

struct SweepResult {
    std::string target_id;
    std::size_t word_count = 0;
    double sigma = 0.0;
    std::vector<SweepPoint> points; // positions 1 .. word_count-1, ascending
};

/// NMI as a word-level boundary slides through one abstract while every other
/// abstract keeps its gold conclusion set. The target's words are read in
/// order; at position s the premise holds the first s words and the conclusion
/// the rest. Positions 0 and word_count leave a segment empty and are skipped.
/// Counts are updated one moved word at a time; NMI is re-evaluated in full at
/// each position.
inline SweepResult word_boundary_sweep(const Corpus& corpus, const std::string& target_id,
                                       const std::map<std::string, SentenceIndices>& gold,
                                       double sigma, const NmiOptions& opts = {})
{
    const TokenizedAbstract* target = find_abstract(corpus, target_id);
    if (!target) {
        throw ValidationError("unknown target abstract '" + target_id + "'");
    }
    auto vocab = std::make_shared<const Vocabulary>(Vocabulary::from_corpus(corpus));

    Tokens words;
    std::set<std::size_t> sentence_ends;
    for (const auto& s : target->sentences) {
        words.insert(words.end(), s.begin(), s.end());
        sentence_ends.insert(words.size());
    }
    const std::size_t w = words.size();
    if (w < 2) {
        throw ValidationError("target abstract '" + target_id + "' has fewer than two tokens");
    }

    std::vector<std::string> ids;
    std::vector<SegmentCounts> segs;
    std::size_t target_index = 0;
    for (const auto& a : corpus) {
        if (a.id == target_id) {
            target_index = ids.size();
            std::map<TokenId, std::int64_t> premise;
            std::map<TokenId, std::int64_t> conclusion;
            for (std::size_t i = 0; i + 1 < w; ++i) {
                ++premise[vocab->id(words[i])];
            }
            ++conclusion[vocab->id(words[w - 1])];
            ids.push_back(a.id);
            segs.push_back({detail::to_sparse(premise), detail::to_sparse(conclusion)});
            continue;
        }
        const auto it = gold.find(a.id);
        if (it == gold.end()) {
            throw ValidationError("abstract '" + a.id + "' has no gold conclusions for the sweep");
        }
        ids.push_back(a.id);
        segs.push_back(count_segments(a, conclusion_mask(it->second, a.n()), *vocab));
    }
    CountTable table(vocab, std::move(ids), std::move(segs));

    SweepResult result;
    result.target_id = target_id;
    result.word_count = w;
    result.sigma = sigma;
    result.points.resize(w - 1);
    for (std::size_t pos = w - 1; pos >= 1; --pos) {
        const auto ev = detail::evaluate(table.accumulate(), opts);
        auto& pt = result.points[pos - 1];
        pt.position = pos;
        pt.nmi = ev.status == detail::NmiStatus::ok ? ev.report.nmi
                                                    : std::numeric_limits<double>::quiet_NaN();
        pt.sentence_end = sentence_ends.count(pos) != 0;
        if (pos > 1) {
            table.move_token(target_index, words[pos - 1], Space::premise);
        }
    }

    std::vector<double> raw;
    raw.reserve(result.points.size());
    for (const auto& p : result.points) {
        raw.push_back(p.nmi);
    }
    const auto smooth = gaussian_filter1d(raw, sigma);
    for (std::size_t i = 0; i < smooth.size(); ++i) {
        result.points[i].smoothed = smooth[i];
    }
    return result;
}

/// Gold conclusion sets of every gold-labelled abstract.
inline std::map<std::string, SentenceIndices> gold_conclusions(const Corpus& corpus)
{
    std::map<std::string, SentenceIndices> out;
    for (const auto& a : corpus) {
        if (a.gold) {
            out[a.id] = *a.gold;
        }
    }
    return out;
}

} // namespace cas
