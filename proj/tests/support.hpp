#pragma once

// Reference implementations used as test oracles. They follow the textbook
// definitions directly (explicit loops over string tokens, no shared code with
// the library's counting tables).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cas/cas.hpp"

namespace oracle {

struct Seg {
    std::vector<std::string> premise;
    std::vector<std::string> conclusion;
};

struct Result {
    double mi = 0.0;
    double h_premise = 0.0;
    double h_conclusion = 0.0;
    double nmi = std::numeric_limits<double>::quiet_NaN();
};

inline std::size_t count(const std::vector<std::string>& v, const std::string& w)
{
    std::size_t c = 0;
    for (const auto& x : v) {
        c += x == w ? 1 : 0;
    }
    return c;
}

// Explicit summation over every (premise word, conclusion word) pair.
inline Result nmi(const std::vector<Seg>& segs, bool renormalize = false)
{
    std::vector<std::string> all_p;
    std::vector<std::string> all_c;
    for (const auto& s : segs) {
        all_p.insert(all_p.end(), s.premise.begin(), s.premise.end());
        all_c.insert(all_c.end(), s.conclusion.begin(), s.conclusion.end());
    }
    const std::set<std::string> vp(all_p.begin(), all_p.end());
    const std::set<std::string> vc(all_c.begin(), all_c.end());
    const double np = static_cast<double>(all_p.size());
    const double nc = static_cast<double>(all_c.size());

    std::map<std::pair<std::string, std::string>, double> joint;
    double mass = 0.0;
    for (const auto& wp : vp) {
        for (const auto& wc : vc) {
            double num = 0.0;
            for (const auto& s : segs) {
                num += static_cast<double>(count(s.premise, wp) * count(s.conclusion, wc));
            }
            joint[{wp, wc}] = num / (np * nc);
            mass += num / (np * nc);
        }
    }
    Result r;
    for (const auto& [key, j] : joint) {
        if (j <= 0.0) {
            continue;
        }
        const double jj = renormalize ? j / mass : j;
        const double pp = static_cast<double>(count(all_p, key.first)) / np;
        const double pc = static_cast<double>(count(all_c, key.second)) / nc;
        r.mi += jj * std::log2(jj / (pp * pc));
    }
    for (const auto& w : vp) {
        const double p = static_cast<double>(count(all_p, w)) / np;
        r.h_premise -= p * std::log2(p);
    }
    for (const auto& w : vc) {
        const double p = static_cast<double>(count(all_c, w)) / nc;
        r.h_conclusion -= p * std::log2(p);
    }
    const double norm = std::min(r.h_premise, r.h_conclusion);
    if (norm > 0.0) {
        r.nmi = r.mi / norm;
    }
    return r;
}

// Segments of a corpus under explicit conclusion sets.
inline std::vector<Seg> segments(const cas::Corpus& corpus, const std::map<std::string, cas::SentenceIndices>& concl)
{
    std::vector<Seg> out;
    for (const auto& a : corpus) {
        std::set<std::size_t> c(concl.at(a.id).begin(), concl.at(a.id).end());
        Seg s;
        for (std::size_t i = 0; i < a.n(); ++i) {
            auto& side = c.count(i) ? s.conclusion : s.premise;
            side.insert(side.end(), a.sentences[i].begin(), a.sentences[i].end());
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Two sentences are in the same segment iff no boundary bit lies in [i, j).
inline bool same_segment(const std::string& bits, std::size_t i, std::size_t j)
{
    return bits.substr(i, j - i).find('1') == std::string::npos;
}

inline double pk(const std::string& ref, const std::string& hyp, std::size_t k)
{
    double miss = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + k < ref.size(); ++i) {
        miss += same_segment(ref, i, i + k) != same_segment(hyp, i, i + k) ? 1.0 : 0.0;
        total += 1.0;
    }
    return miss / total;
}

inline double window_diff(const std::string& ref, const std::string& hyp, std::size_t k)
{
    double miss = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + k < ref.size(); ++i) {
        const auto r = std::count(ref.begin() + static_cast<long>(i), ref.begin() + static_cast<long>(i + k), '1');
        const auto h = std::count(hyp.begin() + static_cast<long>(i), hyp.begin() + static_cast<long>(i + k), '1');
        miss += r != h ? 1.0 : 0.0;
        total += 1.0;
    }
    return miss / total;
}

inline cas::TokenizedAbstract abstract(std::string id, std::vector<cas::Tokens> sentences,
                                       std::optional<cas::SentenceIndices> gold = std::nullopt)
{
    return {std::move(id), std::move(sentences), std::move(gold)};
}

// A planted synthetic corpus run through the real preprocessing pipeline.
inline cas::Corpus planted(std::size_t n, std::uint64_t seed, std::size_t topic_words = 1)
{
    cas::SyntheticSpec spec;
    spec.num_abstracts = n;
    spec.seed = seed;
    spec.topic_words = topic_words;
    return cas::tokenize(cas::synthetic_corpus(spec));
}

// Best NMI over every joint choice of candidates, by the oracle formula.
inline double exhaustive_best(const cas::Corpus& batch, bool renormalize)
{
    std::vector<std::vector<cas::CandidateSegmentation>> cands;
    for (const auto& a : batch) {
        cands.push_back(cas::enumerate_candidates(a.n(), a.id));
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(batch.size(), 0);
    while (true) {
        std::map<std::string, cas::SentenceIndices> concl;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            concl[batch[i].id] = cands[i][pick[i]].sorted_window();
        }
        const auto r = nmi(segments(batch, concl), renormalize);
        if (!std::isnan(r.nmi) && r.nmi > best) {
            best = r.nmi;
        }
        std::size_t d = 0;
        while (d < pick.size() && ++pick[d] == cands[d].size()) {
            pick[d++] = 0;
        }
        if (d == pick.size()) {
            break;
        }
    }
    return best;
}

} // namespace oracle
