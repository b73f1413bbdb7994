#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cas/corpus.hpp"
#include "cas/cycle.hpp"
#include "cas/error.hpp"

namespace cas {

using TokenId = std::uint32_t;

/// Sorted token list; ids follow lexicographic order so that any loop over ids
/// is also a loop in sorted token order.
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(const std::set<std::string>& tokens) : tokens_(tokens.begin(), tokens.end()) {}

    static Vocabulary from_corpus(std::span<const TokenizedAbstract> corpus)
    {
        std::set<std::string> all;
        for (const auto& a : corpus) {
            for (const auto& s : a.sentences) {
                all.insert(s.begin(), s.end());
            }
        }
        return Vocabulary(all);
    }

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::string& token(TokenId id) const { return tokens_.at(id); }

    std::optional<TokenId> find(std::string_view token) const
    {
        const auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
        if (it == tokens_.end() || *it != token) {
            return std::nullopt;
        }
        return static_cast<TokenId>(it - tokens_.begin());
    }

    TokenId id(std::string_view token) const
    {
        if (auto found = find(token)) {
            return *found;
        }
        throw ContractError("token '" + std::string(token) + "' not in vocabulary");
    }

private:
    std::vector<std::string> tokens_;
};

enum class Space { premise, conclusion };

struct TokenCount {
    TokenId token;
    std::int64_t count;

    bool operator==(const TokenCount&) const = default;
};

// Sorted by token id, counts > 0.
using SparseCounts = std::vector<TokenCount>;

/// Unigram counts of one abstract's premise and conclusion segments.
struct SegmentCounts {
    SparseCounts premise;
    SparseCounts conclusion;

    const SparseCounts& side(Space s) const { return s == Space::premise ? premise : conclusion; }
    SparseCounts& side(Space s) { return s == Space::premise ? premise : conclusion; }

    bool operator==(const SegmentCounts&) const = default;
};

namespace detail {

inline std::int64_t total(const SparseCounts& counts)
{
    std::int64_t t = 0;
    for (const auto& tc : counts) {
        t += tc.count;
    }
    return t;
}

inline std::int64_t lookup(const SparseCounts& counts, TokenId token)
{
    const auto it = std::lower_bound(counts.begin(), counts.end(), token,
                                     [](const TokenCount& tc, TokenId t) { return tc.token < t; });
    return it != counts.end() && it->token == token ? it->count : 0;
}

inline void adjust(SparseCounts& counts, TokenId token, std::int64_t delta)
{
    auto it = std::lower_bound(counts.begin(), counts.end(), token,
                               [](const TokenCount& tc, TokenId t) { return tc.token < t; });
    if (it == counts.end() || it->token != token) {
        if (delta < 0) {
            throw ContractError("cannot remove a token that is not present");
        }
        counts.insert(it, TokenCount{token, delta});
        return;
    }
    it->count += delta;
    if (it->count < 0) {
        throw ContractError("token count would become negative");
    }
    if (it->count == 0) {
        counts.erase(it);
    }
}

inline SparseCounts to_sparse(const std::map<TokenId, std::int64_t>& m)
{
    SparseCounts out;
    out.reserve(m.size());
    for (const auto& [t, c] : m) {
        out.push_back({t, c});
    }
    return out;
}

} // namespace detail

/// Counts for one abstract given a per-sentence conclusion mask.
inline SegmentCounts count_segments(const TokenizedAbstract& a, const std::vector<bool>& in_conclusion,
                                    const Vocabulary& vocab)
{
    std::map<TokenId, std::int64_t> premise;
    std::map<TokenId, std::int64_t> conclusion;
    for (std::size_t i = 0; i < a.n(); ++i) {
        auto& side = in_conclusion.at(i) ? conclusion : premise;
        for (const auto& tok : a.sentences[i]) {
            ++side[vocab.id(tok)];
        }
    }
    return {detail::to_sparse(premise), detail::to_sparse(conclusion)};
}

inline std::vector<bool> conclusion_mask(const SentenceIndices& conclusion, std::size_t n)
{
    std::vector<bool> mask(n, false);
    for (const std::size_t i : conclusion) {
        mask.at(i) = true;
    }
    return mask;
}

/// Knobs for the NMI objective.
///
/// `renormalize_joint` divides the co-occurrence joint by its total mass so it
/// sums to one; by default the joint is used exactly as defined, whose mass is
/// generally below one. `order` selects the power-mean normaliser over the two
/// entropies: -inf is min(H_P, H_C), +inf is max, 0 the geometric mean.
struct NmiOptions {
    bool renormalize_joint = false;
    double order = -std::numeric_limits<double>::infinity();
};

struct NmiReport {
    double mi_bits = 0.0;
    double entropy_premise_bits = 0.0;
    double entropy_conclusion_bits = 0.0;
    double normalizer_bits = 0.0;
    double nmi = 0.0;
    double joint_mass = 0.0;
};

inline double power_mean_normalizer(double u_premise, double u_conclusion, double order)
{
    if (std::isinf(order)) {
        return order < 0 ? std::min(u_premise, u_conclusion) : std::max(u_premise, u_conclusion);
    }
    if (order == 0.0) {
        return std::sqrt(u_premise * u_conclusion);
    }
    return std::pow(0.5 * (std::pow(u_premise, order) + std::pow(u_conclusion, order)), 1.0 / order);
}

namespace detail {

enum class NmiStatus { ok, empty_premise, empty_conclusion, zero_normalizer };

struct PairSum {
    std::uint64_t key; // premise id << 32 | conclusion id
    std::int64_t sum;  // sum over abstracts of c(w_p, P_i) * c(w_c, C_i)
};

inline std::uint64_t pair_key(TokenId p, TokenId c) { return (std::uint64_t{p} << 32) | c; }
inline TokenId pair_premise(std::uint64_t key) { return static_cast<TokenId>(key >> 32); }
inline TokenId pair_conclusion(std::uint64_t key) { return static_cast<TokenId>(key & 0xffffffffU); }

/// Marginal totals and merged co-occurrence sums for a set of segments.
struct Accumulated {
    std::vector<std::int64_t> premise_totals;
    std::vector<std::int64_t> conclusion_totals;
    std::int64_t premise_grand = 0;
    std::int64_t conclusion_grand = 0;
    std::int64_t size_product_sum = 0; // sum over abstracts of |P_i| * |C_i|
    std::vector<PairSum> pairs;        // sorted by key, sums > 0
};

template<class SegmentPtrs>
Accumulated accumulate(const SegmentPtrs& segments, std::size_t vocab_size)
{
    Accumulated acc;
    acc.premise_totals.assign(vocab_size, 0);
    acc.conclusion_totals.assign(vocab_size, 0);
    std::size_t pair_upper = 0;
    for (const SegmentCounts* seg : segments) {
        pair_upper += seg->premise.size() * seg->conclusion.size();
    }
    std::vector<PairSum> raw;
    raw.reserve(pair_upper);
    for (const SegmentCounts* seg : segments) {
        std::int64_t p_size = 0;
        std::int64_t c_size = 0;
        for (const auto& tc : seg->premise) {
            acc.premise_totals[tc.token] += tc.count;
            p_size += tc.count;
        }
        for (const auto& tc : seg->conclusion) {
            acc.conclusion_totals[tc.token] += tc.count;
            c_size += tc.count;
        }
        acc.premise_grand += p_size;
        acc.conclusion_grand += c_size;
        acc.size_product_sum += p_size * c_size;
        for (const auto& p : seg->premise) {
            for (const auto& c : seg->conclusion) {
                raw.push_back({pair_key(p.token, c.token), p.count * c.count});
            }
        }
    }
    std::sort(raw.begin(), raw.end(), [](const PairSum& a, const PairSum& b) { return a.key < b.key; });
    for (const auto& ps : raw) {
        if (!acc.pairs.empty() && acc.pairs.back().key == ps.key) {
            acc.pairs.back().sum += ps.sum;
        } else {
            acc.pairs.push_back(ps);
        }
    }
    return acc;
}

inline double entropy_bits(const std::vector<std::int64_t>& totals, std::int64_t grand)
{
    double h = 0.0;
    const double g = static_cast<double>(grand);
    for (const std::int64_t c : totals) {
        if (c > 0) {
            const double p = static_cast<double>(c) / g;
            h -= p * std::log2(p);
        }
    }
    return h;
}

// Pointwise term p(w_p; w_c) * log2(p(w_p; w_c) / (p(w_p) p(w_c))). The ratio is
// formed from integer counts: joint / (marginal product) = S / (c_p * c_c).
inline double pair_term(const Accumulated& acc, const PairSum& ps, double mass, bool renormalize)
{
    const double grand = static_cast<double>(acc.premise_grand) * static_cast<double>(acc.conclusion_grand);
    double joint = static_cast<double>(ps.sum) / grand;
    double ratio = static_cast<double>(ps.sum) /
                   (static_cast<double>(acc.premise_totals[pair_premise(ps.key)]) *
                    static_cast<double>(acc.conclusion_totals[pair_conclusion(ps.key)]));
    if (renormalize) {
        joint /= mass;
        ratio /= mass;
    }
    return joint * std::log2(ratio);
}

inline double joint_mass(const Accumulated& acc)
{
    return static_cast<double>(acc.size_product_sum) /
           (static_cast<double>(acc.premise_grand) * static_cast<double>(acc.conclusion_grand));
}

struct Evaluation {
    NmiStatus status = NmiStatus::ok;
    NmiReport report;
};

inline Evaluation evaluate(const Accumulated& acc, const NmiOptions& opts)
{
    Evaluation ev;
    if (acc.premise_grand == 0) {
        ev.status = NmiStatus::empty_premise;
        return ev;
    }
    if (acc.conclusion_grand == 0) {
        ev.status = NmiStatus::empty_conclusion;
        return ev;
    }
    auto& r = ev.report;
    r.joint_mass = joint_mass(acc);
    for (const auto& ps : acc.pairs) {
        r.mi_bits += pair_term(acc, ps, r.joint_mass, opts.renormalize_joint);
    }
    r.entropy_premise_bits = entropy_bits(acc.premise_totals, acc.premise_grand);
    r.entropy_conclusion_bits = entropy_bits(acc.conclusion_totals, acc.conclusion_grand);
    r.normalizer_bits =
        power_mean_normalizer(r.entropy_premise_bits, r.entropy_conclusion_bits, opts.order);
    if (!(r.normalizer_bits > 0.0)) {
        ev.status = NmiStatus::zero_normalizer;
        return ev;
    }
    r.nmi = r.mi_bits / r.normalizer_bits;
    return ev;
}

template<class SegmentPtrs>
Evaluation evaluate(const SegmentPtrs& segments, std::size_t vocab_size, const NmiOptions& opts)
{
    return evaluate(accumulate(segments, vocab_size), opts);
}

[[noreturn]] inline void throw_status(NmiStatus status)
{
    switch (status) {
    case NmiStatus::empty_premise:
        throw DegenerateError("premise space is empty");
    case NmiStatus::empty_conclusion:
        throw DegenerateError("conclusion space is empty");
    case NmiStatus::zero_normalizer:
        throw DegenerateError("NMI normalizer is zero (an entropy vanishes)");
    case NmiStatus::ok:
        break;
    }
    throw DegenerateError("degenerate NMI evaluation");
}

} // namespace detail

/// Per-abstract and corpus-wide unigram counts for one premise/conclusion
/// assignment.
class CountTable {
public:
    CountTable(std::shared_ptr<const Vocabulary> vocab, std::vector<std::string> ids,
               std::vector<SegmentCounts> segments)
        : vocab_(std::move(vocab)), ids_(std::move(ids)), segments_(std::move(segments))
    {
        if (ids_.size() != segments_.size()) {
            throw ContractError("CountTable: id and segment counts differ in length");
        }
        recompute_totals();
    }

    /// Counts from explicit conclusion sets (any subset of sentences).
    static CountTable build(const Corpus& corpus,
                            const std::map<std::string, SentenceIndices>& conclusions,
                            std::shared_ptr<const Vocabulary> vocab = nullptr)
    {
        if (!vocab) {
            vocab = std::make_shared<const Vocabulary>(Vocabulary::from_corpus(corpus));
        }
        if (conclusions.size() != corpus.size()) {
            throw ContractError("assignment covers " + std::to_string(conclusions.size()) +
                                " abstracts, corpus has " + std::to_string(corpus.size()));
        }
        std::vector<std::string> ids;
        std::vector<SegmentCounts> segs;
        for (const auto& a : corpus) {
            const auto it = conclusions.find(a.id);
            if (it == conclusions.end()) {
                throw ContractError("assignment has no choice for abstract '" + a.id + "'");
            }
            ids.push_back(a.id);
            segs.push_back(count_segments(a, conclusion_mask(it->second, a.n()), *vocab));
        }
        return CountTable(std::move(vocab), std::move(ids), std::move(segs));
    }

    static CountTable build(const Corpus& corpus, const SegmentationAssignment& assignment,
                            std::shared_ptr<const Vocabulary> vocab = nullptr)
    {
        std::map<std::string, SentenceIndices> conclusions;
        for (const auto& a : corpus) {
            const auto& c = assignment.at(a.id);
            if (c.abstract_id != a.id) {
                throw ContractError("segmentation for '" + c.abstract_id + "' filed under '" + a.id + "'");
            }
            conclusions[a.id] = c.conclusion_window;
        }
        if (assignment.size() != corpus.size()) {
            throw ContractError("assignment contains abstracts outside the corpus");
        }
        return build(corpus, conclusions, std::move(vocab));
    }

    const Vocabulary& vocabulary() const noexcept { return *vocab_; }
    const std::shared_ptr<const Vocabulary>& vocabulary_ptr() const noexcept { return vocab_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::vector<SegmentCounts>& segments() const noexcept { return segments_; }

    std::int64_t total(std::string_view token, Space space) const
    {
        const auto id = vocab_->find(token);
        return id ? totals(space)[*id] : 0;
    }

    std::int64_t count(std::size_t abstract_index, std::string_view token, Space space) const
    {
        const auto id = vocab_->find(token);
        return id ? detail::lookup(segments_.at(abstract_index).side(space), *id) : 0;
    }

    const std::vector<std::int64_t>& totals(Space space) const
    {
        return space == Space::premise ? premise_totals_ : conclusion_totals_;
    }

    std::int64_t grand_total(Space space) const
    {
        return space == Space::premise ? premise_grand_ : conclusion_grand_;
    }

    std::size_t index_of(const std::string& id) const
    {
        const auto it = std::find(ids_.begin(), ids_.end(), id);
        if (it == ids_.end()) {
            throw ContractError("abstract '" + id + "' not in count table");
        }
        return static_cast<std::size_t>(it - ids_.begin());
    }

    /// Moves one occurrence of `token` in one abstract to the other segment.
    void move_token(std::size_t abstract_index, std::string_view token, Space from)
    {
        const TokenId id = vocab_->id(token);
        const Space to = from == Space::premise ? Space::conclusion : Space::premise;
        auto& seg = segments_.at(abstract_index);
        detail::adjust(seg.side(from), id, -1);
        detail::adjust(seg.side(to), id, +1);
        auto& from_totals = from == Space::premise ? premise_totals_ : conclusion_totals_;
        auto& to_totals = from == Space::premise ? conclusion_totals_ : premise_totals_;
        --from_totals[id];
        ++to_totals[id];
        (from == Space::premise ? premise_grand_ : conclusion_grand_) -= 1;
        (from == Space::premise ? conclusion_grand_ : premise_grand_) += 1;
    }

    /// Same abstracts with premise and conclusion roles exchanged.
    CountTable swapped() const
    {
        auto segs = segments_;
        for (auto& s : segs) {
            std::swap(s.premise, s.conclusion);
        }
        return CountTable(vocab_, ids_, std::move(segs));
    }

    std::vector<const SegmentCounts*> segment_ptrs() const
    {
        std::vector<const SegmentCounts*> out;
        out.reserve(segments_.size());
        for (const auto& s : segments_) {
            out.push_back(&s);
        }
        return out;
    }

    detail::Accumulated accumulate() const { return detail::accumulate(segment_ptrs(), vocab_->size()); }

    bool operator==(const CountTable& other) const
    {
        return ids_ == other.ids_ && segments_ == other.segments_ &&
               premise_totals_ == other.premise_totals_ &&
               conclusion_totals_ == other.conclusion_totals_ &&
               premise_grand_ == other.premise_grand_ && conclusion_grand_ == other.conclusion_grand_;
    }

private:
    void recompute_totals()
    {
        premise_totals_.assign(vocab_->size(), 0);
        conclusion_totals_.assign(vocab_->size(), 0);
        premise_grand_ = conclusion_grand_ = 0;
        for (const auto& s : segments_) {
            for (const auto& tc : s.premise) {
                premise_totals_.at(tc.token) += tc.count;
                premise_grand_ += tc.count;
            }
            for (const auto& tc : s.conclusion) {
                conclusion_totals_.at(tc.token) += tc.count;
                conclusion_grand_ += tc.count;
            }
        }
    }

    std::shared_ptr<const Vocabulary> vocab_;
    std::vector<std::string> ids_;
    std::vector<SegmentCounts> segments_;
    std::vector<std::int64_t> premise_totals_;
    std::vector<std::int64_t> conclusion_totals_;
    std::int64_t premise_grand_ = 0;
    std::int64_t conclusion_grand_ = 0;
};

inline double marginal_prob(const CountTable& t, std::string_view token, Space space)
{
    const std::int64_t grand = t.grand_total(space);
    if (grand == 0) {
        throw DegenerateError(space == Space::premise ? "premise space is empty"
                                                      : "conclusion space is empty");
    }
    return static_cast<double>(t.total(token, space)) / static_cast<double>(grand);
}

/// p(w_p; w_c) = sum_i c(w_p, P_i) c(w_c, C_i) / sum over all (w_p', w_c') of
/// c(w_p', P) c(w_c', C). The denominator factorises into the two grand totals.
inline double joint_prob(const CountTable& t, std::string_view premise_token,
                         std::string_view conclusion_token, bool renormalize = false)
{
    const std::int64_t pg = t.grand_total(Space::premise);
    const std::int64_t cg = t.grand_total(Space::conclusion);
    if (pg == 0 || cg == 0) {
        throw DegenerateError("joint probability over an empty space");
    }
    std::int64_t numerator = 0;
    std::int64_t size_products = 0;
    for (std::size_t i = 0; i < t.segments().size(); ++i) {
        numerator += t.count(i, premise_token, Space::premise) *
                     t.count(i, conclusion_token, Space::conclusion);
        size_products += detail::total(t.segments()[i].premise) * detail::total(t.segments()[i].conclusion);
    }
    const double denom = static_cast<double>(pg) * static_cast<double>(cg);
    double joint = static_cast<double>(numerator) / denom;
    if (renormalize) {
        joint /= static_cast<double>(size_products) / denom;
    }
    return joint;
}

inline double entropy(const CountTable& t, Space space)
{
    const std::int64_t grand = t.grand_total(space);
    if (grand == 0) {
        throw DegenerateError(space == Space::premise ? "premise space is empty"
                                                      : "conclusion space is empty");
    }
    return detail::entropy_bits(t.totals(space), grand);
}

inline double mutual_information(const CountTable& t, const NmiOptions& opts = {})
{
    const auto acc = t.accumulate();
    if (acc.premise_grand == 0 || acc.conclusion_grand == 0) {
        throw DegenerateError("mutual information over an empty space");
    }
    const double mass = detail::joint_mass(acc);
    double mi = 0.0;
    for (const auto& ps : acc.pairs) {
        mi += detail::pair_term(acc, ps, mass, opts.renormalize_joint);
    }
    return mi;
}

inline NmiReport nmi(const CountTable& t, const NmiOptions& opts = {})
{
    const auto ev = detail::evaluate(t.accumulate(), opts);
    if (ev.status != detail::NmiStatus::ok) {
        detail::throw_status(ev.status);
    }
    return ev.report;
}

struct PairContribution {
    std::string premise_token;
    std::string conclusion_token;
    double term = 0.0;
};

/// The k word pairs with the largest pointwise MI terms; ties in lexicographic
/// (premise, conclusion) order. k = 0 returns every co-occurring pair.
inline std::vector<PairContribution> top_contributing_pairs(const CountTable& t, std::size_t k,
                                                            const NmiOptions& opts = {})
{
    const auto acc = t.accumulate();
    if (acc.premise_grand == 0 || acc.conclusion_grand == 0) {
        throw DegenerateError("pair contributions over an empty space");
    }
    const double mass = detail::joint_mass(acc);
    std::vector<std::pair<double, std::uint64_t>> terms;
    terms.reserve(acc.pairs.size());
    for (const auto& ps : acc.pairs) {
        terms.emplace_back(detail::pair_term(acc, ps, mass, opts.renormalize_joint), ps.key);
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (k > 0 && terms.size() > k) {
        terms.resize(k);
    }
    std::vector<PairContribution> out;
    out.reserve(terms.size());
    for (const auto& [term, key] : terms) {
        out.push_back({t.vocabulary().token(detail::pair_premise(key)),
                       t.vocabulary().token(detail::pair_conclusion(key)), term});
    }
    return out;
}

} // namespace cas
