#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cas/corpus.hpp"
#include "cas/cycle.hpp"
#include "cas/error.hpp"
#include "cas/metrics.hpp"

namespace cas {

/// A predicted segmentation of one abstract: its boundary bits and the
/// sentences it treats as the conclusion.
struct Hypothesis {
    BoundaryLabeling labeling;
    SentenceIndices conclusions; // sorted
    std::optional<std::size_t> config_rank;
    std::optional<double> nmi_at_fix;

    static Hypothesis from_candidate(const CandidateSegmentation& c, std::size_t n)
    {
        return {boundary_labeling(c, n), c.sorted_window(), c.config_rank, std::nullopt};
    }

    static Hypothesis from_labeling(const BoundaryLabeling& l)
    {
        return {l, conclusions_from_labeling(l), std::nullopt, std::nullopt};
    }

    bool operator==(const Hypothesis&) const = default;
};

using HypothesisSet = std::map<std::string, Hypothesis>;

inline HypothesisSet hypotheses_from(const Corpus& corpus, const SegmentationAssignment& assignment,
                                     const std::map<std::string, std::optional<double>>& nmi_at_fix = {})
{
    HypothesisSet out;
    for (const auto& a : corpus) {
        if (!assignment.contains(a.id)) {
            continue;
        }
        auto h = Hypothesis::from_candidate(assignment.at(a.id), a.n());
        if (const auto it = nmi_at_fix.find(a.id); it != nmi_at_fix.end()) {
            h.nmi_at_fix = it->second;
        }
        out.emplace(a.id, std::move(h));
    }
    return out;
}

struct AbstractScore {
    std::string id;
    std::size_t window_k = 0;
    double pk = 0.0;
    double window_diff = 0.0;
    double jaccard = 0.0;
    double rouge_mean = 0.0;
    std::string reference;  // gold labeling
    std::string hypothesis; // predicted labeling
};

struct MetricReport {
    double pk = 0.0;
    double window_diff = 0.0;
    double jaccard = 0.0;
    double rouge_mean = 0.0;
    std::optional<std::size_t> window_k; // fixed k, or empty when chosen per abstract
    std::vector<AbstractScore> per_abstract;
};

inline BoundaryLabeling gold_labeling(const TokenizedAbstract& a)
{
    if (!a.gold) {
        throw ValidationError("abstract '" + a.id + "' has no gold labels");
    }
    return labeling_from_conclusions(*a.gold, a.n());
}

inline std::vector<Tokens> sentences_at(const TokenizedAbstract& a, const SentenceIndices& idx)
{
    std::vector<Tokens> out;
    for (const auto i : idx) {
        out.push_back(a.sentences.at(i));
    }
    return out;
}

/// Scores one abstract. ROUGE compares the conclusion sentences in text order.
inline AbstractScore score_abstract(const TokenizedAbstract& a, const Hypothesis& h,
                                    std::optional<std::size_t> fixed_k = std::nullopt)
{
    const auto ref = gold_labeling(a);
    if (h.labeling.size() != a.n()) {
        throw ValidationError("hypothesis for '" + a.id + "' has " + std::to_string(h.labeling.size()) +
                              " bits but the abstract has " + std::to_string(a.n()) + " sentences");
    }
    AbstractScore s;
    s.id = a.id;
    s.window_k = fixed_k ? *fixed_k : default_window_k(ref);
    s.pk = pk(ref, h.labeling, s.window_k);
    s.window_diff = window_diff(ref, h.labeling, s.window_k);
    s.jaccard = jaccard(h.conclusions, *a.gold);
    const auto gold_text = sentences_at(a, *a.gold);
    if (detail::flatten(gold_text).empty()) {
        throw ValidationError("gold conclusion of '" + a.id + "' has no tokens after preprocessing");
    }
    s.rouge_mean = rouge_mean(sentences_at(a, h.conclusions), gold_text);
    s.reference = ref.bits;
    s.hypothesis = h.labeling.bits;
    return s;
}

namespace detail {

inline std::string join_ids(const std::vector<std::string>& ids)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += (i ? ", " : "") + ids[i];
        if (i == 9 && ids.size() > 10) {
            out += ", ... (" + std::to_string(ids.size()) + " total)";
            break;
        }
    }
    return out;
}

} // namespace detail

/// Scores every corpus abstract; corpus values are unweighted means.
inline MetricReport evaluate_run(const Corpus& corpus, const HypothesisSet& hyps,
                                 std::optional<std::size_t> fixed_k = std::nullopt)
{
    if (corpus.empty()) {
        throw ValidationError("cannot evaluate an empty corpus");
    }
    std::vector<std::string> no_gold;
    std::vector<std::string> no_hyp;
    std::map<std::string, bool> known;
    for (const auto& a : corpus) {
        known[a.id] = true;
        if (!a.gold) {
            no_gold.push_back(a.id);
        }
        if (!hyps.count(a.id)) {
            no_hyp.push_back(a.id);
        }
    }
    if (!no_gold.empty()) {
        throw ValidationError("abstracts without gold labels: " + detail::join_ids(no_gold));
    }
    if (!no_hyp.empty()) {
        throw ValidationError("abstracts without a hypothesis: " + detail::join_ids(no_hyp));
    }
    std::vector<std::string> unknown;
    for (const auto& [id, h] : hyps) {
        if (!known.count(id)) {
            unknown.push_back(id);
        }
    }
    if (!unknown.empty()) {
        throw ValidationError("hypotheses for unknown abstracts: " + detail::join_ids(unknown));
    }

    MetricReport r;
    r.window_k = fixed_k;
    for (const auto& a : corpus) {
        r.per_abstract.push_back(score_abstract(a, hyps.at(a.id), fixed_k));
    }
    for (const auto& s : r.per_abstract) {
        r.pk += s.pk;
        r.window_diff += s.window_diff;
        r.jaccard += s.jaccard;
        r.rouge_mean += s.rouge_mean;
    }
    const double n = static_cast<double>(r.per_abstract.size());
    r.pk /= n;
    r.window_diff /= n;
    r.jaccard /= n;
    r.rouge_mean /= n;
    return r;
}

inline MetricReport evaluate_run(const Corpus& corpus, const SegmentationAssignment& assignment,
                                 std::optional<std::size_t> fixed_k = std::nullopt)
{
    return evaluate_run(corpus, hypotheses_from(corpus, assignment), fixed_k);
}

inline nlohmann::ordered_json to_json(const MetricReport& r)
{
    nlohmann::ordered_json j;
    j["pk"] = r.pk;
    j["window_diff"] = r.window_diff;
    j["jaccard"] = r.jaccard;
    j["rouge_mean"] = r.rouge_mean;
    j["num_abstracts"] = r.per_abstract.size();
    j["window_k"] = r.window_k ? nlohmann::ordered_json(*r.window_k) : nlohmann::ordered_json("per-abstract");
    auto rows = nlohmann::ordered_json::array();
    for (const auto& s : r.per_abstract) {
        nlohmann::ordered_json row;
        row["id"] = s.id;
        row["k"] = s.window_k;
        row["pk"] = s.pk;
        row["window_diff"] = s.window_diff;
        row["jaccard"] = s.jaccard;
        row["rouge_mean"] = s.rouge_mean;
        row["reference"] = s.reference;
        row["hypothesis"] = s.hypothesis;
        rows.push_back(std::move(row));
    }
    j["per_abstract"] = std::move(rows);
    return j;
}

} // namespace cas
