#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cas/corpus.hpp"
#include "cas/cycle.hpp"
#include "cas/error.hpp"
#include "cas/nmi.hpp"
#include "cas/rng.hpp"
#include "cas/similarity.hpp"

namespace cas {

enum class SimilarityBackend { lexical_tfidf, external_embeddings };

struct GreedyConfig {
    std::size_t epochs = 5;
    std::size_t batch_size = 12;
    std::size_t chunk_size = 48;
    std::uint64_t rng_seed = 0;
    SimilarityBackend similarity_backend = SimilarityBackend::lexical_tfidf;
    bool renormalize_joint = false;
    double normalizer_order = -std::numeric_limits<double>::infinity();
    std::size_t threads = 1; // concurrent candidate evaluations per epoch

    NmiOptions nmi_options() const { return {renormalize_joint, normalizer_order}; }

    void validate() const
    {
        if (epochs < 1) {
            throw ValidationError("epochs must be >= 1");
        }
        if (batch_size < 2) {
            throw ValidationError("batch size must be >= 2");
        }
        if (batch_size > chunk_size) {
            throw ValidationError("batch size " + std::to_string(batch_size) +
                                  " exceeds chunk size " + std::to_string(chunk_size));
        }
        if (threads < 1) {
            throw ValidationError("threads must be >= 1");
        }
    }
};

struct FixRecord {
    std::string id;
    std::size_t config_rank = 0;
    std::optional<double> nmi_at_fix; // empty when every candidate was degenerate
};

struct BatchTrace {
    std::vector<std::string> ids; // NN batches list the seed first
    std::vector<FixRecord> fixes; // in commitment order
    std::optional<double> final_nmi;
};

struct GreedyResult {
    SegmentationAssignment assignment;
    std::map<std::string, std::optional<double>> nmi_at_fix;
    std::vector<BatchTrace> batches;

    void absorb(GreedyResult&& other)
    {
        assignment.merge(other.assignment);
        nmi_at_fix.insert(other.nmi_at_fix.begin(), other.nmi_at_fix.end());
        for (auto& b : other.batches) {
            batches.push_back(std::move(b));
        }
    }
};

namespace detail {

// Candidate table for a batch: per abstract, its candidates and their counts
// over a batch-local vocabulary.
struct BatchCandidates {
    std::vector<const TokenizedAbstract*> abstracts;
    std::vector<std::vector<CandidateSegmentation>> candidates;
    std::vector<std::vector<SegmentCounts>> counts;
    std::size_t vocab_size = 0;

    explicit BatchCandidates(std::vector<const TokenizedAbstract*> batch) : abstracts(std::move(batch))
    {
        std::sort(abstracts.begin(), abstracts.end(),
                  [](const auto* a, const auto* b) { return a->id < b->id; });
        std::set<std::string> tokens;
        for (const auto* a : abstracts) {
            for (const auto& s : a->sentences) {
                tokens.insert(s.begin(), s.end());
            }
        }
        const Vocabulary vocab(tokens);
        vocab_size = vocab.size();
        for (const auto* a : abstracts) {
            candidates.push_back(enumerate_candidates(a->n(), a->id));
            auto& per = counts.emplace_back();
            for (const auto& c : candidates.back()) {
                per.push_back(count_segments(*a, conclusion_mask(c.conclusion_window, a->n()), vocab));
            }
        }
    }

    std::optional<double> score(const std::vector<std::size_t>& choice, const NmiOptions& opts) const
    {
        std::vector<const SegmentCounts*> segs(abstracts.size());
        for (std::size_t i = 0; i < abstracts.size(); ++i) {
            segs[i] = &counts[i][choice[i]];
        }
        const auto ev = evaluate(segs, vocab_size, opts);
        if (ev.status != NmiStatus::ok) {
            return std::nullopt;
        }
        return ev.report.nmi;
    }
};

inline double score_or_floor(const std::optional<double>& s)
{
    return s ? *s : -std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Greedy cycled-abstract segmentation over one batch.
///
/// Abstracts are visited in a seeded random order. For the current abstract,
/// each epoch draws one random candidate for every abstract not yet fixed,
/// keeps committed abstracts at their choices, and scores each of the
/// current abstract's candidates by the NMI of the induced premise and
/// conclusion spaces. The best score over all epochs is committed (ties go to
/// the lower config rank) and never revisited. Degenerate evaluations score
/// below every finite NMI.
inline GreedyResult greedycas_base(std::vector<const TokenizedAbstract*> batch, const GreedyConfig& cfg)
{
    if (batch.empty()) {
        throw ValidationError("greedy segmentation needs a non-empty batch");
    }
    if (cfg.epochs < 1) {
        throw ValidationError("epochs must be >= 1");
    }
    const detail::BatchCandidates table(std::move(batch));
    const std::size_t k = table.abstracts.size();
    const NmiOptions opts = cfg.nmi_options();
    Rng rng(cfg.rng_seed);

    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) {
        order[i] = i;
    }
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<std::size_t> choice(k, 0);
    std::vector<bool> fixed(k, false);
    GreedyResult result;
    BatchTrace trace;
    for (const auto* a : table.abstracts) {
        trace.ids.push_back(a->id);
    }

    for (std::size_t pos = 0; pos < k; ++pos) {
        const std::size_t current = order[pos];
        const std::size_t n_cands = table.candidates[current].size();
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_rank = std::numeric_limits<std::size_t>::max();
        std::optional<double> best_raw;

        for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            for (std::size_t r = pos + 1; r < k; ++r) {
                choice[order[r]] = rng.index(table.candidates[order[r]].size());
            }
            std::vector<std::optional<double>> scores(n_cands);
            if (cfg.threads > 1 && n_cands > 1) {
                std::vector<std::future<std::optional<double>>> jobs;
                for (std::size_t j = 0; j < n_cands; ++j) {
                    auto snapshot = choice;
                    snapshot[current] = j;
                    jobs.push_back(std::async(std::launch::async, [&table, &opts, s = std::move(snapshot)] {
                        return table.score(s, opts);
                    }));
                }
                for (std::size_t j = 0; j < n_cands; ++j) {
                    scores[j] = jobs[j].get();
                }
            } else {
                for (std::size_t j = 0; j < n_cands; ++j) {
                    choice[current] = j;
                    scores[j] = table.score(choice, opts);
                }
            }
            for (std::size_t j = 0; j < n_cands; ++j) {
                const double s = detail::score_or_floor(scores[j]);
                if (s > best || (s == best && j < best_rank)) {
                    best = s;
                    best_rank = j;
                    best_raw = scores[j];
                }
            }
        }

        choice[current] = best_rank;
        fixed[current] = true;
        const auto& cand = table.candidates[current][best_rank];
        result.assignment.set(cand);
        result.nmi_at_fix[cand.abstract_id] = best_raw;
        trace.fixes.push_back({cand.abstract_id, best_rank, best_raw});
    }
    trace.final_nmi = table.score(choice, opts);
    result.batches.push_back(std::move(trace));
    return result;
}

inline GreedyResult greedycas_base(const Corpus& batch, const GreedyConfig& cfg)
{
    std::vector<const TokenizedAbstract*> ptrs;
    for (const auto& a : batch) {
        ptrs.push_back(&a);
    }
    return greedycas_base(std::move(ptrs), cfg);
}

/// Seed for the t-th batch of a run; batch 0 uses the run seed itself.
inline std::uint64_t batch_seed(std::uint64_t run_seed, std::uint64_t t)
{
    return run_seed + t * 0x9e3779b97f4a7c15ULL;
}

/// Runs the base search over consecutive batches of a seeded shuffle of the
/// corpus (batch_size = 0 means one batch).
inline GreedyResult greedycas_base_batched(const Corpus& corpus, std::size_t batch_size,
                                           const GreedyConfig& cfg)
{
    if (corpus.empty()) {
        throw ValidationError("greedy segmentation needs a non-empty corpus");
    }
    std::vector<const TokenizedAbstract*> all;
    for (const auto& a : corpus) {
        all.push_back(&a);
    }
    if (batch_size == 0 || batch_size >= all.size()) {
        return greedycas_base(std::move(all), cfg);
    }
    Rng rng(mix_seed(cfg.rng_seed, 0xba5e));
    rng.shuffle(std::span<const TokenizedAbstract*>(all));
    GreedyResult out;
    std::uint64_t t = 0;
    for (std::size_t start = 0; start < all.size(); start += batch_size, ++t) {
        const std::size_t end = std::min(all.size(), start + batch_size);
        GreedyConfig batch_cfg = cfg;
        batch_cfg.rng_seed = batch_seed(cfg.rng_seed, t);
        out.absorb(greedycas_base(std::vector<const TokenizedAbstract*>(all.begin() + static_cast<long>(start),
                                                                        all.begin() + static_cast<long>(end)),
                                  batch_cfg));
    }
    return out;
}

/// Greedy segmentation with nearest-neighbour batching.
///
/// The corpus is cut, in file order, into chunks of `chunk_size` (the last may
/// be shorter). Within a chunk, seeds are drawn at random from the abstracts
/// not yet batched; each seed's batch is itself plus its b-1 most similar
/// remaining chunk-mates, so batches partition the chunk. The base search runs
/// on each batch.
inline GreedyResult greedycas_nn(const Corpus& corpus, const GreedyConfig& cfg,
                                 const SimilarityProvider& provider)
{
    if (corpus.empty()) {
        throw ValidationError("greedy segmentation needs a non-empty corpus");
    }
    cfg.validate();
    // A chunk larger than the corpus shrinks to it, and the batch with it.
    GreedyConfig run = cfg;
    run.chunk_size = std::min(run.chunk_size, corpus.size());
    run.batch_size = std::min(run.batch_size, run.chunk_size);
    provider.require_all(corpus);

    std::map<std::string, const TokenizedAbstract*> by_id;
    for (const auto& a : corpus) {
        by_id[a.id] = &a;
    }
    Rng seed_rng(mix_seed(cfg.rng_seed, 0x5eed));
    GreedyResult out;
    std::uint64_t t = 0;
    for (std::size_t start = 0; start < corpus.size(); start += run.chunk_size) {
        const std::size_t end = std::min(corpus.size(), start + run.chunk_size);
        std::vector<std::string> pool;
        for (std::size_t i = start; i < end; ++i) {
            pool.push_back(corpus[i].id);
        }
        while (!pool.empty()) {
            const std::string seed = pool[seed_rng.index(pool.size())];
            const auto members = nn_search(seed, pool, run.batch_size, provider);
            std::vector<const TokenizedAbstract*> batch;
            for (const auto& id : members) {
                batch.push_back(by_id.at(id));
                pool.erase(std::find(pool.begin(), pool.end(), id));
            }
            GreedyConfig batch_cfg = run;
            batch_cfg.rng_seed = batch_seed(cfg.rng_seed, t++);
            auto res = greedycas_base(std::move(batch), batch_cfg);
            res.batches.back().ids = members;
            out.absorb(std::move(res));
        }
    }
    return out;
}

} // namespace cas
