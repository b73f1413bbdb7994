#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cas/baselines.hpp"
#include "cas/corpus.hpp"
#include "cas/error.hpp"
#include "cas/evaluate.hpp"
#include "cas/greedy.hpp"
#include "cas/io.hpp"
#include "cas/nmi.hpp"
#include "cas/similarity.hpp"
#include "cas/stats.hpp"
#include "cas/sweep.hpp"
#include "cas/synthetic.hpp"

namespace cas::app {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2 };

// Bad or inconsistent flags; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Fully resolved settings of one run. Each command reads the fields it needs;
/// the manifest records exactly those.
struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::string assignment;
    std::string embeddings_file;
    std::string target;

    std::string algo = "nn";
    std::size_t epochs = 5;
    std::optional<std::size_t> batch_size; // nn default 12; base default: whole corpus
    std::size_t chunk_size = 48;
    std::uint64_t seed = 0;
    std::string backend = "tfidf";
    bool renormalize_joint = false;
    double normalizer_order = -std::numeric_limits<double>::infinity();
    std::size_t threads = 1;

    std::string baseline;
    bool cycled = false;
    TextTilingParams texttiling;

    std::optional<std::size_t> window_k;
    double sigma = 3.0;
    std::size_t top = 20;
    std::size_t min_batch = 2;
    std::size_t max_batch = 12;

    SyntheticSpec synth;

    NmiOptions nmi_options() const { return {renormalize_joint, normalizer_order}; }
};

namespace detail {

inline std::string format_number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json order_to_json(double order)
{
    if (std::isinf(order)) {
        return order < 0 ? "min" : "max";
    }
    return order;
}

inline double order_from_json(const nlohmann::json& j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "min") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "max") {
            return std::numeric_limits<double>::infinity();
        }
        throw UsageError("normalizer order must be min, max or a number, got '" + s + "'");
    }
    return j.get<double>();
}

template<class T>
nlohmann::ordered_json opt_json(const std::optional<T>& v)
{
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

inline void require(const std::string& value, const char* flag, const std::string& command)
{
    if (value.empty()) {
        throw UsageError(command + ": " + flag + " is required");
    }
}

inline bool uses_greedy(const std::string& command) { return command == "segment" || command == "correlate"; }

} // namespace detail

/// The settings a command depends on, in a fixed key order.
inline nlohmann::ordered_json config_to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["command"] = c.command;
    if (!c.input.empty()) {
        j["input"] = c.input;
    }
    if (!c.output.empty()) {
        j["output"] = c.output;
    }
    if (!c.assignment.empty()) {
        j["assignment"] = c.assignment;
    }
    if (detail::uses_greedy(c.command)) {
        if (c.command == "segment") {
            j["algo"] = c.algo;
            j["batch_size"] = detail::opt_json(c.batch_size);
        } else {
            j["min_batch"] = c.min_batch;
            j["max_batch"] = c.max_batch;
        }
        j["epochs"] = c.epochs;
        j["chunk_size"] = c.chunk_size;
        j["backend"] = c.backend;
        if (!c.embeddings_file.empty()) {
            j["embeddings_file"] = c.embeddings_file;
        }
        j["threads"] = c.threads;
    }
    if (detail::uses_greedy(c.command) || c.command == "sweep" || c.command == "pairs") {
        j["renormalize_joint"] = c.renormalize_joint;
        j["normalizer_order"] = detail::order_to_json(c.normalizer_order);
    }
    if (c.command == "baseline") {
        j["baseline"] = c.baseline;
        j["cycled"] = c.cycled;
        j["block_size"] = c.texttiling.block_size;
        j["smoothing_width"] = c.texttiling.smoothing_width;
        j["depth_cutoff_multiplier"] = c.texttiling.depth_cutoff_multiplier;
        if (!c.embeddings_file.empty()) {
            j["embeddings_file"] = c.embeddings_file;
        }
    }
    if (c.command == "eval" || c.command == "correlate") {
        j["window_k"] = detail::opt_json(c.window_k);
    }
    if (c.command == "sweep") {
        j["target"] = c.target;
        j["sigma"] = c.sigma;
    }
    if (c.command == "pairs") {
        j["top"] = c.top;
    }
    if (c.command == "synth") {
        const auto& s = c.synth;
        j["num_abstracts"] = s.num_abstracts;
        j["min_sentences"] = s.min_sentences;
        j["max_sentences"] = s.max_sentences;
        j["key_terms"] = s.key_terms;
        j["premise_words"] = s.premise_words;
        j["conclusion_words"] = s.conclusion_words;
        j["conclusion_vocab"] = s.conclusion_vocab;
        j["num_topics"] = s.num_topics;
        j["topic_vocab"] = s.topic_vocab;
        j["topic_words"] = s.topic_words;
    }
    j["seed"] = c.seed;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j)
{
    RunConfig c;
    const auto get = [&j](const char* key, auto& field) {
        if (j.contains(key) && !j.at(key).is_null()) {
            field = j.at(key).get<std::decay_t<decltype(field)>>();
        }
    };
    try {
        c.command = j.at("command").get<std::string>();
        get("input", c.input);
        get("output", c.output);
        get("assignment", c.assignment);
        get("embeddings_file", c.embeddings_file);
        get("target", c.target);
        get("algo", c.algo);
        get("epochs", c.epochs);
        if (j.contains("batch_size") && !j["batch_size"].is_null()) {
            c.batch_size = j["batch_size"].get<std::size_t>();
        }
        get("chunk_size", c.chunk_size);
        get("seed", c.seed);
        get("backend", c.backend);
        get("renormalize_joint", c.renormalize_joint);
        if (j.contains("normalizer_order")) {
            c.normalizer_order = detail::order_from_json(j["normalizer_order"]);
        }
        get("threads", c.threads);
        get("baseline", c.baseline);
        get("cycled", c.cycled);
        get("block_size", c.texttiling.block_size);
        get("smoothing_width", c.texttiling.smoothing_width);
        get("depth_cutoff_multiplier", c.texttiling.depth_cutoff_multiplier);
        if (j.contains("window_k") && !j["window_k"].is_null()) {
            c.window_k = j["window_k"].get<std::size_t>();
        }
        get("sigma", c.sigma);
        get("top", c.top);
        get("min_batch", c.min_batch);
        get("max_batch", c.max_batch);
        get("num_abstracts", c.synth.num_abstracts);
        get("min_sentences", c.synth.min_sentences);
        get("max_sentences", c.synth.max_sentences);
        get("key_terms", c.synth.key_terms);
        get("premise_words", c.synth.premise_words);
        get("conclusion_words", c.synth.conclusion_words);
        get("conclusion_vocab", c.synth.conclusion_vocab);
        get("num_topics", c.synth.num_topics);
        get("topic_vocab", c.synth.topic_vocab);
        get("topic_words", c.synth.topic_words);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed manifest config: ") + e.what());
    }
    c.synth.seed = c.seed;
    return c;
}

/// Flag checks that need no data; violations are usage errors.
inline void validate(const RunConfig& c)
{
    static const std::vector<std::string> commands{"segment", "baseline", "eval",  "sweep",
                                                   "pairs",   "correlate", "stats", "synth"};
    if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) {
        throw UsageError("unknown command '" + c.command + "'");
    }
    if (c.command != "synth") {
        detail::require(c.input, "--input", c.command);
    }
    if (c.command == "segment" || c.command == "baseline" || c.command == "sweep" || c.command == "synth" ||
        c.command == "correlate") {
        detail::require(c.output, "--output", c.command);
    }
    if (detail::uses_greedy(c.command)) {
        if (c.epochs < 1) {
            throw UsageError("--epochs must be >= 1");
        }
        if (c.threads < 1) {
            throw UsageError("--threads must be >= 1");
        }
        if (c.algo != "base" && c.algo != "nn") {
            throw UsageError("--algo must be base or nn");
        }
        if (c.backend != "tfidf" && c.backend != "embeddings") {
            throw UsageError("--backend must be tfidf or embeddings");
        }
        if (c.backend == "embeddings" && c.embeddings_file.empty()) {
            throw UsageError("--backend embeddings requires --embeddings-file");
        }
        if (c.chunk_size < 2) {
            throw UsageError("--chunk-size must be >= 2");
        }
        if (c.normalizer_order != c.normalizer_order) {
            throw UsageError("--normalizer-order must be a number");
        }
    }
    if (c.command == "segment" && c.batch_size) {
        if (*c.batch_size < 2) {
            throw UsageError("--batch-size must be >= 2");
        }
        if (c.algo == "nn" && *c.batch_size > c.chunk_size) {
            throw UsageError("--batch-size must not exceed --chunk-size");
        }
    }
    if (c.command == "correlate") {
        if (c.min_batch < 2 || c.max_batch < c.min_batch) {
            throw UsageError("batch-size range must satisfy 2 <= --min-batch <= --max-batch");
        }
        if (c.max_batch > c.chunk_size) {
            throw UsageError("--max-batch must not exceed --chunk-size");
        }
    }
    if (c.command == "baseline") {
        static const std::vector<std::string> kinds{"random-base", "random-plus", "texttiling", "embed-sim"};
        if (std::find(kinds.begin(), kinds.end(), c.baseline) == kinds.end()) {
            throw UsageError("--baseline must be one of random-base, random-plus, texttiling, embed-sim");
        }
        if (c.baseline == "embed-sim" && c.embeddings_file.empty()) {
            throw UsageError("--baseline embed-sim requires --embeddings-file");
        }
        if (c.texttiling.block_size < 1) {
            throw UsageError("--block-size must be >= 1");
        }
    }
    if (c.command == "eval") {
        detail::require(c.assignment, "--assignment", c.command);
        if (c.window_k && *c.window_k < 1) {
            throw UsageError("--window-k must be >= 1");
        }
    }
    if (c.command == "sweep") {
        detail::require(c.target, "--target", c.command);
        if (!(c.sigma > 0.0)) {
            throw UsageError("--sigma must be > 0");
        }
    }
}

struct RunResult {
    nlohmann::ordered_json trace = nlohmann::ordered_json::object();
};

namespace detail {

inline GreedyConfig greedy_config(const RunConfig& c, std::size_t batch)
{
    GreedyConfig g;
    g.epochs = c.epochs;
    g.batch_size = batch;
    g.chunk_size = c.chunk_size;
    g.rng_seed = c.seed;
    g.similarity_backend =
        c.backend == "embeddings" ? SimilarityBackend::external_embeddings : SimilarityBackend::lexical_tfidf;
    g.renormalize_joint = c.renormalize_joint;
    g.normalizer_order = c.normalizer_order;
    g.threads = c.threads;
    return g;
}

inline SimilarityProvider nn_provider(const RunConfig& c, const Corpus& corpus, std::ostream& log)
{
    if (c.backend == "embeddings") {
        return abstract_vectors(corpus, load_embeddings(c.embeddings_file));
    }
    return build_tfidf_provider(corpus, &log);
}

inline nlohmann::ordered_json trace_json(const GreedyResult& r)
{
    auto batches = nlohmann::ordered_json::array();
    for (const auto& b : r.batches) {
        nlohmann::ordered_json jb;
        jb["ids"] = b.ids;
        auto fixes = nlohmann::ordered_json::array();
        for (const auto& f : b.fixes) {
            fixes.push_back({{"id", f.id}, {"config_rank", f.config_rank}, {"nmi_at_fix", opt_json(f.nmi_at_fix)}});
        }
        jb["fixes"] = std::move(fixes);
        jb["final_nmi"] = opt_json(b.final_nmi);
        batches.push_back(std::move(jb));
    }
    return batches;
}

inline double mean_batch_nmi(const GreedyResult& r)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& b : r.batches) {
        if (b.final_nmi) {
            sum += *b.final_nmi;
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

inline GreedyResult run_greedy(const RunConfig& c, const Corpus& corpus, std::size_t batch,
                               const SimilarityProvider* provider)
{
    if (c.algo == "base" && c.command == "segment") {
        return greedycas_base_batched(corpus, c.batch_size.value_or(0), greedy_config(c, batch));
    }
    return greedycas_nn(corpus, greedy_config(c, batch), *provider);
}

inline std::string hypotheses_text(const HypothesisSet& h)
{
    std::ostringstream os;
    write_hypotheses(os, h);
    return os.str();
}

inline RunResult cmd_segment(const RunConfig& c, std::ostream& log)
{
    const auto corpus = load_tokenized_corpus(c.input);
    std::optional<SimilarityProvider> provider;
    if (c.algo == "nn") {
        provider = nn_provider(c, corpus, log);
    }
    const auto res = run_greedy(c, corpus, c.batch_size.value_or(12), provider ? &*provider : nullptr);
    write_text(c.output, hypotheses_text(hypotheses_from(corpus, res.assignment, res.nmi_at_fix)));
    RunResult out;
    out.trace["num_batches"] = res.batches.size();
    out.trace["mean_batch_nmi"] = res.batches.empty() ? nlohmann::ordered_json()
                                                      : nlohmann::ordered_json(mean_batch_nmi(res));
    out.trace["batches"] = trace_json(res);
    log << "segmented " << corpus.size() << " abstracts in " << res.batches.size() << " batch(es)\n";
    return out;
}

inline RunResult cmd_baseline(const RunConfig& c, std::ostream& log)
{
    const auto corpus = load_tokenized_corpus(c.input);
    std::optional<SimilarityProvider> sentences;
    if (c.baseline == "embed-sim") {
        sentences = load_embeddings(c.embeddings_file);
    }
    Rng rng(c.seed);
    HypothesisSet hyps;
    for (const auto& a : corpus) {
        if (c.baseline == "random-base") {
            hyps.emplace(a.id, Hypothesis::from_labeling(random_base(a, rng)));
        } else if (c.baseline == "random-plus") {
            hyps.emplace(a.id, Hypothesis::from_candidate(random_plus(a, rng), a.n()));
        } else if (c.baseline == "texttiling") {
            hyps.emplace(a.id, Hypothesis::from_labeling(texttiling(a, c.texttiling)));
        } else {
            hyps.emplace(a.id, Hypothesis::from_labeling(embed_sim_baseline(a, *sentences, c.cycled)));
        }
    }
    write_text(c.output, hypotheses_text(hyps));
    log << c.baseline << ": labelled " << corpus.size() << " abstracts\n";
    return {};
}

inline RunResult cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& log)
{
    const auto corpus = load_tokenized_corpus(c.input);
    const auto report = evaluate_run(corpus, read_hypotheses(c.assignment), c.window_k);
    const auto text = to_json(report).dump(2) + "\n";
    if (c.output.empty()) {
        out << text;
    } else {
        write_text(c.output, text);
    }
    log << "pk " << format_number(report.pk) << "  wd " << format_number(report.window_diff) << "  jaccard "
        << format_number(report.jaccard) << "  rouge " << format_number(report.rouge_mean) << "\n";
    RunResult r;
    r.trace["pk"] = report.pk;
    r.trace["window_diff"] = report.window_diff;
    r.trace["jaccard"] = report.jaccard;
    r.trace["rouge_mean"] = report.rouge_mean;
    return r;
}

inline RunResult cmd_sweep(const RunConfig& c, std::ostream& log)
{
    const auto corpus = load_tokenized_corpus(c.input);
    const auto res = word_boundary_sweep(corpus, c.target, gold_conclusions(corpus), c.sigma, c.nmi_options());
    std::ostringstream os;
    os << "position,nmi,smoothed,sentence_end\n";
    for (const auto& p : res.points) {
        os << p.position << ',' << format_number(p.nmi) << ',' << format_number(p.smoothed) << ','
           << (p.sentence_end ? 1 : 0) << '\n';
    }
    write_text(c.output, os.str());
    log << "sweep over " << res.word_count << " words of '" << c.target << "': " << res.points.size()
        << " positions\n";
    RunResult r;
    r.trace["word_count"] = res.word_count;
    r.trace["points"] = res.points.size();
    return r;
}

inline RunResult cmd_pairs(const RunConfig& c, std::ostream& out)
{
    const auto corpus = load_tokenized_corpus(c.input);
    std::map<std::string, SentenceIndices> conclusions;
    if (c.assignment.empty()) {
        conclusions = gold_conclusions(corpus);
    } else {
        for (const auto& [id, h] : read_hypotheses(c.assignment)) {
            conclusions[id] = h.conclusions;
        }
    }
    const auto table = CountTable::build(corpus, conclusions);
    const auto pairs = top_contributing_pairs(table, c.top, c.nmi_options());
    std::ostringstream os;
    os << "rank,premise_token,conclusion_token,term_bits\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        os << i + 1 << ',' << pairs[i].premise_token << ',' << pairs[i].conclusion_token << ','
           << format_number(pairs[i].term) << '\n';
    }
    if (c.output.empty()) {
        out << os.str();
    } else {
        write_text(c.output, os.str());
    }
    RunResult r;
    r.trace["pairs"] = pairs.size();
    return r;
}

inline RunResult cmd_correlate(const RunConfig& c, std::ostream& out, std::ostream& log)
{
    const auto corpus = load_tokenized_corpus(c.input);
    const auto provider = nn_provider(c, corpus, log);
    std::vector<double> nmi;
    std::map<std::string, std::vector<double>> metrics{
        {"pk", {}}, {"window_diff", {}}, {"jaccard", {}}, {"rouge_mean", {}}};
    std::ostringstream os;
    os << "batch_size,nmi,pk,window_diff,jaccard,rouge_mean\n";
    for (std::size_t b = c.min_batch; b <= c.max_batch; ++b) {
        const auto res = greedycas_nn(corpus, greedy_config(c, b), provider);
        const auto report = evaluate_run(corpus, res.assignment, c.window_k);
        const double m = mean_batch_nmi(res);
        nmi.push_back(m);
        metrics["pk"].push_back(report.pk);
        metrics["window_diff"].push_back(report.window_diff);
        metrics["jaccard"].push_back(report.jaccard);
        metrics["rouge_mean"].push_back(report.rouge_mean);
        os << b << ',' << format_number(m) << ',' << format_number(report.pk) << ','
           << format_number(report.window_diff) << ',' << format_number(report.jaccard) << ','
           << format_number(report.rouge_mean) << '\n';
        log << "batch size " << b << ": nmi " << format_number(m) << "  pk " << format_number(report.pk) << "\n";
    }
    write_text(c.output, os.str());

    RunResult r;
    nlohmann::ordered_json summary;
    for (const char* key : {"pk", "window_diff", "jaccard", "rouge_mean"}) {
        nlohmann::ordered_json entry;
        try {
            const auto t = pearson(nmi, metrics[key]);
            entry["r"] = t.statistic;
            entry["p"] = t.p_value;
        } catch (const DegenerateError& e) {
            entry["r"] = nullptr;
            entry["p"] = nullptr;
            entry["error"] = e.what();
        }
        summary[key] = std::move(entry);
    }
    out << summary.dump(2) << "\n";
    r.trace["pearson"] = std::move(summary);
    return r;
}

inline RunResult cmd_stats(const RunConfig& c, std::ostream& out)
{
    const auto s = corpus_stats(load_tokenized_corpus(c.input));
    nlohmann::ordered_json j;
    j["num_abstracts"] = s.num_abstracts;
    j["num_gold_abstracts"] = s.num_gold_abstracts;
    j["num_conclusion_sentences"] = s.num_conclusion_sentences;
    j["num_premise_sentences"] = s.num_premise_sentences;
    j["total_sentences"] = s.total_sentences;
    j["avg_sentences_per_abstract"] = s.avg_sentences_per_abstract;
    nlohmann::ordered_json from_start;
    for (const auto& [pos, n] : s.conclusion_position_from_start) {
        from_start[std::to_string(pos)] = n;
    }
    nlohmann::ordered_json from_end;
    for (const auto& [pos, n] : s.conclusion_position_from_end) {
        from_end[std::to_string(pos)] = n;
    }
    j["conclusion_position_from_start"] = from_start.is_null() ? nlohmann::ordered_json::object() : from_start;
    j["conclusion_position_from_end"] = from_end.is_null() ? nlohmann::ordered_json::object() : from_end;
    const auto text = j.dump(2) + "\n";
    if (c.output.empty()) {
        out << text;
    } else {
        write_text(c.output, text);
    }
    return {};
}

inline RunResult cmd_synth(const RunConfig& c, std::ostream& log)
{
    SyntheticSpec spec = c.synth;
    spec.seed = c.seed;
    std::ostringstream os;
    write_corpus(os, synthetic_corpus(spec));
    write_text(c.output, os.str());
    log << "wrote " << spec.num_abstracts << " synthetic abstracts\n";
    return {};
}

} // namespace detail

inline std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

/// Runs one command. Throws UsageError for bad flags and cas::Error for data
/// problems. Commands with an --output file also write a manifest next to it.
inline void execute(const RunConfig& c, std::ostream& out, std::ostream& log)
{
    validate(c);
    RunResult r;
    if (c.command == "segment") {
        r = detail::cmd_segment(c, log);
    } else if (c.command == "baseline") {
        r = detail::cmd_baseline(c, log);
    } else if (c.command == "eval") {
        r = detail::cmd_eval(c, out, log);
    } else if (c.command == "sweep") {
        r = detail::cmd_sweep(c, log);
    } else if (c.command == "pairs") {
        r = detail::cmd_pairs(c, out);
    } else if (c.command == "correlate") {
        r = detail::cmd_correlate(c, out, log);
    } else if (c.command == "stats") {
        r = detail::cmd_stats(c, out);
    } else {
        r = detail::cmd_synth(c, log);
    }
    if (!c.output.empty()) {
        nlohmann::ordered_json m;
        m["tool"] = "cas";
        m["version"] = kToolVersion;
        m["config"] = config_to_json(c);
        m["trace"] = std::move(r.trace);
        detail::write_text(manifest_path(c.output), m.dump(2) + "\n");
    }
}

inline RunConfig load_manifest(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open manifest '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("manifest '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("config")) {
        throw UsageError("manifest '" + path + "' has no config");
    }
    return config_from_json(j["config"]);
}

/// Maps exceptions from `execute` to exit codes, reporting on `err`.
inline int run_guarded(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    try {
        execute(c, out, err);
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
}

} // namespace cas::app
