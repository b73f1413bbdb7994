// Command-line driver for premise/conclusion segmentation of abstracts.

#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "cas/app.hpp"

namespace {

using cas::app::RunConfig;

void add_greedy_flags(CLI::App* cmd, RunConfig& c, std::string& order)
{
    cmd->add_option("--epochs", c.epochs, "Random restarts per abstract")->capture_default_str();
    cmd->add_option("--chunk-size", c.chunk_size, "Abstracts per chunk for NN batching")->capture_default_str();
    cmd->add_option("--backend", c.backend, "Similarity for NN batching")
        ->check(CLI::IsMember({"tfidf", "embeddings"}))
        ->capture_default_str();
    cmd->add_option("--embeddings-file", c.embeddings_file, "Vector file (abstract or sentence records)");
    cmd->add_option("--threads", c.threads, "Concurrent candidate evaluations")->capture_default_str();
    cmd->add_flag("--renormalize-joint", c.renormalize_joint, "Scale the joint to unit mass");
    cmd->add_option("--normalizer-order", order, "Power-mean order: min, max or a number")->capture_default_str();
}

void add_nmi_flags(CLI::App* cmd, RunConfig& c, std::string& order)
{
    cmd->add_flag("--renormalize-joint", c.renormalize_joint, "Scale the joint to unit mass");
    cmd->add_option("--normalizer-order", order, "Power-mean order: min, max or a number")->capture_default_str();
}

double parse_order(const std::string& s)
{
    if (s == "min") {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "max") {
        return std::numeric_limits<double>::infinity();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw cas::app::UsageError("--normalizer-order must be min, max or a number, got '" + s + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unsupervised premise/conclusion segmentation of scientific abstracts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cas::app::kToolVersion);

    RunConfig c;
    std::string order = "min";
    std::size_t batch = 0;
    std::size_t window_k = 0;
    std::string manifest;

    auto* segment = app.add_subcommand("segment", "Greedy NMI segmentation");
    segment->add_option("--input", c.input, "Corpus JSONL")->required();
    segment->add_option("--output", c.output, "Assignment JSONL")->required();
    segment->add_option("--algo", c.algo, "Search variant")->check(CLI::IsMember({"base", "nn"}))->capture_default_str();
    auto* batch_opt = segment->add_option("--batch-size", batch, "Batch size (nn default 12; base default: whole corpus)");
    segment->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    add_greedy_flags(segment, c, order);

    auto* baseline = app.add_subcommand("baseline", "Run a baseline segmenter");
    baseline->add_option("--input", c.input, "Corpus JSONL")->required();
    baseline->add_option("--output", c.output, "Assignment JSONL")->required();
    baseline->add_option("--baseline", c.baseline, "Baseline")
        ->required()
        ->check(CLI::IsMember({"random-base", "random-plus", "texttiling", "embed-sim"}));
    baseline->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    baseline->add_option("--embeddings-file", c.embeddings_file, "Sentence vectors for embed-sim");
    baseline->add_flag("--cycled", c.cycled, "embed-sim over the cycled candidates instead of linear splits");
    baseline->add_option("--block-size", c.texttiling.block_size, "TextTiling block size")->capture_default_str();
    baseline->add_option("--smoothing-width", c.texttiling.smoothing_width, "TextTiling smoothing width")
        ->capture_default_str();
    baseline->add_option("--depth-cutoff", c.texttiling.depth_cutoff_multiplier, "TextTiling cutoff multiplier")
        ->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Score an assignment against gold labels");
    eval->add_option("--input", c.input, "Corpus JSONL with gold labels")->required();
    eval->add_option("--assignment", c.assignment, "Assignment JSONL")->required();
    eval->add_option("--output", c.output, "Report JSON (default: stdout)");
    auto* k_opt = eval->add_option("--window-k", window_k, "Fixed Pk/WindowDiff window (default: per abstract)");

    auto* sweep = app.add_subcommand("sweep", "NMI as a word boundary moves through one abstract");
    sweep->add_option("--input", c.input, "Corpus JSONL with gold labels")->required();
    sweep->add_option("--target", c.target, "Abstract id")->required();
    sweep->add_option("--output", c.output, "CSV output")->required();
    sweep->add_option("--sigma", c.sigma, "Gaussian smoothing width")->capture_default_str();
    add_nmi_flags(sweep, c, order);

    auto* pairs = app.add_subcommand("pairs", "Top contributing premise/conclusion word pairs");
    pairs->add_option("--input", c.input, "Corpus JSONL")->required();
    pairs->add_option("--assignment", c.assignment, "Assignment JSONL (default: gold labels)");
    pairs->add_option("--top", c.top, "Number of pairs (0 = all)")->capture_default_str();
    pairs->add_option("--output", c.output, "CSV output (default: stdout)");
    add_nmi_flags(pairs, c, order);

    auto* correlate = app.add_subcommand("correlate", "Correlate NMI with metrics across batch sizes");
    correlate->add_option("--input", c.input, "Corpus JSONL with gold labels")->required();
    correlate->add_option("--output", c.output, "CSV output")->required();
    correlate->add_option("--min-batch", c.min_batch, "Smallest batch size")->capture_default_str();
    correlate->add_option("--max-batch", c.max_batch, "Largest batch size")->capture_default_str();
    correlate->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    add_greedy_flags(correlate, c, order);

    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    stats->add_option("--input", c.input, "Corpus JSONL")->required();
    stats->add_option("--output", c.output, "JSON output (default: stdout)");

    auto* synth = app.add_subcommand("synth", "Write a planted synthetic corpus");
    synth->add_option("--output", c.output, "Corpus JSONL")->required();
    synth->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    synth->add_option("--num-abstracts", c.synth.num_abstracts, "Abstracts")->capture_default_str();
    synth->add_option("--min-sentences", c.synth.min_sentences, "Fewest sentences")->capture_default_str();
    synth->add_option("--max-sentences", c.synth.max_sentences, "Most sentences")->capture_default_str();
    synth->add_option("--num-topics", c.synth.num_topics, "Topics")->capture_default_str();

    auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest");
    rerun->add_option("--manifest", manifest, "Manifest JSON")->required();
    std::string rerun_output;
    rerun->add_option("--output", rerun_output, "Write to this path instead of the recorded one");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cas::app::kUsageError;
    }

    try {
        if (rerun->parsed()) {
            c = cas::app::load_manifest(manifest);
            if (!rerun_output.empty()) {
                c.output = rerun_output;
            }
        } else {
            c.command = app.get_subcommands().front()->get_name();
            c.normalizer_order = parse_order(order);
            if (*batch_opt) {
                c.batch_size = batch;
            }
            if (*k_opt) {
                c.window_k = window_k;
            }
        }
    } catch (const cas::app::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return cas::app::kUsageError;
    }
    return cas::app::run_guarded(c, std::cout, std::cerr);
}
