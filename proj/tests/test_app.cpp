#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cas/app.hpp"

namespace fs = std::filesystem;
using cas::app::RunConfig;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("cas_test_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void run(const RunConfig& c)
{
    std::ostringstream out;
    std::ostringstream log;
    cas::app::execute(c, out, log);
}

std::string synth(const TempDir& dir, std::size_t n, std::uint64_t seed)
{
    RunConfig c;
    c.command = "synth";
    c.output = dir / "corpus.jsonl";
    c.seed = seed;
    c.synth.num_abstracts = n;
    run(c);
    return c.output;
}

int tool(const std::string& args)
{
    const std::string cmd = std::string(CAS_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("segment is deterministic and its manifest reproduces it")
{
    TempDir dir("segment");
    const auto corpus = synth(dir, 20, 3);
    RunConfig c;
    c.command = "segment";
    c.input = corpus;
    c.output = dir / "a.jsonl";
    c.batch_size = 4;
    c.seed = 9;
    run(c);
    c.output = dir / "b.jsonl";
    run(c);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));

    auto again = cas::app::load_manifest(cas::app::manifest_path(dir / "a.jsonl"));
    again.output = dir / "c.jsonl";
    run(again);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "c.jsonl"));

    const auto m = nlohmann::json::parse(slurp(cas::app::manifest_path(dir / "a.jsonl")));
    CHECK(m["tool"] == "cas");
    CHECK(m["version"] == cas::app::kToolVersion);
    CHECK(m["config"]["batch_size"] == 4);
    CHECK(m["config"]["normalizer_order"] == "min");
    CHECK(m["trace"]["num_batches"] == 5);

    c.seed = 10;
    c.output = dir / "d.jsonl";
    run(c);
    CHECK(cas::read_hypotheses(dir / "d.jsonl").size() == 20);
}

TEST_CASE("config survives a JSON round trip")
{
    RunConfig c;
    c.command = "segment";
    c.input = "in.jsonl";
    c.output = "out.jsonl";
    c.algo = "base";
    c.renormalize_joint = true;
    c.normalizer_order = 2.5;
    c.threads = 3;
    const auto j = cas::app::config_to_json(c);
    const auto back = cas::app::config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(cas::app::config_to_json(back) == j);
    c.normalizer_order = std::numeric_limits<double>::infinity();
    CHECK(cas::app::config_to_json(c)["normalizer_order"] == "max");
}

TEST_CASE("baseline, eval, pairs, sweep and stats run end to end")
{
    TempDir dir("pipeline");
    const auto corpus = synth(dir, 12, 1);
    for (const char* kind : {"random-base", "random-plus", "texttiling"}) {
        RunConfig b;
        b.command = "baseline";
        b.baseline = kind;
        b.input = corpus;
        b.output = dir / (std::string(kind) + ".jsonl");
        run(b);
        RunConfig e;
        e.command = "eval";
        e.input = corpus;
        e.assignment = b.output;
        std::ostringstream out;
        std::ostringstream log;
        cas::app::execute(e, out, log);
        const auto report = nlohmann::json::parse(out.str());
        CHECK(report["num_abstracts"] == 12);
        CHECK(report["window_k"] == "per-abstract");
    }

    RunConfig p;
    p.command = "pairs";
    p.input = corpus;
    p.top = 5;
    std::ostringstream out;
    std::ostringstream log;
    cas::app::execute(p, out, log);
    CHECK(out.str().rfind("rank,premise_token,conclusion_token,term_bits\n", 0) == 0);

    RunConfig s;
    s.command = "sweep";
    s.input = corpus;
    s.target = "syn0";
    s.output = dir / "sweep.csv";
    run(s);
    CHECK(slurp(dir / "sweep.csv").rfind("position,nmi,smoothed,sentence_end\n", 0) == 0);

    RunConfig st;
    st.command = "stats";
    st.input = corpus;
    std::ostringstream sout;
    cas::app::execute(st, sout, log);
    CHECK(nlohmann::json::parse(sout.str())["num_abstracts"] == 12);
}

TEST_CASE("usage and data errors map to exit codes")
{
    TempDir dir("errors");
    const auto corpus = synth(dir, 6, 2);
    std::ostringstream out;
    std::ostringstream err;

    RunConfig bad;
    bad.command = "segment";
    bad.input = corpus;
    bad.output = dir / "x.jsonl";
    bad.batch_size = 60;
    CHECK(cas::app::run_guarded(bad, out, err) == cas::app::kUsageError);
    bad.batch_size = 1;
    CHECK(cas::app::run_guarded(bad, out, err) == cas::app::kUsageError);

    RunConfig missing;
    missing.command = "stats";
    missing.input = dir / "nope.jsonl";
    CHECK(cas::app::run_guarded(missing, out, err) == cas::app::kDataError);

    RunConfig unknown;
    unknown.command = "sweep";
    unknown.input = corpus;
    unknown.target = "nobody";
    unknown.output = dir / "s.csv";
    CHECK(cas::app::run_guarded(unknown, out, err) == cas::app::kDataError);
}

TEST_CASE("command-line tool")
{
    TempDir dir("cli");
    const auto corpus = dir / "c.jsonl";
    CHECK(tool("synth --output " + corpus + " --num-abstracts 8 --seed 4") == 0);
    CHECK(tool("segment --input " + corpus + " --output " + (dir / "a.jsonl") + " --batch-size 4") == 0);
    CHECK(tool("rerun --manifest " + (dir / "a.jsonl.manifest.json") + " --output " + (dir / "b.jsonl")) == 0);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    CHECK(tool("eval --input " + corpus + " --assignment " + (dir / "a.jsonl")) == 0);
    CHECK(tool("segment --input " + corpus) == 2);
    CHECK(tool("segment --input " + corpus + " --output x --algo greedy") == 2);
    CHECK(tool("bogus") == 2);
    CHECK(tool("stats --input " + (dir / "missing.jsonl")) == 1);
    CHECK(tool("eval --input " + corpus + " --assignment " + corpus) == 1);
}
