#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "support.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

cas::HypothesisSet gold_hypotheses(const cas::Corpus& corpus)
{
    cas::HypothesisSet out;
    for (const auto& a : corpus) {
        out.emplace(a.id, cas::Hypothesis{cas::gold_labeling(a), *a.gold, std::nullopt, std::nullopt});
    }
    return out;
}

} // namespace

TEST_CASE("gold against itself scores perfectly")
{
    const auto corpus = oracle::planted(30, 5);
    const auto r = cas::evaluate_run(corpus, gold_hypotheses(corpus));
    CHECK(r.pk == 0.0);
    CHECK(r.window_diff == 0.0);
    CHECK(r.jaccard == 1.0);
    CHECK(r.rouge_mean == 1.0);
    CHECK(r.per_abstract.size() == 30);
    CHECK_FALSE(r.window_k);
}

TEST_CASE("report averages per-abstract scores computed by the oracles")
{
    const auto corpus = oracle::planted(20, 11);
    cas::Rng rng(4);
    cas::HypothesisSet hyps;
    for (const auto& a : corpus) {
        hyps.emplace(a.id, cas::Hypothesis::from_labeling(cas::random_base(a, rng)));
    }
    const auto r = cas::evaluate_run(corpus, hyps, 3);
    REQUIRE(r.window_k == 3u);
    double pk = 0.0;
    double wd = 0.0;
    for (const auto& a : corpus) {
        const auto ref = cas::gold_labeling(a).bits;
        pk += oracle::pk(ref, hyps.at(a.id).labeling.bits, 3);
        wd += oracle::window_diff(ref, hyps.at(a.id).labeling.bits, 3);
    }
    CHECK_THAT(r.pk, WithinAbs(pk / 20.0, 1e-12));
    CHECK_THAT(r.window_diff, WithinAbs(wd / 20.0, 1e-12));
    const auto j = cas::to_json(r);
    CHECK(j["window_k"] == 3);
    CHECK(j["per_abstract"].size() == 20);
}

TEST_CASE("gold labeling marks both ends of the conclusion run")
{
    const auto a = oracle::abstract("a", std::vector<cas::Tokens>(7, {"w"}), cas::SentenceIndices{5, 6});
    CHECK(cas::gold_labeling(a).bits == "0000101");
    const auto b = oracle::abstract("b", std::vector<cas::Tokens>(7, {"w"}), cas::SentenceIndices{0, 6});
    CHECK(cas::gold_labeling(b).bits == "1000010");
}

TEST_CASE("evaluation input errors name the offending ids")
{
    auto corpus = oracle::planted(4, 1);
    auto hyps = gold_hypotheses(corpus);
    corpus[1].gold.reset();
    corpus[2].gold.reset();
    try {
        cas::evaluate_run(corpus, hyps);
        FAIL("expected an error");
    } catch (const cas::ValidationError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("syn1"));
        CHECK_THAT(e.what(), ContainsSubstring("syn2"));
    }

    const auto full = oracle::planted(4, 1);
    auto missing = gold_hypotheses(full);
    missing.erase("syn3");
    CHECK_THROWS_WITH(cas::evaluate_run(full, missing), ContainsSubstring("syn3"));
    auto extra = gold_hypotheses(full);
    extra.emplace("ghost", extra.at("syn0"));
    CHECK_THROWS_WITH(cas::evaluate_run(full, extra), ContainsSubstring("ghost"));

    auto wrong = gold_hypotheses(full);
    wrong.at("syn0").labeling.bits += "0";
    CHECK_THROWS_AS(cas::evaluate_run(full, wrong), cas::ValidationError);
    CHECK_THROWS_AS(cas::evaluate_run(cas::Corpus{}, cas::HypothesisSet{}), cas::ValidationError);
}

TEST_CASE("random-base Pk sits near one half on a large corpus")
{
    const auto corpus = oracle::planted(400, 2);
    cas::Rng rng(8);
    cas::HypothesisSet hyps;
    for (const auto& a : corpus) {
        hyps.emplace(a.id, cas::Hypothesis::from_labeling(cas::random_base(a, rng)));
    }
    const double pk = cas::evaluate_run(corpus, hyps).pk;
    CHECK(pk > 0.35);
    CHECK(pk < 0.6);
}

TEST_CASE("hypothesis files round-trip")
{
    const auto corpus = oracle::planted(10, 3);
    cas::Rng rng(1);
    cas::HypothesisSet hyps;
    for (const auto& a : corpus) {
        auto c = cas::random_plus(a, rng);
        auto h = cas::Hypothesis::from_candidate(c, a.n());
        if (a.id != "syn4") {
            h.nmi_at_fix = -0.125 * static_cast<double>(c.config_rank);
        }
        hyps.emplace(a.id, h);
    }
    hyps.emplace("tiled", cas::Hypothesis::from_labeling(cas::BoundaryLabeling{"0010001"}));
    std::stringstream ss;
    cas::write_hypotheses(ss, hyps);
    CHECK(cas::read_hypotheses(ss) == hyps);
}

TEST_CASE("hypothesis reader rejects malformed records")
{
    const auto read = [](const std::string& text) {
        std::istringstream in(text);
        return cas::read_hypotheses(in);
    };
    CHECK_NOTHROW(read(R"({"id":"a","conclusion_indices":[2,3],"labeling":"0101"})"));
    CHECK_THROWS_AS(read(R"({"id":"a","conclusion_indices":[2],"labeling":"0121"})"), cas::ParseError);
    CHECK_THROWS_AS(read(R"({"id":"a","conclusion_indices":[0],"labeling":"0011"})"), cas::ParseError);
    CHECK_THROWS_AS(read("{\"id\":\"a\",\"conclusion_indices\":[3],\"labeling\":\"0011\"}\n"
                         "{\"id\":\"a\",\"conclusion_indices\":[3],\"labeling\":\"0011\"}"),
                    cas::ValidationError);
    CHECK_THROWS_AS(read("not json"), cas::ParseError);
}
