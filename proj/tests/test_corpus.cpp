#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "cas/corpus.hpp"

namespace {

std::vector<cas::RawAbstract> load(const std::string& text)
{
    std::istringstream in(text);
    return cas::load_corpus(in);
}

} // namespace

TEST_CASE("load_corpus reads sentences, body and gold indices")
{
    const auto c = load(R"({"id":"a","title":"T","sentences":["One here.","Two here."],"gold_conclusion_indices":[1]}

{"id":"b","body":"First part of it. Second part. Third part."}
)");
    REQUIRE(c.size() == 2);
    CHECK(c[0].title == "T");
    CHECK(c[0].gold == cas::SentenceIndices{1});
    CHECK(c[1].sentences.size() == 3);
    CHECK_FALSE(c[1].gold);
}

TEST_CASE("gold indices are sorted and range checked")
{
    CHECK(load(R"({"id":"a","sentences":["x","y","z"],"gold_conclusion_indices":[2,0]})")[0].gold ==
          cas::SentenceIndices{0, 2});
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":["x"],"gold_conclusion_indices":[1]})"), cas::ValidationError);
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":["x","y"],"gold_conclusion_indices":[-1]})"), cas::ValidationError);
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":["x","y"],"gold_conclusion_indices":[1,1]})"), cas::ValidationError);
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":["x","y"],"gold_conclusion_indices":[]})"), cas::ValidationError);
}

TEST_CASE("section tags supply gold conclusions")
{
    const auto c = load(
        R"({"id":"a","sentences":["x","y","z"],"section_tags":["BACKGROUND","RESULTS","Conclusions"]})");
    CHECK(c[0].gold == cas::SentenceIndices{2});
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":["x","y"],"section_tags":["A"]})"), cas::ValidationError);
    CHECK_THROWS_AS(
        load(R"({"id":"a","sentences":["x","y"],"section_tags":["A","CONCLUSION"],"gold_conclusion_indices":[0]})"),
        cas::ValidationError);
}

TEST_CASE("malformed records report their line")
{
    try {
        load("{\"id\":\"a\",\"sentences\":[\"x\"]}\n{not json}\n");
        FAIL("expected a parse error");
    } catch (const cas::ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":"x"})"), cas::ParseError);
    CHECK_THROWS_AS(load(R"({"id":"a"})"), cas::ValidationError);
    CHECK_THROWS_AS(load(R"({"sentences":["x"]})"), cas::ValidationError);
    CHECK_THROWS_AS(load(R"({"id":"a","sentences":[]})"), cas::ValidationError);
    CHECK_THROWS_AS(load(R"({"id":"a","body":"   "})"), cas::ValidationError);
    CHECK_THROWS_AS(load("{\"id\":\"a\",\"sentences\":[\"x\"]}\n{\"id\":\"a\",\"sentences\":[\"y\"]}"),
                    cas::ValidationError);
    CHECK_THROWS_AS(cas::load_corpus(std::string("/nonexistent/corpus.jsonl")), cas::Error);
}

TEST_CASE("tokenize and corpus statistics")
{
    const auto corpus = cas::tokenize(load(
        R"({"id":"a","sentences":["Deep models work.","We test them.","They generalise."],"gold_conclusion_indices":[2]}
{"id":"b","sentences":["Graphs matter.","Results hold.","Use graphs.","Done now."],"gold_conclusion_indices":[0,3]}
{"id":"c","sentences":["No labels."]})"));
    REQUIRE(corpus.size() == 3);
    CHECK(corpus[0].sentences[0] == cas::Tokens{"deep", "models", "work"});
    CHECK(corpus[0].token_count() == 5);
    const auto s = cas::corpus_stats(corpus);
    CHECK(s.num_abstracts == 3);
    CHECK(s.num_gold_abstracts == 2);
    CHECK(s.num_conclusion_sentences == 3);
    CHECK(s.num_premise_sentences == 4);
    CHECK(s.total_sentences == 8);
    CHECK(s.avg_sentences_per_abstract == Catch::Approx(8.0 / 3.0));
    CHECK(s.conclusion_position_from_end.at(-1) == 2);
    CHECK(s.conclusion_position_from_end.at(-4) == 1);
    CHECK(s.conclusion_position_from_start.at(2) == 1);
    CHECK(cas::find_abstract(corpus, "b") == &corpus[1]);
    CHECK(cas::find_abstract(corpus, "zz") == nullptr);
    CHECK_THROWS_AS(cas::corpus_stats({}), cas::ValidationError);
}
