#include <catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "cas/baselines.hpp"

namespace {

cas::TokenizedAbstract abstract_of(std::size_t n)
{
    cas::TokenizedAbstract a{"x", {}, std::nullopt};
    for (std::size_t i = 0; i < n; ++i) {
        a.sentences.push_back({"w" + std::string(1, static_cast<char>('a' + i))});
    }
    return a;
}

cas::SimilarityProvider sentence_vectors(const std::string& id, const std::vector<cas::Vector>& vs)
{
    cas::SimilarityProvider p;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        p.add(cas::sentence_vector_id(id, i), vs[i]);
    }
    return p;
}

} // namespace

TEST_CASE("random-base marks two distinct sentences")
{
    cas::Rng rng(1);
    std::set<std::string> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto l = cas::random_base(abstract_of(7), rng);
        CHECK(l.size() == 7);
        CHECK(l.count() == 2);
        seen.insert(l.bits);
    }
    CHECK(seen.size() == 21); // every pair of positions shows up
    CHECK(cas::random_base(abstract_of(2), rng).bits == "11");
    CHECK_THROWS_AS(cas::random_base(abstract_of(1), rng), cas::ValidationError);
}

TEST_CASE("random-plus is uniform over the cycled candidates")
{
    cas::Rng rng(7);
    const auto a = abstract_of(7);
    std::map<std::size_t, int> freq;
    for (int i = 0; i < 6000; ++i) {
        const auto c = cas::random_plus(a, rng);
        ++freq[c.config_rank];
        CHECK(c.abstract_id == "x");
    }
    REQUIRE(freq.size() == 6);
    for (const auto& [rank, count] : freq) {
        CHECK(count >= 900);
        CHECK(count <= 1100);
    }
    CHECK(cas::random_plus(abstract_of(2), rng).config_rank == 0);
}

TEST_CASE("texttiling finds a vocabulary shift")
{
    const cas::TokenizedAbstract a{"t",
                                   {{"cell", "gene"}, {"gene", "cell"}, {"cell", "gene", "gene"},
                                    {"orbit", "star"}, {"star", "orbit"}, {"orbit", "star", "star"}},
                                   std::nullopt};
    const auto s = cas::texttiling_scores(a, {});
    REQUIRE(s.depth.size() == 5);
    const auto deepest = std::max_element(s.depth.begin(), s.depth.end()) - s.depth.begin();
    CHECK(deepest == 2);
    CHECK(cas::texttiling(a).bits == "001001");
}

TEST_CASE("texttiling on identical sentences falls back to the first gap")
{
    const cas::TokenizedAbstract a{"t", {{"a", "b"}, {"a", "b"}, {"a", "b"}, {"a", "b"}}, std::nullopt};
    const auto s = cas::texttiling_scores(a, {});
    CHECK(s.boundaries.empty());
    CHECK(cas::texttiling(a).bits == "1001");
    CHECK(cas::texttiling(abstract_of(2)).bits == "11");
}

TEST_CASE("texttiling output always has two boundaries")
{
    cas::Rng rng(3);
    const std::vector<std::string> words{"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 200; ++trial) {
        cas::TokenizedAbstract a{"t", {}, std::nullopt};
        const std::size_t n = 2 + rng.index(10);
        for (std::size_t i = 0; i < n; ++i) {
            cas::Tokens s(rng.index(4));
            for (auto& w : s) {
                w = words[rng.index(words.size())];
            }
            a.sentences.push_back(s);
        }
        const auto l = cas::texttiling(a);
        CHECK(l.count() == 2);
        CHECK(l.boundary(n - 1));
        CHECK(cas::texttiling(a) == l);
    }
    CHECK_THROWS_AS(cas::texttiling_scores(abstract_of(3), {0, 1, 0.5}), cas::ValidationError);
}

TEST_CASE("embedding-similarity baseline picks the split with most similar halves")
{
    const auto a = abstract_of(6);
    // Identical vectors: every split ties, the earliest wins.
    const auto same = sentence_vectors("x", std::vector<cas::Vector>(6, cas::Vector{1, 1}));
    CHECK(cas::embed_sim_baseline(a, same).bits == "100001");

    // Brute-force argmax over the linear splits.
    const std::vector<cas::Vector> vs{{1, 0, 0}, {0.9, 0.1, 0}, {0, 1, 0}, {0, 0, 1}, {0.2, 0, 1}, {1, 0, 0.1}};
    const auto p = sentence_vectors("x", vs);
    double best = -2.0;
    std::size_t best_split = 0;
    for (std::size_t split = 1; split < 6; ++split) {
        cas::Vector l(3, 0.0);
        cas::Vector r(3, 0.0);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t d = 0; d < 3; ++d) {
                (i < split ? l : r)[d] += vs[i][d];
            }
        }
        const double c = cas::cosine(l, r);
        if (c > best) {
            best = c;
            best_split = split;
        }
    }
    std::string expected(6, '0');
    expected[best_split - 1] = '1';
    expected[5] = '1';
    CHECK(cas::embed_sim_baseline(a, p).bits == expected);

    const auto cycled = cas::embed_sim_baseline(a, p, true);
    CHECK(cycled.count() == 2);
    CHECK((cycled.boundary(5) || cycled.boundary(0)));

    CHECK(cas::embed_sim_baseline(abstract_of(2), sentence_vectors("x", {{1, 0}, {0, 1}})).bits == "11");
    CHECK_THROWS_AS(cas::embed_sim_baseline(a, sentence_vectors("x", {{1, 0}})), cas::ValidationError);
}
