#include <catch_amalgamated.hpp>

#include <vector>

#include "cas/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Pearson correlation and p-value")
{
    CHECK_THAT(cas::pearson({1, 2, 3, 4}, {3, 5, 7, 9}).statistic, WithinAbs(1.0, 1e-12));
    CHECK(cas::pearson({1, 2, 3, 4}, {3, 5, 7, 9}).p_value == 0.0);
    CHECK_THAT(cas::pearson({1, 2, 3}, {-1, -2, -3}).statistic, WithinAbs(-1.0, 1e-12));
    // scipy.stats.pearsonr
    const auto a = cas::pearson({1, 2, 3, 4, 5, 6}, {2.1, 3.9, 6.2, 7.8, 10.1, 11.7});
    CHECK_THAT(a.statistic, WithinAbs(0.9988953182174387, 1e-12));
    CHECK_THAT(a.p_value, WithinRel(1.829808727431029e-06, 1e-6));
    const auto b = cas::pearson({0.3, -1.2, 2.5, 0.7, 1.1}, {1.0, 0.2, -0.5, 0.9, 0.4});
    CHECK_THAT(b.statistic, WithinAbs(-0.45749493383141304, 1e-12));
    CHECK_THAT(b.p_value, WithinRel(0.4385102322711092, 1e-9));
}

TEST_CASE("Pearson input errors")
{
    CHECK_THROWS_AS(cas::pearson({1, 2}, {1, 2}), cas::ValidationError);
    CHECK_THROWS_AS(cas::pearson({1, 2, 3}, {1, 2}), cas::ValidationError);
    CHECK_THROWS_AS(cas::pearson({1, 1, 1}, {1, 2, 3}), cas::DegenerateError);
}

TEST_CASE("Wilcoxon signed-rank test")
{
    // scipy.stats.wilcoxon(x, y, method="approx", correction=False)
    const std::vector<double> x{1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30};
    const std::vector<double> y{0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29};
    const auto r = cas::wilcoxon_signed_rank(x, y);
    CHECK(r.statistic == 5.0);
    CHECK_THAT(r.p_value, WithinRel(0.038151710173415135, 1e-9));

    // Ties and a zero difference.
    const auto t = cas::wilcoxon_signed_rank({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {2, 2, 5, 3, 7, 8, 6, 10, 12, 9});
    CHECK(t.statistic == 7.5);
    CHECK_THAT(t.p_value, WithinRel(0.07044042927208799, 1e-9));
}

TEST_CASE("Wilcoxon statistic equals a hand ranking")
{
    // Differences 1..8 with signs + + - + + + - +: negative ranks 3 and 7.
    const std::vector<double> a{0, 0, 0, 0, 0, 0, 0, 0};
    const std::vector<double> b{1, 2, -3, 4, 5, 6, -7, 8};
    CHECK(cas::wilcoxon_signed_rank(a, b).statistic == 10.0);
    // Uniform shift: every rank on one side.
    std::vector<double> c{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> d = c;
    for (auto& v : d) {
        v += 0.5 + v * 0.01;
    }
    const auto s = cas::wilcoxon_signed_rank(c, d);
    CHECK(s.statistic == 0.0);
    CHECK(s.p_value < 0.05);
}

TEST_CASE("Wilcoxon input errors")
{
    CHECK_THROWS_AS(cas::wilcoxon_signed_rank({1, 2, 3}, {1, 2, 3}), cas::DegenerateError);
    CHECK_THROWS_AS(cas::wilcoxon_signed_rank({1, 2, 3}, {2, 3, 4}), cas::ValidationError);
    CHECK_THROWS_AS(cas::wilcoxon_signed_rank({1, 2}, {1}), cas::ValidationError);
}
