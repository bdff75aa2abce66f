#include <doctest.h>

#include <dnsqd/stats.hpp>

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace dnsqd;

TEST_CASE("mann-whitney examples")
{
    const std::vector<double> a{1., 2., 3.}, b{4., 5., 6.};
    const auto r = mann_whitney_u(a, b);
    CHECK(r.exact);
    CHECK(r.u == 0.);
    CHECK(r.p_value == doctest::Approx(0.1).epsilon(1e-12));

    const std::vector<double> same{1., 1., 1.};
    CHECK(mann_whitney_u(same, same).p_value == 1.);

    const std::vector<double> empty;
    CHECK_THROWS_AS(mann_whitney_u(empty, a), std::invalid_argument);
    const std::vector<double> bad{1., std::nan("")};
    CHECK_THROWS_AS(mann_whitney_u(bad, a), std::invalid_argument);
}

TEST_CASE("exact p-values match enumeration, ties included")
{
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> size(1, 6), level(0, 4);
    std::uniform_real_distribution<double> u(0., 1.);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> a(static_cast<std::size_t>(size(rng))), b(static_cast<std::size_t>(size(rng)));
        const bool ties = trial % 2 == 0;
        for (double& x : a)
            x = ties ? level(rng) : u(rng);
        for (double& x : b)
            x = ties ? level(rng) : u(rng);
        double u_oracle = 0.;
        const double p = oracle::mann_whitney_p(a, b, &u_oracle);
        const auto r = mann_whitney_u(a, b);
        CHECK(r.exact);
        CHECK(r.u == u_oracle);
        CHECK(std::abs(r.p_value - p) <= 1e-12);
    }
}

TEST_CASE("mann-whitney is invariant to strictly increasing transforms and swaps")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0., 1.);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(10), b(12), ta, tb;
        for (double& x : a)
            x = u(rng);
        for (double& x : b)
            x = u(rng) + 0.2;
        for (double x : a)
            ta.push_back(std::exp(3. * x) - 4.);
        for (double x : b)
            tb.push_back(std::exp(3. * x) - 4.);
        const auto r = mann_whitney_u(a, b);
        CHECK_FALSE(r.exact);
        CHECK(mann_whitney_u(ta, tb).p_value == r.p_value);
        CHECK(mann_whitney_u(b, a).p_value == r.p_value);
        CHECK(r.p_value >= 0.);
        CHECK(r.p_value <= 1.);
    }
}

TEST_CASE("normal approximation stays close to the exact distribution at n = m = 8")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0., 1.);
    std::uniform_int_distribution<int> level(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(8), b(8);
        const double shift = 0.5 * u(rng);
        for (double& x : a)
            x = trial % 3 == 0 ? level(rng) : u(rng);
        for (double& x : b)
            x = trial % 3 == 0 ? level(rng) + 3. * shift : u(rng) + shift;
        const auto exact = mann_whitney_u(a, b);
        const auto normal = mann_whitney_u(a, b, MannWhitneyMethod::normal);
        CHECK(exact.exact);
        CHECK_FALSE(normal.exact);
        CHECK(exact.u == normal.u);
        CHECK(std::abs(exact.p_value - normal.p_value) <= 0.05);
    }
    const std::vector<double> nine(9, 1.);
    CHECK_THROWS_AS(mann_whitney_u(nine, nine, MannWhitneyMethod::exact), std::invalid_argument);
}

TEST_CASE("holm-bonferroni")
{
    const std::vector<double> p{0.01, 0.04, 0.03, 0.2};
    CHECK(holm_bonferroni(p, 0.05) == std::vector<bool>{true, false, false, false});

    const std::vector<double> boundary{0.025, 0.05};
    CHECK(holm_bonferroni(boundary, 0.05) == std::vector<bool>{true, true});

    const std::vector<double> none;
    CHECK(holm_bonferroni(none, 0.05).empty());

    const std::vector<double> bad{1.5};
    CHECK_THROWS_AS(holm_bonferroni(bad, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(holm_bonferroni(p, 0.), std::invalid_argument);
}

TEST_CASE("holm rejections are monotone in the p-values")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0., 0.1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p(6);
        for (double& x : p)
            x = u(rng);
        const auto before = holm_bonferroni(p, 0.05);
        std::vector<double> lowered = p;
        lowered[static_cast<std::size_t>(trial % 6)] *= 0.5;
        const auto after = holm_bonferroni(lowered, 0.05);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (before[i])
                CHECK(after[i]);
    }
}

TEST_CASE("compare_groups runs every pair")
{
    const std::vector<std::string> labels{"a", "b", "c"};
    const std::vector<std::vector<double>> samples{{1., 2., 3., 4.}, {5., 6., 7., 8.}, {1.5, 2.5, 3.5, 4.5}};
    const auto results = compare_groups(labels, samples, 0.05);
    REQUIRE(results.size() == 3);
    CHECK(results[0].label == "a vs b");
    CHECK(results[0].p_value == doctest::Approx(2. / 70.));
    CHECK(results[2].label == "b vs c");
    CHECK_THROWS_AS(compare_groups({"a"}, {{1.}, {2.}}, 0.05), std::invalid_argument);
}
