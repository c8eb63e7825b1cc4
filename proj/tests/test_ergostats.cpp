#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "qkr/ergostats.hpp"
#include "qkr/rng.hpp"

using namespace qkr;

namespace {

std::vector<double> uniform_values(long n, double domain, std::uint64_t seed)
{
    SeededRng rng(seed);
    std::vector<double> v;
    for (long i = 0; i < n; ++i)
        v.push_back(rng.uniform() * domain);
    return v;
}

std::vector<double> repeat_each(const std::vector<double>& v, int k)
{
    std::vector<double> out;
    for (double x : v)
        for (int j = 0; j < k; ++j)
            out.push_back(x);
    return out;
}

}  // namespace

TEST(Gaps, CircularMetric)
{
    EXPECT_NEAR(circular_gap(0.1, 6.2), two_pi - 6.1, 1e-12);
    EXPECT_NEAR(circular_gap(0.1, 6.2), 0.18318530717958623, 1e-12);
    EXPECT_EQ(circular_gap(1.7, 1.7), 0.0);
    EXPECT_EQ(circular_gap(0.0, std::numbers::pi), std::numbers::pi);
    EXPECT_EQ(circular_gap(2.0, 5.0), circular_gap(5.0, 2.0));
}

TEST(Gaps, AllPairs)
{
    EXPECT_TRUE(all_gaps({0.0}).empty());
    const auto g = all_gaps({0.0, 1.0, 2.0});
    ASSERT_EQ(g.size(), 3u);
    EXPECT_DOUBLE_EQ(g[0], 1.0);
    EXPECT_DOUBLE_EQ(g[1], 2.0);
    EXPECT_DOUBLE_EQ(g[2], 1.0);
    EXPECT_EQ(all_gaps(uniform_values(1600, two_pi, 1)).size(), 1279200u);
    EXPECT_THROW(all_gaps({}), Error);
    EXPECT_THROW(all_gaps(std::vector<double>(4001, 0.0)), Error);
}

TEST(Histogram, Counts)
{
    EXPECT_EQ(histogram_counts({0.0, 1.0}, 2, 2.0), (std::vector<long>{1, 1}));
    const auto same = histogram_counts(std::vector<double>(7, 0.4), 5, 1.0);
    EXPECT_EQ(*std::max_element(same.begin(), same.end()), 7);
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i)
        grid.push_back((i + 0.5) * two_pi / 10.0);
    for (long c : histogram_counts(grid, 10, two_pi))
        EXPECT_EQ(c, 1);
    // A gap of exactly pi lands in the last bin.
    EXPECT_EQ(histogram_counts({std::numbers::pi}, 4, std::numbers::pi).back(), 1);
    EXPECT_THROW(histogram_counts({-0.1}, 4, 1.0), Error);
    EXPECT_THROW(histogram_counts({1.5}, 4, 1.0), Error);
}

TEST(Distance, ClosedForms)
{
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i)
        grid.push_back((i + 0.5) / 12.0);
    EXPECT_NEAR(distance_to_uniform(grid, 4, 1.0), 0.0, 1e-14);
    EXPECT_NEAR(distance_to_uniform(std::vector<double>(9, 0.2), 6, 3.0), 5.0 / 3.0, 1e-14);
    const auto v = uniform_values(50, two_pi, 3);
    const long m = 1000000;
    EXPECT_NEAR(distance_to_uniform(v, m, two_pi), (double(m) / two_pi) / 50.0 - 1.0 / two_pi, 1e-9);
}

TEST(Degeneracy, NonDegenerateIsOne)
{
    for (long n : {200L, 1000L}) {
        const auto rep = eta_of_values(uniform_values(n, two_pi, 10 + n));
        EXPECT_NEAR(rep.parameter, 1.0, 0.02);
        EXPECT_GE(rep.r_squared, 0.99);
        EXPECT_TRUE(rep.linear);
        EXPECT_EQ(rep.m_first, 50 * n);
        EXPECT_EQ(rep.m_last, 400 * n);
        EXPECT_LT(std::abs(rep.at_fixed_m - rep.parameter) / rep.parameter, 0.05);
    }
}

TEST(Degeneracy, ExactMultiplicities)
{
    const auto base = uniform_values(300, two_pi, 5);
    for (int k : {2, 3, 4}) {
        const auto rep = eta_of_values(repeat_each(base, k));
        EXPECT_NEAR(rep.parameter, double(k), 0.02 * k) << k;
        EXPECT_GE(rep.r_squared, 0.99);
    }
}

TEST(Degeneracy, ZetaNonDegenerateAndDoubled)
{
    const auto gen = uniform_values(400, two_pi, 17);
    const auto z = zeta_of_values(gen);
    EXPECT_NEAR(z.parameter, 1.0, 0.02);
    EXPECT_GE(z.r_squared, 0.99);

    // Oracle: with every level doubled, each distinct gap of the base set
    // appears 4 times and n zero gaps appear in addition. The expected
    // slope-normalized parameter is count * sum_g mult_g^2 / count^2 with the
    // multiplicities counted exactly.
    const auto base = uniform_values(200, two_pi, 19);
    const auto doubled = repeat_each(base, 2);
    const double n = 200.0;
    const double count = 2.0 * n * (2.0 * n - 1.0) / 2.0;
    const double distinct_pairs = n * (n - 1.0) / 2.0;
    const double sum_sq = distinct_pairs * 16.0 + n * n;  // zero gaps share one bin
    const double expect = sum_sq / count;
    const auto zd = zeta_of_values(doubled);
    EXPECT_NEAR(zd.parameter, expect, 0.02 * expect);
}

TEST(Degeneracy, EquallySpacedGapsAreMassivelyDegenerate)
{
    std::vector<double> e;
    for (int k = 0; k < 100; ++k)
        e.push_back(two_pi * k / 100.0);
    EXPECT_GT(zeta_of_values(e).parameter, 20.0);
}

TEST(Degeneracy, OrderFreeAndShiftInsensitive)
{
    auto v = uniform_values(500, two_pi, 23);
    const auto a = eta_of_values(v);
    std::reverse(v.begin(), v.end());
    const auto b = eta_of_values(v);
    EXPECT_EQ(a.parameter, b.parameter);
    EXPECT_EQ(a.r_squared, b.r_squared);
    for (double& x : v)
        x = std::fmod(x + 1.234, two_pi);
    EXPECT_NEAR(eta_of_values(v).parameter, a.parameter, 0.02 * a.parameter);
}

TEST(Degeneracy, Guards)
{
    EXPECT_THROW(degeneracy_parameter({0.1}, 1, 1.0, {10, 20}), Error);
    EXPECT_THROW(degeneracy_parameter({0.1, 0.2}, 2, 0.0, {10, 20}), Error);
    EXPECT_THROW(degeneracy_parameter({0.1, 0.2}, 3, 1.0, {10, 20}), Error);
    EXPECT_THROW(degeneracy_parameter({0.1, 0.2}, 2, 1.0, {10}), Error);
}

TEST(Degeneracy, NonLinearRegimeIsFlagged)
{
    // A coarse grid on a nearly uniform set: d(M) stays at zero, then jumps.
    std::vector<double> grid;
    for (int i = 0; i < 64; ++i)
        grid.push_back((i + 0.5) / 64.0);
    const auto rep = degeneracy_parameter(grid, 64, 1.0, {1, 2, 4, 8, 16, 32, 64, 128, 256});
    EXPECT_FALSE(rep.linear);
    EXPECT_LT(rep.r_squared, 0.99);
}

TEST(SpacingRatio, Limits)
{
    std::vector<double> fence;
    for (int k = 0; k < 64; ++k)
        fence.push_back(two_pi * k / 64.0);
    EXPECT_NEAR(spacing_ratio(fence), 1.0, 1e-9);
    EXPECT_NEAR(spacing_ratio(uniform_values(20000, two_pi, 29)), 2.0 * std::log(2.0) - 1.0, 0.01);
    auto pairs = repeat_each(uniform_values(50, two_pi, 31), 2);
    EXPECT_LT(spacing_ratio(pairs), 0.3);
    EXPECT_THROW(spacing_ratio(std::vector<double>{0.1, 0.2}), Error);
}
