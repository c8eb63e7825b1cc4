#include <cmath>
#include <numbers>
#include <tuple>

#include <gtest/gtest.h>

#include "qkr/classical.hpp"

using namespace qkr;

namespace {

double shoelace(const std::vector<PhasePoint>& p)
{
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        a += u.theta * v.l - v.theta * u.l;
    }
    return 0.5 * std::abs(a);
}

// Unwrap b relative to a on the torus.
double near(double a, double b)
{
    return a + std::remainder(b - a, two_pi);
}

}  // namespace

TEST(StandardMap, FixedPointsAndFreeRotation)
{
    for (double k : {0.0, 0.5, 5.0, 40.0}) {
        const auto a = standard_map_step({0.0, 0.0}, k);
        EXPECT_EQ(a.theta, 0.0);
        EXPECT_EQ(a.l, 0.0);
        const auto b = standard_map_step({std::numbers::pi, 0.0}, k);
        EXPECT_EQ(b.theta, std::numbers::pi);
        EXPECT_NEAR(b.l, 0.0, 1e-15 * k + 1e-300);
    }
    const auto f = standard_map_step({1.0, 2.5}, 0.0);
    EXPECT_NEAR(f.theta, 3.5, 1e-15);
    EXPECT_NEAR(f.l, 2.5, 1e-15);
}

TEST(StandardMap, UsesUpdatedAngle)
{
    const auto p = standard_map_step({1.0, 0.5}, 1.0);
    EXPECT_NEAR(p.theta, 1.5, 1e-15);
    EXPECT_NEAR(p.l, 0.5 + std::sin(1.5), 1e-15);
}

TEST(StandardMap, TwoKicksByHand)
{
    ClassicalEnsemble e{{{1.0, 0.5}}, 0};
    const auto out = evolve_ensemble(e, 1.0, 2);
    double th = 1.0, l = 0.5;
    for (int t = 0; t < 2; ++t) {
        th = std::fmod(th + l, two_pi);
        l = std::fmod(l + std::sin(th), two_pi);
        if (l < 0)
            l += two_pi;
    }
    EXPECT_NEAR(out.points[0].theta, th, 1e-14);
    EXPECT_NEAR(out.points[0].l, l, 1e-14);
    EXPECT_EQ(evolve_ensemble(e, 1.0, 0).points[0].theta, 1.0);
    EXPECT_THROW(evolve_ensemble(e, 1.0, -1), Error);
}

TEST(StandardMap, Reversible)
{
    // Roundoff grows like exp(lambda t) with lambda ~ ln(K/2) on chaotic orbits,
    // so the strongly kicked orbit is reversed over 10 kicks and the weakly
    // kicked (near-integrable) one over 100.
    for (auto [kick, kicks, tol] : {std::tuple{5.0, 10, 1e-9}, std::tuple{0.5, 100, 1e-6}}) {
        PhasePoint p{2.1, 4.4};
        const PhasePoint start = p;
        for (int t = 0; t < kicks; ++t)
            p = standard_map_step(p, kick);
        for (int t = 0; t < kicks; ++t)
            p = standard_map_inverse_step(p, kick);
        EXPECT_LT(std::abs(near(start.theta, p.theta) - start.theta), tol) << kick;
        EXPECT_LT(std::abs(near(start.l, p.l) - start.l), tol) << kick;
    }
    // Single steps invert to roundoff at any kick strength.
    SeededRng rng(8);
    for (int i = 0; i < 1000; ++i) {
        const PhasePoint q{rng.uniform() * two_pi, rng.uniform() * two_pi};
        const PhasePoint r = standard_map_inverse_step(standard_map_step(q, 5.0), 5.0);
        ASSERT_LT(std::abs(near(q.theta, r.theta) - q.theta), 1e-12);
        ASSERT_LT(std::abs(near(q.l, r.l) - q.l), 1e-12);
    }
}

TEST(StandardMap, AreaPreserving)
{
    const double h = 1e-4;
    std::vector<PhasePoint> quad = {{1.0, 2.0}, {1.0 + h, 2.0}, {1.0 + h, 2.0 + h}, {1.0, 2.0 + h}};
    const double a0 = shoelace(quad);
    for (int t = 0; t < 5; ++t) {
        for (auto& q : quad)
            q = standard_map_step(q, 0.8);
        std::vector<PhasePoint> un = quad;
        for (auto& q : un) {
            q.theta = near(quad[0].theta, q.theta);
            q.l = near(quad[0].l, q.l);
        }
        EXPECT_NEAR(shoelace(un), a0, 1e-6 * a0) << t;
    }
}

TEST(StandardMap, OutputsWrapped)
{
    PhasePoint p{6.2, 6.1};
    for (int t = 0; t < 1000; ++t) {
        p = standard_map_step(p, 7.3);
        ASSERT_GE(p.theta, 0.0);
        ASSERT_LT(p.theta, two_pi);
        ASSERT_GE(p.l, 0.0);
        ASSERT_LT(p.l, two_pi);
    }
    EXPECT_EQ(wrap_angle(two_pi), 0.0);
    EXPECT_EQ(wrap_angle(-1e-300), 0.0);
}

TEST(Cells, RectangleConvention)
{
    RotorConfig c(10, 0.0);
    const double dth = c.cell_angle();
    const double hb = c.hbar();
    EXPECT_EQ(cell_of({0.0, 5.5 * hb}, c), std::make_pair(0, 0));
    EXPECT_EQ(cell_of({0.49 * dth, 0.51 * hb}, c), std::make_pair(0, 0));
    EXPECT_EQ(cell_of({0.51 * dth, 10.49 * hb}, c), std::make_pair(1, 0));
    EXPECT_EQ(cell_of({two_pi - 0.49 * dth, 10.51 * hb}, c), std::make_pair(0, 1));
    EXPECT_EQ(cell_of({3.0 * dth, 0.4 * hb}, c), std::make_pair(3, 9));
}

TEST(Sampling, SingleCellStaysInside)
{
    RotorConfig c(8, 0.0);
    std::vector<double> p(64, 0.0);
    p[3 * 8 + 5] = 1.0;
    const auto ens = sample_from_cells(CellDistribution::torus(8, p), 20000, 42, c);
    for (const auto& q : ens.points)
        ASSERT_EQ(cell_of(q, c), std::make_pair(5, 3));
    EXPECT_EQ(ens.seed, 42u);
}

TEST(Sampling, BinomialCounts)
{
    RotorConfig c(6, 0.0);
    std::vector<double> p(36, 0.0);
    p[0] = p[20] = 0.5;
    const auto ens = sample_from_cells(CellDistribution::torus(6, p), 100000, 7, c);
    long first = 0;
    for (const auto& q : ens.points)
        first += cell_of(q, c) == std::make_pair(0, 0);
    EXPECT_LT(std::abs(first - 50000), 3.0 * std::sqrt(25000.0));
}

TEST(Sampling, DeterministicAndFoldedOnly)
{
    RotorConfig c(4, 0.0);
    const auto d = CellDistribution::torus(4, std::vector<double>(16, 1.0 / 16));
    const auto a = sample_from_cells(d, 1000, 9, c);
    const auto b = sample_from_cells(d, 1000, 9, c);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].theta, b.points[i].theta);
        EXPECT_EQ(a.points[i].l, b.points[i].l);
    }
    EXPECT_THROW(sample_from_cells(CellDistribution(4, 0, 4, false), 10, 1, c), Error);
    EXPECT_THROW(sample_from_cells(d, 10, 1, RotorConfig(6, 0.0)), Error);
}

TEST(CoarseGrain, DeltaAndUniform)
{
    RotorConfig c(20, 0.0);
    ClassicalEnsemble delta{std::vector<PhasePoint>(100, PhasePoint{1.0, 2.0}), 0};
    EXPECT_EQ(entropy(coarse_grain(delta, c)), 0.0);

    SeededRng rng(3);
    ClassicalEnsemble uni;
    for (int i = 0; i < 1000000; ++i)
        uni.points.push_back({rng.uniform() * two_pi, rng.uniform() * two_pi});
    // Multinomial bias of the plug-in entropy is about (cells - 1) / (2 n).
    EXPECT_NEAR(entropy(coarse_grain(uni, c)), std::log(400.0), 0.01);
    EXPECT_THROW(coarse_grain(ClassicalEnsemble{}, c), Error);
}

TEST(CoarseGrain, SamplingRoundTrip)
{
    RotorConfig c(12, 0.0);
    std::vector<double> p(144);
    double s = 0.0;
    for (int row = 0; row < 12; ++row)
        for (int x = 0; x < 12; ++x) {
            const double v = 1.0 + 0.5 * std::cos(two_pi * x / 12.0) * std::sin(two_pi * row / 12.0);
            p[std::size_t(row * 12 + x)] = v;
            s += v;
        }
    for (double& v : p)
        v /= s;
    const auto d = CellDistribution::torus(12, p);
    EXPECT_LT(total_variation(coarse_grain(sample_from_cells(d, 1000000, 5, c), c), d), 0.01);
}

TEST(TotalVariation, Values)
{
    const auto u = CellDistribution::torus(3, std::vector<double>(9, 1.0 / 9));
    std::vector<double> one(9, 0.0), two(9, 0.0);
    one[0] = 1.0;
    two[4] = 1.0;
    const auto a = CellDistribution::torus(3, one);
    const auto b = CellDistribution::torus(3, two);
    EXPECT_EQ(total_variation(u, u), 0.0);
    EXPECT_DOUBLE_EQ(total_variation(a, b), 1.0);
    EXPECT_NEAR(total_variation(u, a), 1.0 - 1.0 / 9.0, 1e-15);
    EXPECT_THROW(total_variation(a, CellDistribution::torus(2, std::vector<double>(4, 0.25))), Error);
}
