#pragma once

// Classical kicked rotor: the Chirikov standard map on the 2pi x 2pi torus,
// and the bridge between point ensembles and Planck-cell distributions.
//
// Cell (X, P) covers the rectangle
//     theta in [X dtheta - dtheta/2, X dtheta + dtheta/2),  dtheta = 2pi/ell
//     l     in [(P ell + 1/2) hbar, (P ell + ell + 1/2) hbar)
// i.e. the angle centred on the basis state's peak and the momentum spanning
// its ell quantum numbers with half-quantum margins.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qkr/config.hpp"
#include "qkr/phase_space.hpp"
#include "qkr/rng.hpp"

namespace qkr {

struct PhasePoint {
    double theta;
    double l;
};

struct ClassicalEnsemble {
    std::vector<PhasePoint> points;
    std::uint64_t seed = 0;
};

inline double wrap_angle(double x)
{
    double r = std::fmod(x, two_pi);
    if (r < 0.0)
        r += two_pi;
    if (r >= two_pi)
        r = 0.0;
    return r;
}

/// theta' = theta + l, then l' = l + K sin(theta'), both mod 2pi.
inline PhasePoint standard_map_step(PhasePoint p, double kick)
{
    const double theta = wrap_angle(p.theta + p.l);
    const double l = wrap_angle(p.l + kick * std::sin(theta));
    return {theta, l};
}

inline PhasePoint standard_map_inverse_step(PhasePoint p, double kick)
{
    const double l = wrap_angle(p.l - kick * std::sin(p.theta));
    const double theta = wrap_angle(p.theta - l);
    return {theta, l};
}

inline ClassicalEnsemble evolve_ensemble(const ClassicalEnsemble& ens, double kick, int kicks)
{
    if (kicks < 0)
        throw Error("evolve_ensemble: number of kicks must be non-negative");
    ClassicalEnsemble out = ens;
    for (PhasePoint& p : out.points)
        for (int t = 0; t < kicks; ++t)
            p = standard_map_step(p, kick);
    return out;
}

/// Torus cell (X, P) holding a phase-space point.
inline std::pair<int, int> cell_of(PhasePoint p, const RotorConfig& cfg)
{
    const int ell = cfg.ell();
    const double dtheta = cfg.cell_angle();
    const auto x = floor_mod(static_cast<long>(std::floor((p.theta + 0.5 * dtheta) / dtheta)), ell);
    const auto row = floor_mod(static_cast<long>(std::floor((p.l / cfg.hbar() - 0.5) / double(ell))), ell);
    return {int(x), int(row)};
}

/// Draw points cell by cell with probability P_{X,P}, uniformly inside each cell rectangle.
inline ClassicalEnsemble sample_from_cells(const CellDistribution& dist, long n_points, std::uint64_t seed,
                                           const RotorConfig& cfg)
{
    if (!dist.folded())
        throw Error("sample_from_cells: distribution must be folded onto the torus");
    if (dist.ell() != cfg.ell())
        throw Error("sample_from_cells: grid size does not match configuration");
    if (n_points < 1)
        throw Error("sample_from_cells: need at least one point");
    const int ell = cfg.ell();
    const std::vector<double>& p = dist.values();
    std::vector<double> cumulative(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += std::max(p[i], 0.0);
        cumulative[i] = acc;
    }
    if (!(acc > 0.0))
        throw Error("sample_from_cells: distribution has no mass");

    SeededRng rng(seed);
    const double dtheta = cfg.cell_angle();
    const double hbar = cfg.hbar();
    ClassicalEnsemble ens;
    ens.seed = seed;
    ens.points.reserve(static_cast<std::size_t>(n_points));
    for (long i = 0; i < n_points; ++i) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end())
            --it;
        const auto idx = static_cast<long>(it - cumulative.begin());
        const long row = idx / ell;
        const long x = idx % ell;
        const double theta = (double(x) - 0.5 + rng.uniform()) * dtheta;
        const double l = (double(row * ell) + 0.5 + double(ell) * rng.uniform()) * hbar;
        ens.points.push_back({wrap_angle(theta), wrap_angle(l)});
    }
    return ens;
}

inline CellDistribution coarse_grain(const ClassicalEnsemble& ens, const RotorConfig& cfg)
{
    if (ens.points.empty())
        throw Error("coarse_grain: empty ensemble");
    const int ell = cfg.ell();
    std::vector<double> probs(static_cast<std::size_t>(ell) * std::size_t(ell), 0.0);
    for (const PhasePoint& p : ens.points) {
        const auto [x, row] = cell_of(p, cfg);
        probs[std::size_t(row) * std::size_t(ell) + std::size_t(x)] += 1.0;
    }
    const double n = double(ens.points.size());
    for (double& v : probs)
        v /= n;
    return CellDistribution::torus(ell, std::move(probs));
}

inline double total_variation(const CellDistribution& a, const CellDistribution& b)
{
    if (!a.folded() || !b.folded())
        throw Error("total_variation: both distributions must be folded");
    if (a.ell() != b.ell())
        throw Error("total_variation: grid mismatch (" + std::to_string(a.ell()) + " vs " +
                    std::to_string(b.ell()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.cells(); ++i)
        s += std::abs(a.values()[i] - b.values()[i]);
    return 0.5 * s;
}

}  // namespace qkr
