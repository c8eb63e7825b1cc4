#pragma once

// Planck-cell phase space of the kicked rotor.
//
// Cell (X, P) carries the state
//     |X,P> = (1/sqrt(ell)) sum_{n = P ell + 1}^{P ell + ell} exp(-i n X 2pi/ell) |n>,
// i.e. the seed |0,0> (equal weights on momenta 1..ell) translated by X cells
// in angle and P cells in momentum. The cells tile the momentum axis in blocks
// of ell consecutive quantum numbers, so projecting a wavefunction onto the
// cells is one ell-point DFT per block.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qkr/config.hpp"
#include "qkr/fft.hpp"

namespace qkr {

/// Complex amplitudes on the contiguous momentum window n_min .. n_min + dim - 1.
struct MomentumWavefunction {
    long n_min = 0;
    Eigen::VectorXcd amplitudes;

    long dim() const { return static_cast<long>(amplitudes.size()); }
    long n_max() const { return n_min + dim() - 1; }
    double norm_squared() const { return amplitudes.squaredNorm(); }

    cplx at(long n) const
    {
        if (n < n_min || n > n_max())
            return {0.0, 0.0};
        return amplitudes(n - n_min);
    }
};

/// Inner product <a|b> over the union of the two momentum windows.
inline cplx inner(const MomentumWavefunction& a, const MomentumWavefunction& b)
{
    const long lo = std::max(a.n_min, b.n_min);
    const long hi = std::min(a.n_max(), b.n_max());
    cplx s{0.0, 0.0};
    for (long n = lo; n <= hi; ++n)
        s += std::conj(a.amplitudes(n - a.n_min)) * b.amplitudes(n - b.n_min);
    return s;
}

/// Probabilities on Planck cells, rows P = p_min .. p_min + rows - 1, columns X = 0 .. ell - 1.
class CellDistribution {
public:
    CellDistribution(int ell, long p_min, long rows, bool folded)
        : ell_(ell), p_min_(p_min), rows_(rows), folded_(folded),
          probs_(static_cast<std::size_t>(rows * ell), 0.0)
    {
        if (ell < 1 || rows < 1)
            throw Error("CellDistribution: empty grid");
        if (folded && (p_min != 0 || rows != ell))
            throw Error("CellDistribution: a folded grid has rows 0 .. ell-1");
    }

    /// Folded (torus) distribution on ell x ell cells from row-major probabilities [P][X].
    static CellDistribution torus(int ell, std::vector<double> probs)
    {
        CellDistribution d(ell, 0, ell, true);
        if (probs.size() != d.probs_.size())
            throw Error("CellDistribution::torus: expected ell^2 probabilities");
        d.probs_ = std::move(probs);
        return d;
    }

    int ell() const { return ell_; }
    long p_min() const { return p_min_; }
    long rows() const { return rows_; }
    bool folded() const { return folded_; }
    std::size_t cells() const { return probs_.size(); }

    double at(int x, long p) const
    {
        if (x < 0 || x >= ell_ || p < p_min_ || p >= p_min_ + rows_)
            return 0.0;
        return probs_[index(x, p)];
    }
    double& ref(int x, long p)
    {
        if (x < 0 || x >= ell_ || p < p_min_ || p >= p_min_ + rows_)
            throw Error("CellDistribution: cell outside grid");
        return probs_[index(x, p)];
    }

    const std::vector<double>& values() const { return probs_; }

    double total() const
    {
        double s = 0.0;
        for (double p : probs_)
            s += p;
        return s;
    }

private:
    std::size_t index(int x, long p) const
    {
        return static_cast<std::size_t>((p - p_min_) * ell_ + x);
    }

    int ell_;
    long p_min_;
    long rows_;
    bool folded_;
    std::vector<double> probs_;
};

/// |0,0>: amplitude 1/sqrt(ell) on momenta 1..ell.
inline MomentumWavefunction make_seed_state(const RotorConfig& cfg)
{
    MomentumWavefunction psi;
    psi.n_min = 1;
    psi.amplitudes = Eigen::VectorXcd::Constant(cfg.ell(), cplx(1.0 / std::sqrt(double(cfg.ell())), 0.0));
    return psi;
}

/// Angle translation by x cells: amplitude at n picks up exp(-i n x 2pi/ell).
inline MomentumWavefunction translate_theta(const MomentumWavefunction& psi, long x, const RotorConfig& cfg)
{
    MomentumWavefunction out = psi;
    const long ell = cfg.ell();
    for (long k = 0; k < psi.dim(); ++k) {
        const long n = psi.n_min + k;
        // n*x reduced modulo ell keeps the phase argument small for large n.
        const long r = floor_mod(floor_mod(n, ell) * floor_mod(x, ell), ell);
        out.amplitudes(k) *= std::polar(1.0, -two_pi * double(r) / double(ell));
    }
    return out;
}

/// Momentum translation by p cells, i.e. by p*ell momentum quanta.
inline MomentumWavefunction translate_l(const MomentumWavefunction& psi, long p, const RotorConfig& cfg)
{
    MomentumWavefunction out = psi;
    out.n_min += p * cfg.ell();
    return out;
}

inline MomentumWavefunction make_basis_state(long x, long p, const RotorConfig& cfg)
{
    if (x < 0 || x >= cfg.ell())
        throw Error("make_basis_state: X must lie in [0, ell), got " + std::to_string(x));
    return translate_theta(translate_l(make_seed_state(cfg), p, cfg), x, cfg);
}

/// Map every momentum onto the torus window 1..N (N = ell^2), adding amplitudes
/// that land on the same quantum number.
inline MomentumWavefunction wrap_to_torus(const MomentumWavefunction& psi, const RotorConfig& cfg)
{
    const long n_states = cfg.dim();
    MomentumWavefunction out;
    out.n_min = 1;
    out.amplitudes = Eigen::VectorXcd::Zero(n_states);
    for (long k = 0; k < psi.dim(); ++k)
        out.amplitudes(floor_mod(psi.n_min + k - 1, n_states)) += psi.amplitudes(k);
    return out;
}

/// Unitary projection onto Planck cells, P_{X,P} = |<X,P|psi>|^2.
///
/// The window must start on a cell boundary (n_min = 1 mod ell); a trailing
/// partial block is zero-padded.
inline CellDistribution project_to_cells(const MomentumWavefunction& psi, const RotorConfig& cfg)
{
    const long ell = cfg.ell();
    if (floor_mod(psi.n_min - 1, ell) != 0)
        throw Error("project_to_cells: window start " + std::to_string(psi.n_min) +
                    " is not aligned to a cell boundary (need n_min = 1 mod ell)");
    if (psi.dim() == 0)
        throw Error("project_to_cells: empty wavefunction");
    const long p_min = floor_div(psi.n_min - 1, ell);
    const long rows = (psi.dim() + ell - 1) / ell;
    CellDistribution dist(cfg.ell(), p_min, rows, false);

    Dft dft(ell);
    Eigen::VectorXcd block(ell);
    for (long r = 0; r < rows; ++r) {
        block.setZero();
        for (long j = 0; j < ell; ++j) {
            const long k = r * ell + j;
            if (k < psi.dim())
                block(j) = psi.amplitudes(k);
        }
        // <X,P|psi> = (1/sqrt ell) e^{2 pi i X (P ell + 1)/ell} sum_j e^{2 pi i j X/ell} psi_j;
        // the leading factor has unit modulus, and backward() carries 1/ell.
        dft.backward(block);
        for (long x = 0; x < ell; ++x)
            dist.ref(int(x), p_min + r) = double(ell) * std::norm(block(x));
    }
    const double total = dist.total();
    if (std::abs(total - 1.0) > 1e-8)
        throw Error("project_to_cells: wavefunction is not normalized (total probability " +
                    std::to_string(total) + ")");
    return dist;
}

/// Sum cell rows whose index differs by a multiple of ell onto the torus rows 0..ell-1.
inline CellDistribution fold_momentum(const CellDistribution& dist, const RotorConfig& cfg)
{
    if (dist.folded())
        throw Error("fold_momentum: distribution is already folded");
    if (dist.ell() != cfg.ell())
        throw Error("fold_momentum: grid size does not match configuration");
    const int ell = cfg.ell();
    CellDistribution out(ell, 0, ell, true);
    for (long p = dist.p_min(); p < dist.p_min() + dist.rows(); ++p)
        for (int x = 0; x < ell; ++x)
            out.ref(x, floor_mod(p, ell)) += dist.at(x, p);
    return out;
}

/// Phase-space entropy -sum p ln p, with 0 ln 0 = 0.
inline double entropy(const CellDistribution& dist)
{
    double s = 0.0;
    for (double p : dist.values())
        if (p > 1e-300)
            s -= p * std::log(p);
    return s;
}

struct SpreadMoments {
    double var_l;
    double var_theta;
};

/// Closed-form spreads of |0,0> in momentum index and in angle (about theta = 0).
inline SpreadMoments basis_spread_moments(const RotorConfig& cfg)
{
    const double ell = cfg.ell();
    double corr = 0.0;
    for (int k = 1; k < cfg.ell(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        corr += sign * (ell - k) / (double(k) * double(k));
    }
    return {(ell * ell - 1.0) / 12.0, std::numbers::pi * std::numbers::pi / 3.0 + 4.0 / ell * corr};
}

/// Angular density |<theta|0,0>|^2 of the seed state.
inline double seed_angle_density(double theta, int ell)
{
    // |sum_{n=1}^{ell} e^{i n theta}|^2 = ell + 2 sum_k (ell - k) cos(k theta)
    double s = ell;
    for (int k = 1; k < ell; ++k)
        s += 2.0 * (ell - k) * std::cos(k * theta);
    return s / (two_pi * ell);
}

/// Angle variance of |0,0> on [-pi, pi) by composite Gauss-Legendre quadrature.
///
/// Used to report the numeric side of the closed form; each panel is short
/// compared to the oscillation period 2pi/ell so 8-point rules are exact to
/// roundoff.
inline double seed_angle_variance_numeric(int ell)
{
    static constexpr double nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                        0.9602898564975363};
    static constexpr double weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                          0.1012285362903763};
    const long panels = 64L * std::max(ell, 4);
    const double h = two_pi / double(panels);
    double acc = 0.0;
    for (long i = 0; i < panels; ++i) {
        const double mid = -std::numbers::pi + (double(i) + 0.5) * h;
        for (int q = 0; q < 4; ++q)
            for (double s : {-1.0, 1.0}) {
                const double t = mid + s * nodes[q] * h / 2.0;
                acc += weights[q] * t * t * seed_angle_density(t, ell);
            }
    }
    return acc * h / 2.0;
}

}  // namespace qkr
