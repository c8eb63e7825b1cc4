#pragma once

// One-period evolution of the kicked rotor in the momentum basis,
//     U_{m,n} = J_{m-n}(K/hbar) / i^{m-n} * exp(-i n^2 hbar / 2),
// free rotation first, then the kick exp(-i K cos(theta) / hbar).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkr/bessel.hpp"
#include "qkr/config.hpp"
#include "qkr/fft.hpp"
#include "qkr/lapack.hpp"
#include "qkr/phase_space.hpp"

namespace qkr {

struct FloquetMatrix {
    Eigen::MatrixXcd entries;
    bool periodic = false;
    long n_min = 1;

    long dim() const { return entries.rows(); }
};

/// (-i)^k, the factor turning the Bessel function J_k into the transition amplitude.
inline cplx inverse_i_power(long k)
{
    switch (floor_mod(k, 4)) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
    }
}

/// Kick factors exp(-i x cos theta_j) on the grid theta_j = 2 pi j / points.
inline Eigen::VectorXcd kick_factors(long points, double kick_over_hbar)
{
    Eigen::VectorXcd f(points);
    for (long j = 0; j < points; ++j) {
        const double theta = two_pi * double(j) / double(points);
        f(j) = std::polar(1.0, -kick_over_hbar * std::cos(theta));
    }
    return f;
}

/// First column g(k) of the circulant kick operator on `points` momenta,
/// g(k) = (1/points) sum_j exp(-2 pi i j k / points) exp(-i x cos theta_j),
/// symmetrized so that g(k) == g(points - k) holds exactly.
inline Eigen::VectorXcd kick_circulant(long points, double kick_over_hbar)
{
    Eigen::VectorXcd g = kick_factors(points, kick_over_hbar);
    Dft dft(points);
    dft.forward(g);
    g /= double(points);
    for (long k = 1; k < points - k; ++k) {
        const cplx avg = 0.5 * (g(k) + g(points - k));
        g(k) = avg;
        g(points - k) = avg;
    }
    return g;
}

/// Truncated matrix on momenta n_min .. n_min + dim - 1, no folding.
inline FloquetMatrix build_windowed_matrix(double hbar, double kick, long n_min, long dim)
{
    if (dim < 1)
        throw Error("build_windowed_matrix: dim must be positive");
    if (!(hbar > 0.0))
        throw Error("build_windowed_matrix: hbar must be positive");
    const std::vector<double> bessel = bessel_j_sequence(dim - 1, kick / hbar);
    FloquetMatrix u;
    u.periodic = false;
    u.n_min = n_min;
    u.entries.resize(dim, dim);
    for (long c = 0; c < dim; ++c) {
        const cplx free = std::polar(1.0, -free_phase(n_min + c, hbar));
        for (long r = 0; r < dim; ++r) {
            const long k = r - c;
            const long a = std::labs(k);
            // J_{-a} = (-1)^a J_a
            double j = bessel[static_cast<std::size_t>(a)];
            if (k < 0 && a % 2 == 1)
                j = -j;
            u.entries(r, c) = j * inverse_i_power(k) * free;
        }
    }
    return u;
}

inline FloquetMatrix build_windowed_matrix(const RotorConfig& cfg, long n_min, long dim)
{
    return build_windowed_matrix(cfg.hbar(), cfg.kick(), n_min, dim);
}

/// Exactly unitary N x N operator on the momentum torus n = 1..N, N = ell^2,
/// U = F^dagger D_kick F D_free on the N-point angle grid.
inline FloquetMatrix build_periodic_matrix(const RotorConfig& cfg)
{
    cfg.require_even("build_periodic_matrix");
    const long n = cfg.dim();
    const Eigen::VectorXcd g = kick_circulant(n, cfg.kick() / cfg.hbar());
    FloquetMatrix u;
    u.periodic = true;
    u.n_min = 1;
    u.entries.resize(n, n);
    for (long c = 0; c < n; ++c) {
        const cplx free = std::polar(1.0, -cfg.free_phase(1 + c));
        for (long r = 0; r < n; ++r)
            u.entries(r, c) = g(floor_mod(r - c, n)) * free;
    }
    return u;
}

/// Split-step propagator for a fixed momentum window.
///
/// The kick is applied on a grid with as many angles as the window has
/// momenta, so the window behaves as a torus of that length. With the window
/// equal to the N states of an even-N configuration this is exactly the
/// periodic Floquet operator.
class KickPropagator {
public:
    KickPropagator(const RotorConfig& cfg, long n_min)
        : n_min_(n_min), free_(cfg.dim()), kick_(kick_factors(cfg.dim(), cfg.kick() / cfg.hbar())),
          dft_(cfg.dim())
    {
        cfg.require_even("KickPropagator");
        for (long k = 0; k < cfg.dim(); ++k)
            free_(k) = std::polar(1.0, -cfg.free_phase(n_min + k));
    }

    /// Padded window with arbitrary hbar.
    KickPropagator(double hbar, double kick, long n_min, long dim)
        : n_min_(n_min), free_(dim), kick_(kick_factors(dim, kick / hbar)), dft_(dim)
    {
        if (!(hbar > 0.0) || dim < 1)
            throw Error("KickPropagator: need hbar > 0 and a non-empty window");
        for (long k = 0; k < dim; ++k)
            free_(k) = std::polar(1.0, -free_phase(n_min + k, hbar));
    }

    long n_min() const { return n_min_; }
    long dim() const { return free_.size(); }

    void step(MomentumWavefunction& psi)
    {
        if (psi.n_min != n_min_ || psi.dim() != dim())
            throw Error("KickPropagator: wavefunction window does not match the propagator");
        psi.amplitudes.array() *= free_.array();
        dft_.backward(psi.amplitudes);
        psi.amplitudes.array() *= kick_.array();
        dft_.forward(psi.amplitudes);
    }

private:
    long n_min_;
    Eigen::VectorXcd free_;
    Eigen::VectorXcd kick_;
    Dft dft_;
};

/// One kick on a wavefunction spanning exactly one momentum period (N states).
inline MomentumWavefunction evolve_one_kick(const MomentumWavefunction& psi, const RotorConfig& cfg)
{
    if (psi.dim() != cfg.dim())
        throw Error("evolve_one_kick: wavefunction must cover one momentum period (N = " +
                    std::to_string(cfg.dim()) + " states)");
    KickPropagator prop(cfg, psi.n_min);
    MomentumWavefunction out = psi;
    prop.step(out);
    return out;
}

struct FloquetSpectrum {
    std::vector<double> quasi_energies;             // ascending, in [0, 2 pi)
    std::optional<Eigen::MatrixXcd> eigenvectors;   // column k belongs to quasi_energies[k]

    long size() const { return static_cast<long>(quasi_energies.size()); }
};

/// Quasi-energy E of an eigenvalue lambda = exp(-i E), reduced into [0, 2 pi).
inline double quasi_energy_of(cplx lambda)
{
    double e = -std::arg(lambda);
    if (e < 0.0)
        e += two_pi;
    if (e >= two_pi)
        e = 0.0;
    return e;
}

inline double unitarity_defect(const Eigen::MatrixXcd& u)
{
    const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

/// Dense eigendecomposition of a Floquet matrix.
inline FloquetSpectrum quasi_energy_spectrum(const FloquetMatrix& u, bool want_vectors)
{
    if (u.dim() < 1)
        throw Error("quasi_energy_spectrum: empty matrix");
    Eigen::MatrixXcd work = u.entries;
    lapack::GeneralEigen eig = lapack::zgeev(work, want_vectors);
    if (eig.info != 0) {
        throw Error("quasi_energy_spectrum: zgeev failed (info = " + std::to_string(eig.info) +
                    ", dim = " + std::to_string(u.dim()) +
                    ", max|U^dagger U - I| = " + std::to_string(unitarity_defect(u.entries)) +
                    ", max|U_mn| = " + std::to_string(u.entries.cwiseAbs().maxCoeff()) + ")");
    }
    const long n = u.dim();
    std::vector<double> e(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k)
        e[static_cast<std::size_t>(k)] = quasi_energy_of(eig.values(k));
    std::vector<long> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0L);
    std::stable_sort(order.begin(), order.end(),
                     [&](long a, long b) { return e[std::size_t(a)] < e[std::size_t(b)]; });

    FloquetSpectrum out;
    out.quasi_energies.reserve(static_cast<std::size_t>(n));
    for (long k : order)
        out.quasi_energies.push_back(e[static_cast<std::size_t>(k)]);
    if (want_vectors) {
        Eigen::MatrixXcd v(n, n);
        for (long k = 0; k < n; ++k)
            v.col(k) = eig.right_vectors.col(order[static_cast<std::size_t>(k)]).normalized();
        out.eigenvectors = std::move(v);
    }
    return out;
}

/// Floquet states of a momentum window ranked by distance from a center momentum.
struct WindowedSpectrum {
    long k0 = 0;
    long n_min = 0;
    long window_dim = 0;
    double hbar = 0.0;
    double kick = 0.0;
    // Parallel arrays, ranked by ascending `distance`.
    std::vector<double> quasi_energies;
    std::vector<double> centers;        // sum_n n |phi_n|^2
    std::vector<double> distance;       // sum_n |n - k0| |phi_n|^2
    std::vector<double> participation;  // 1 / sum_n |phi_n|^4
    /// Largest | |z^T U_s z| - 1 | over the eigenvectors; near zero when every
    /// returned vector is a genuine Floquet state.
    double max_eigen_defect = 0.0;

    long size() const { return static_cast<long>(quasi_energies.size()); }
};

inline constexpr long localization_window_cap = 8000;

/// Window length for selecting L states around a center at (hbar, K):
/// L plus a buffer of 8 K^2 / hbar^2, capped, never below 2L, rounded to even.
inline long localization_window_dim(long states, double hbar, double kick)
{
    if (states < 1)
        throw Error("localization_window_dim: need at least one state");
    const double buffer = std::ceil(8.0 * kick * kick / (hbar * hbar));
    double want = std::min(double(states) + buffer, double(localization_window_cap));
    want = std::max(want, 2.0 * double(states));
    long dim = long(want);
    if (dim % 2 != 0)
        ++dim;
    if (dim > localization_window_cap)
        throw Error("localization_window_dim: " + std::to_string(states) +
                    " states need a window of " + std::to_string(dim) + " > cap " +
                    std::to_string(localization_window_cap));
    return dim;
}

/// Floquet states of the window k0 - dim/2 .. k0 + dim/2 - 1, ranked by
/// closeness to the center momentum k0.
///
/// The window is closed into a torus of length `window_dim` by building the
/// kick on a window_dim-point angle grid. The symmetrized operator U_s = D^{1/2} K D^{1/2} (D the free
/// rotation, K the kick) is then complex symmetric and unitary, so its real
/// and imaginary parts are commuting real symmetric matrices with common real
/// eigenvectors. One real symmetric eigensolve of Re U_s + a Im U_s (a
/// irrational) yields those eigenvectors; the eigenvalue of U_s follows from
/// z^T Re(U_s) z and the combined eigenvalue. Eigenvectors of U differ from
/// those of U_s by a diagonal phase, so momentum profiles are shared.
inline WindowedSpectrum windowed_spectrum_around(long k0, long window_dim, double hbar, double kick)
{
    if (window_dim < 2)
        throw Error("windowed_spectrum_around: window must hold at least two states");
    if (!(hbar > 0.0) || !(kick >= 0.0))
        throw Error("windowed_spectrum_around: need hbar > 0 and K >= 0");
    const long dim = window_dim;
    const long n_min = k0 - dim / 2;
    const Eigen::VectorXcd g = kick_circulant(dim, kick / hbar);
    Eigen::VectorXcd half(dim);
    for (long k = 0; k < dim; ++k)
        half(k) = std::polar(1.0, -0.5 * free_phase(n_min + k, hbar));

    constexpr double mix = 0.6180339887498949;
    Eigen::MatrixXd work(dim, dim);
    for (long c = 0; c < dim; ++c)
        for (long r = 0; r <= c; ++r) {
            const cplx v = half(r) * g(floor_mod(r - c, dim)) * half(c);
            work(r, c) = v.real() + mix * v.imag();
        }
    lapack::SymmetricEigen eig = lapack::dsyevr(work);
    if (eig.info != 0)
        throw Error("windowed_spectrum_around: dsyevr failed (info = " + std::to_string(eig.info) +
                    ", dim = " + std::to_string(dim) + ")");

    // Real part of U_s, reusing the work buffer.
    for (long c = 0; c < dim; ++c)
        for (long r = 0; r <= c; ++r) {
            const double v = (half(r) * g(floor_mod(r - c, dim)) * half(c)).real();
            work(r, c) = v;
            work(c, r) = v;
        }
    Eigen::VectorXd cos_part(dim);
    {
        Eigen::MatrixXd y(dim, dim);
        y.noalias() = work * eig.vectors;
        cos_part = y.cwiseProduct(eig.vectors).colwise().sum().transpose();
    }
    work.resize(0, 0);

    WindowedSpectrum ws;
    ws.k0 = k0;
    ws.n_min = n_min;
    ws.window_dim = dim;
    ws.hbar = hbar;
    ws.kick = kick;
    std::vector<double> energy(static_cast<std::size_t>(dim)), center(energy.size()), dist(energy.size()),
        part(energy.size());
    for (long k = 0; k < dim; ++k) {
        const double c = cos_part(k);
        const double s = (eig.values(k) - c) / mix;
        ws.max_eigen_defect = std::max(ws.max_eigen_defect, std::abs(std::hypot(c, s) - 1.0));
        // U_s z = (c + i s) z = exp(-i E) z
        energy[std::size_t(k)] = quasi_energy_of(cplx(c, s));
        double m1 = 0.0, ma = 0.0, m4 = 0.0;
        for (long j = 0; j < dim; ++j) {
            const double w = eig.vectors(j, k) * eig.vectors(j, k);
            const double n = double(n_min + j);
            m1 += n * w;
            ma += std::abs(n - double(k0)) * w;
            m4 += w * w;
        }
        center[std::size_t(k)] = m1;
        dist[std::size_t(k)] = ma;
        part[std::size_t(k)] = 1.0 / m4;
    }
    const std::vector<long> order = [&] {
        std::vector<long> o(static_cast<std::size_t>(dim));
        std::iota(o.begin(), o.end(), 0L);
        std::stable_sort(o.begin(), o.end(), [&](long a, long b) {
            return dist[std::size_t(a)] < dist[std::size_t(b)];
        });
        return o;
    }();
    for (long k : order) {
        ws.quasi_energies.push_back(energy[std::size_t(k)]);
        ws.centers.push_back(center[std::size_t(k)]);
        ws.distance.push_back(dist[std::size_t(k)]);
        ws.participation.push_back(part[std::size_t(k)]);
    }
    return ws;
}

/// Quasi-energies of the `states` Floquet states closest to the center.
inline std::vector<double> closest_quasi_energies(const WindowedSpectrum& ws, long states)
{
    if (states < 1)
        throw Error("closest_quasi_energies: need at least one state");
    if (2 * states > ws.window_dim)
        throw Error("closest_quasi_energies: window of " + std::to_string(ws.window_dim) +
                    " momenta is too small for " + std::to_string(states) +
                    " states (need at least twice as many)");
    return {ws.quasi_energies.begin(), ws.quasi_energies.begin() + states};
}

}  // namespace qkr
