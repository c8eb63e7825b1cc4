#pragma once

// Long-time behaviour of observables under the kicked-rotor Floquet map.
//
// All expectations are sampled immediately after each kick. With
// psi0 = sum_m c_m phi_m over Floquet states, a non-degenerate spectrum makes
// the time average converge to the diagonal ensemble sum_m |c_m|^2 A_mm, and
// non-degenerate gaps keep the temporal variance below
// lambda_max(A A^dagger) * sum_m |c_m|^4.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkr/config.hpp"
#include "qkr/floquet.hpp"
#include "qkr/phase_space.hpp"

namespace qkr {

class Observable {
public:
    Observable(Eigen::MatrixXcd matrix, std::string label) : matrix_(std::move(matrix)), label_(std::move(label))
    {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
            throw Error("Observable '" + label_ + "': matrix must be square and non-empty");
        const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 1e-12)
            throw Error("Observable '" + label_ + "': matrix is not Hermitian (defect " + std::to_string(asym) + ")");
    }

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const std::string& label() const { return label_; }
    long dim() const { return matrix_.rows(); }

    double expectation(const Eigen::VectorXcd& psi) const { return psi.dot(matrix_ * psi).real(); }

    /// Largest minus smallest eigenvalue.
    double spread() const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    }

    /// Operator norm of A A^dagger, i.e. the largest eigenvalue of A A^dagger.
    double norm_aadag() const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_ * matrix_.adjoint(), Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }

private:
    Eigen::MatrixXcd matrix_;
    std::string label_;
};

inline Observable identity_observable(long dim)
{
    return {Eigen::MatrixXcd::Identity(dim, dim), "identity"};
}

/// cos(theta) on the torus window: 1/2 on the first off-diagonals, wrapping at the corners.
inline Observable cos_theta_observable(long dim)
{
    if (dim < 3)
        throw Error("cos_theta_observable: need at least three momenta");
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (long n = 0; n < dim; ++n) {
        a(n, (n + 1) % dim) += 0.5;
        a((n + 1) % dim, n) += 0.5;
    }
    return {std::move(a), "cos_theta"};
}

/// l^2 = (n hbar)^2 on the momenta of the window.
inline Observable momentum_squared_observable(long n_min, long dim, double hbar)
{
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (long k = 0; k < dim; ++k) {
        const double l = double(n_min + k) * hbar;
        a(k, k) = l * l;
    }
    return {std::move(a), "momentum_squared"};
}

/// |X,P><X,P| restricted to the window n_min .. n_min + dim - 1.
inline Observable cell_projector_observable(long x, long p, const RotorConfig& cfg, long n_min, long dim)
{
    const MomentumWavefunction b = make_basis_state(x, p, cfg);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (long k = 0; k < dim; ++k)
        v(k) = b.at(n_min + k);
    return {v * v.adjoint(), "cell_projector(" + std::to_string(x) + "," + std::to_string(p) + ")"};
}

/// <A> after each of the first `kicks` kicks.
inline std::vector<double> stroboscopic_expectations(const MomentumWavefunction& psi0, const Observable& a,
                                                     const RotorConfig& cfg, long kicks)
{
    if (kicks < 1)
        throw Error("stroboscopic_expectations: need at least one kick");
    if (a.dim() != psi0.dim())
        throw Error("stroboscopic_expectations: observable and state dimensions differ");
    KickPropagator prop(cfg, psi0.n_min);
    MomentumWavefunction psi = psi0;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kicks));
    for (long t = 0; t < kicks; ++t) {
        prop.step(psi);
        out.push_back(a.expectation(psi.amplitudes));
    }
    return out;
}

namespace detail {

inline const Eigen::MatrixXcd& require_vectors(const FloquetSpectrum& spectrum, long dim)
{
    if (!spectrum.eigenvectors)
        throw Error("diagonal ensemble: spectrum was computed without eigenvectors");
    if (spectrum.eigenvectors->rows() != dim)
        throw Error("diagonal ensemble: spectrum and state dimensions differ");
    return *spectrum.eigenvectors;
}

}  // namespace detail

/// sum_m |<phi_m|psi0>|^2 <phi_m|A|phi_m>.
inline double diagonal_ensemble_average(const MomentumWavefunction& psi0, const Observable& a,
                                        const FloquetSpectrum& spectrum)
{
    const Eigen::MatrixXcd& v = detail::require_vectors(spectrum, psi0.dim());
    const Eigen::VectorXcd c = v.adjoint() * psi0.amplitudes;
    const Eigen::MatrixXcd av = a.matrix() * v;
    double s = 0.0;
    for (long m = 0; m < v.cols(); ++m)
        s += std::norm(c(m)) * v.col(m).dot(av.col(m)).real();
    return s;
}

struct AveragingReport {
    double time_average = 0.0;
    double diagonal_average = 0.0;
    double fluctuation_sq = 0.0;   // temporal variance of the expectation sequence
    double norm_aadag = 0.0;
    double trace_rho_mc_sq = 0.0;  // sum_m |c_m|^4
    double bound = 0.0;            // norm_aadag * trace_rho_mc_sq
    long kicks = 0;

    double normalized_fluctuation() const { return norm_aadag > 0.0 ? fluctuation_sq / norm_aadag : 0.0; }
    bool within_bound() const { return fluctuation_sq <= bound + 1e-8; }
};

inline AveragingReport fluctuation_report(const MomentumWavefunction& psi0, const Observable& a,
                                          const RotorConfig& cfg, const FloquetSpectrum& spectrum, long kicks)
{
    const Eigen::MatrixXcd& v = detail::require_vectors(spectrum, psi0.dim());
    const std::vector<double> series = stroboscopic_expectations(psi0, a, cfg, kicks);
    double mean = 0.0;
    for (double x : series)
        mean += x;
    mean /= double(series.size());
    double var = 0.0;
    for (double x : series)
        var += (x - mean) * (x - mean);
    var /= double(series.size());

    const Eigen::VectorXcd c = v.adjoint() * psi0.amplitudes;
    double purity = 0.0;
    for (long m = 0; m < c.size(); ++m)
        purity += std::norm(c(m)) * std::norm(c(m));

    AveragingReport rep;
    rep.time_average = mean;
    rep.diagonal_average = diagonal_ensemble_average(psi0, a, spectrum);
    rep.fluctuation_sq = var;
    rep.norm_aadag = a.norm_aadag();
    rep.trace_rho_mc_sq = purity;
    rep.bound = rep.norm_aadag * purity;
    rep.kicks = kicks;
    return rep;
}

}  // namespace qkr
