#pragma once

// Thin wrappers over the LAPACKE drivers used for dense eigenproblems.

#include <complex>
#include <string>
#include <vector>

#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

#include <Eigen/Dense>

#include "qkr/config.hpp"

namespace qkr::lapack {

struct GeneralEigen {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd right_vectors;  // empty unless requested
    int info = 0;
};

/// General complex eigenproblem (zgeev: balance, Hessenberg, shifted QR).
/// `a` is overwritten.
inline GeneralEigen zgeev(Eigen::MatrixXcd& a, bool want_vectors)
{
    const auto n = static_cast<lapack_int>(a.rows());
    GeneralEigen out;
    out.values.resize(n);
    if (want_vectors)
        out.right_vectors.resize(n, n);
    std::complex<double> dummy{};
    out.info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n,
                             out.values.data(), &dummy, 1,
                             want_vectors ? out.right_vectors.data() : &dummy, want_vectors ? n : 1);
    return out;
}

struct SymmetricEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    int info = 0;
};

/// All eigenpairs of a real symmetric matrix (dsyevr, relatively robust
/// representations). Only the upper triangle of `a` is read; it is overwritten.
inline SymmetricEigen dsyevr(Eigen::MatrixXd& a)
{
    const auto n = static_cast<lapack_int>(a.rows());
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    std::vector<lapack_int> support(static_cast<std::size_t>(2 * n));
    lapack_int found = 0;
    out.info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0, &found,
                              out.values.data(), out.vectors.data(), n, support.data());
    if (out.info == 0 && found != n)
        out.info = -1000;
    return out;
}

}  // namespace qkr::lapack
