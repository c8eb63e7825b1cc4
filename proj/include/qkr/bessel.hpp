#pragma once

// Bessel functions of the first kind, integer order.
//
// Moderate orders and arguments use Miller's backward recurrence
//     J_{k-1}(x) = (2k/x) J_k(x) - J_{k+1}(x),
// which is stable downwards. The unnormalized sequence is fixed in magnitude
// by sum_k J_k^2 = 1 (J_0^2 + 2 sum_{k>0} J_k^2, all terms positive) and in
// sign by J_0 + 2 sum_{k>0} J_{2k} = 1.

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "qkr/config.hpp"

namespace qkr {

namespace detail {

inline constexpr double bessel_rescale_at = 1e120;
inline constexpr double bessel_rescale_by = 1e-120;
inline constexpr double bessel_miller_limit = 1e4;

inline long miller_start(long order, double x)
{
    const double top = std::max(double(order), std::ceil(x));
    long start = long(top) + 30 + long(std::ceil(std::sqrt(160.0 * std::max(top, 1.0))));
    if (start % 2 != 0)
        ++start;
    return start;
}

inline void bessel_check_args(long order, double x)
{
    if (!(x >= 0.0) || !std::isfinite(x))
        throw Error("bessel_j: argument must be finite and non-negative");
    if (std::labs(order) > 1000000)
        throw Error("bessel_j: |order| above 1e6 is not supported");
    if (x > 1e8)
        throw Error("bessel_j: argument above 1e8 is not supported");
}

}  // namespace detail

/// J_0(x) .. J_max_order(x) from one backward sweep. Values below ~1e-300 flush to zero.
inline std::vector<double> bessel_j_sequence(long max_order, double x)
{
    detail::bessel_check_args(max_order, x);
    if (max_order < 0)
        throw Error("bessel_j_sequence: max_order must be non-negative");
    std::vector<double> out(static_cast<std::size_t>(max_order + 1), 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const long start = detail::miller_start(max_order, x);
    const long keep = max_order;
    std::vector<double> f(static_cast<std::size_t>(keep + 1), 0.0);

    double above = 0.0;      // f_{k+1}
    double current = 1.0;    // f_k, seeded at k = start
    double sum_sq = 0.0;     // sum_{k>0} f_k^2
    double even_sum = 0.0;   // sum_{k>0, even} f_k
    for (long k = start; k >= 1; --k) {
        if (k <= keep)
            f[static_cast<std::size_t>(k)] = current;
        sum_sq += current * current;
        if (k % 2 == 0)
            even_sum += current;
        const double below = (2.0 * double(k) / x) * current - above;
        above = current;
        current = below;
        if (std::abs(current) > detail::bessel_rescale_at) {
            const double s = detail::bessel_rescale_by;
            current *= s;
            above *= s;
            sum_sq *= s * s;
            even_sum *= s;
            for (long j = k; j <= keep; ++j)
                f[static_cast<std::size_t>(j)] *= s;
        }
    }
    const double f0 = current;
    f[0] = f0;
    const double norm = std::sqrt(f0 * f0 + 2.0 * sum_sq);
    const double sign = (f0 + 2.0 * even_sum) >= 0.0 ? 1.0 : -1.0;
    if (!std::isfinite(norm) || norm == 0.0)
        throw Error("bessel_j_sequence: recurrence overflowed for x = " + std::to_string(x));
    for (long k = 0; k <= keep; ++k)
        out[static_cast<std::size_t>(k)] = sign * f[static_cast<std::size_t>(k)] / norm;
    return out;
}

/// J_order(x) for integer order and x >= 0.
inline double bessel_j(long order, double x)
{
    detail::bessel_check_args(order, x);
    const long n = std::labs(order);
    const double parity = (order < 0 && n % 2 == 1) ? -1.0 : 1.0;
    if (x == 0.0)
        return n == 0 ? 1.0 : 0.0;

    if (double(n) > detail::bessel_miller_limit || x > detail::bessel_miller_limit) {
        const double v = boost::math::cyl_bessel_j(double(n), x);
        if (!std::isfinite(v))
            throw Error("bessel_j: evaluation failed for order " + std::to_string(order));
        return parity * v;
    }

    const long start = detail::miller_start(n, x);
    double above = 0.0;
    double current = 1.0;
    double sum_sq = 0.0;
    double even_sum = 0.0;
    double target = 0.0;
    int rescales_after_target = 0;
    bool have_target = false;
    for (long k = start; k >= 1; --k) {
        if (k == n) {
            target = current;
            have_target = true;
        }
        sum_sq += current * current;
        if (k % 2 == 0)
            even_sum += current;
        const double below = (2.0 * double(k) / x) * current - above;
        above = current;
        current = below;
        if (std::abs(current) > detail::bessel_rescale_at) {
            const double s = detail::bessel_rescale_by;
            current *= s;
            above *= s;
            sum_sq *= s * s;
            even_sum *= s;
            if (have_target)
                ++rescales_after_target;
        }
    }
    if (n == 0) {
        target = current;
        have_target = true;
    }
    const double f0 = current;
    const double norm = std::sqrt(f0 * f0 + 2.0 * sum_sq);
    if (!std::isfinite(norm) || norm == 0.0 || !std::isfinite(target))
        throw Error("bessel_j: recurrence overflowed for order " + std::to_string(order));
    const double sign = (f0 + 2.0 * even_sum) >= 0.0 ? 1.0 : -1.0;
    double value = target / norm;
    for (int i = 0; i < rescales_after_target; ++i)
        value *= detail::bessel_rescale_by;
    return parity * sign * value;
}

}  // namespace qkr
