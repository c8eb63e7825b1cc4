#pragma once

// Degeneracy statistics of a quasi-energy spectrum.
//
// For values in [0, L) binned into M equal intervals with counts b_i, the
// squared L2 distance between the empirical and the uniform density is
//     d(M) = (M/L) sum_i (b_i/count)^2 - 1/L.
// While M is fine enough that only (near-)degenerate values share a bin,
// d(M) is linear in M, and L*count*slope counts the mean multiplicity of the
// values: 1 for a non-degenerate set, k for k-fold degeneracy. Applied to the
// quasi-energies this is eta; applied to the circular pair gaps it is zeta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qkr/config.hpp"
#include "qkr/floquet.hpp"

namespace qkr {

/// Largest spectrum whose pair gaps are materialized for zeta.
inline constexpr long max_gap_spectrum = 4000;

inline double circular_gap(double ei, double ej)
{
    const double d = std::abs(ei - ej);
    return std::min(d, two_pi - d);
}

inline std::vector<double> all_gaps(const std::vector<double>& quasi_energies)
{
    const long n = static_cast<long>(quasi_energies.size());
    if (n < 1)
        throw Error("all_gaps: empty spectrum");
    if (n > max_gap_spectrum)
        throw Error("all_gaps: " + std::to_string(n) + " quasi-energies exceed the gap ceiling of " +
                    std::to_string(max_gap_spectrum));
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            gaps.push_back(circular_gap(quasi_energies[std::size_t(i)], quasi_energies[std::size_t(j)]));
    return gaps;
}

namespace detail {

inline void check_domain(double domain_length)
{
    if (!(domain_length > 0.0) || !std::isfinite(domain_length))
        throw Error("degeneracy statistics: domain length must be positive");
}

/// Bin of v among m half-open bins over [0, domain); v == domain goes to the last bin.
inline std::int64_t bin_of(double v, std::int64_t m, double domain)
{
    auto b = static_cast<std::int64_t>(std::floor(v / domain * double(m)));
    return std::clamp<std::int64_t>(b, 0, m - 1);
}

inline void check_values(const std::vector<double>& values, double domain)
{
    for (double v : values)
        if (!(v >= 0.0 && v <= domain))
            throw Error("degeneracy statistics: value " + std::to_string(v) + " outside [0, " +
                        std::to_string(domain) + ")");
}

/// sum_i b_i^2 for `sorted` values in m bins, without allocating the bins.
inline double sum_squared_counts(const std::vector<double>& sorted, std::int64_t m, double domain)
{
    double s = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const std::int64_t b = bin_of(sorted[i], m, domain);
        std::size_t j = i + 1;
        while (j < sorted.size() && bin_of(sorted[j], m, domain) == b)
            ++j;
        const double c = double(j - i);
        s += c * c;
        i = j;
    }
    return s;
}

}  // namespace detail

inline std::vector<long> histogram_counts(const std::vector<double>& values, long m, double domain_length)
{
    detail::check_domain(domain_length);
    if (m < 1)
        throw Error("histogram_counts: need at least one bin");
    detail::check_values(values, domain_length);
    std::vector<long> counts(static_cast<std::size_t>(m), 0);
    for (double v : values)
        ++counts[static_cast<std::size_t>(detail::bin_of(v, m, domain_length))];
    return counts;
}

inline double distance_to_uniform(const std::vector<double>& values, long m, double domain_length)
{
    detail::check_domain(domain_length);
    if (values.empty())
        throw Error("distance_to_uniform: no values");
    if (m < 1)
        throw Error("distance_to_uniform: need at least one bin");
    detail::check_values(values, domain_length);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double count = double(values.size());
    const double s = detail::sum_squared_counts(sorted, m, domain_length);
    return double(m) / domain_length * s / (count * count) - 1.0 / domain_length;
}

struct DegeneracyReport {
    double parameter = 0.0;  // L * count * slope of d(M)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    long m_first = 0;
    long m_last = 0;
    double at_fixed_m = 0.0;  // count * sum (b_i/count)^2 at M = 200 * count
    bool linear = true;       // false when r_squared < 0.99
};

inline constexpr double linear_regime_r2 = 0.99;

/// Default bin-count grid: 16 evenly spaced M over [50, 400] * count.
inline std::vector<long> default_m_grid(long count)
{
    std::vector<long> grid;
    for (int i = 0; i < 16; ++i)
        grid.push_back(count * (50 + (350 * i) / 15));
    return grid;
}

/// Least-squares slope of d(M) over `m_grid`, normalized so that a
/// non-degenerate set yields 1.
inline DegeneracyReport degeneracy_parameter(const std::vector<double>& values, long count, double domain_length,
                                             const std::vector<long>& m_grid)
{
    detail::check_domain(domain_length);
    if (count < 2)
        throw Error("degeneracy_parameter: need at least two values");
    if (static_cast<long>(values.size()) != count)
        throw Error("degeneracy_parameter: count does not match the number of values");
    if (m_grid.size() < 2)
        throw Error("degeneracy_parameter: need at least two bin counts to fit a slope");
    detail::check_values(values, domain_length);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double c = double(count);
    const double L = domain_length;

    auto distance = [&](long m) {
        if (m < 1)
            throw Error("degeneracy_parameter: bin counts must be positive");
        return double(m) / L * detail::sum_squared_counts(sorted, m, L) / (c * c) - 1.0 / L;
    };

    const std::size_t k = m_grid.size();
    std::vector<double> xs(k), ys(k);
    for (std::size_t i = 0; i < k; ++i) {
        xs[i] = double(m_grid[i]);
        ys[i] = distance(m_grid[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(k);
    my /= double(k);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw Error("degeneracy_parameter: bin counts must not all be equal");

    DegeneracyReport rep;
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
    rep.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    rep.parameter = L * c * rep.slope;
    rep.m_first = *std::min_element(m_grid.begin(), m_grid.end());
    rep.m_last = *std::max_element(m_grid.begin(), m_grid.end());
    rep.at_fixed_m = detail::sum_squared_counts(sorted, 200 * count, L) / c;
    rep.linear = rep.r_squared >= linear_regime_r2;
    return rep;
}

inline DegeneracyReport eta_of_values(const std::vector<double>& quasi_energies)
{
    const long n = static_cast<long>(quasi_energies.size());
    return degeneracy_parameter(quasi_energies, n, two_pi, default_m_grid(n));
}

inline DegeneracyReport zeta_of_values(const std::vector<double>& quasi_energies)
{
    const std::vector<double> gaps = all_gaps(quasi_energies);
    const long count = static_cast<long>(gaps.size());
    return degeneracy_parameter(gaps, count, std::numbers::pi, default_m_grid(count));
}

inline DegeneracyReport eta_of_spectrum(const FloquetSpectrum& spectrum)
{
    return eta_of_values(spectrum.quasi_energies);
}

inline DegeneracyReport zeta_of_spectrum(const FloquetSpectrum& spectrum)
{
    return zeta_of_values(spectrum.quasi_energies);
}

/// Mean ratio of consecutive circular level spacings, min(s_k, s_k+1)/max(s_k, s_k+1).
/// Poisson levels give 2 ln 2 - 1 ~ 0.386; a picket fence gives 1.
inline double spacing_ratio(const std::vector<double>& quasi_energies)
{
    const long n = static_cast<long>(quasi_energies.size());
    if (n < 3)
        throw Error("spacing_ratio: need at least three levels");
    std::vector<double> e = quasi_energies;
    std::sort(e.begin(), e.end());
    std::vector<double> s(static_cast<std::size_t>(n));
    for (long k = 0; k + 1 < n; ++k)
        s[std::size_t(k)] = e[std::size_t(k + 1)] - e[std::size_t(k)];
    s[std::size_t(n - 1)] = two_pi - e[std::size_t(n - 1)] + e[0];
    double acc = 0.0;
    for (long k = 0; k < n; ++k) {
        const double a = s[std::size_t(k)];
        const double b = s[std::size_t((k + 1) % n)];
        const double hi = std::max(a, b);
        acc += hi > 0.0 ? std::min(a, b) / hi : 0.0;
    }
    return acc / double(n);
}

inline double spacing_ratio(const FloquetSpectrum& spectrum) { return spacing_ratio(spectrum.quasi_energies); }

}  // namespace qkr
