#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkr {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Every recoverable failure in the library is reported with this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Kicked-rotor parameters on a square grid of Planck cells.
///
/// The grid has `ell` cells per axis, the Hilbert space on one momentum
/// period has N = ell^2 states and the effective Planck constant is 2*pi/N.
/// Odd `ell` is accepted for the phase-space construction; operations that
/// need momentum periodicity of the Floquet operator call require_even().
class RotorConfig {
public:
    RotorConfig(int ell, double kick_strength) : ell_(ell), kick_(kick_strength)
    {
        if (ell < 1)
            throw Error("RotorConfig: ell must be a positive integer, got " + std::to_string(ell));
        if (ell > 46340)
            throw Error("RotorConfig: ell too large for a 32-bit state count");
        if (!(kick_strength >= 0.0) || !std::isfinite(kick_strength))
            throw Error("RotorConfig: kick strength must be finite and non-negative");
    }

    int ell() const { return ell_; }
    long dim() const { return static_cast<long>(ell_) * ell_; }
    double hbar() const { return two_pi / static_cast<double>(dim()); }
    double kick() const { return kick_; }
    double cell_angle() const { return two_pi / ell_; }
    bool even() const { return ell_ % 2 == 0; }

    void require_even(const char* what) const
    {
        if (!even())
            throw Error(std::string(what) + ": momentum periodicity needs even N = ell^2, got ell = " +
                        std::to_string(ell_));
    }

    /// Phase n^2 hbar / 2 of the free rotation, reduced exactly modulo 2*pi.
    ///
    /// With hbar = 2*pi/N the phase is pi * n^2 / N, so n^2 is reduced modulo 2N
    /// in integer arithmetic before converting to floating point.
    double free_phase(long n) const
    {
        const long long two_n = 2LL * dim();
        long long r = static_cast<long long>(n % two_n);
        if (r < 0)
            r += two_n;
        const auto sq = static_cast<long long>((static_cast<__int128>(r) * r) % two_n);
        return std::numbers::pi * static_cast<double>(sq) / static_cast<double>(dim());
    }

private:
    int ell_;
    double kick_;
};

/// Free-rotation phase n^2 hbar / 2 reduced into [0, 2*pi) for arbitrary hbar.
inline double free_phase(long n, double hbar)
{
    const long double v = static_cast<long double>(n) * static_cast<long double>(n) *
                          static_cast<long double>(hbar) / 2.0L;
    long double r = std::fmod(v, 2.0L * std::numbers::pi_v<long double>);
    if (r < 0)
        r += 2.0L * std::numbers::pi_v<long double>;
    return static_cast<double>(r);
}

/// Floor division and modulo for possibly negative integers.
inline long floor_div(long a, long b)
{
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

inline long floor_mod(long a, long b) { return a - floor_div(a, b) * b; }

}  // namespace qkr
