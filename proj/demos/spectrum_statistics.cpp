// eta, zeta and the spacing ratio of the periodic Floquet spectrum for a few kick strengths.
//
//   demo_spectrum_statistics [ell]

#include <cstdio>
#include <cstdlib>

#include "qkr/experiments.hpp"

int main(int argc, char** argv)
{
    const long ell = argc > 1 ? std::atol(argv[1]) : 16;
    std::printf("%6s %10s %10s %10s\n", "K", "eta", "zeta", "<r>");
    for (double k : {0.2, 0.5, 0.8, 1.0, 1.2, 2.0, 5.0}) {
        const auto row = qkr::compute_degeneracy(ell, k);
        if (!row.error.empty()) {
            std::fprintf(stderr, "K = %g: %s\n", k, row.error.c_str());
            return 1;
        }
        std::printf("%6.2f %10.4f %10.4f %10.4f\n", k, row.eta, row.zeta, row.spacing_ratio);
    }
    std::printf("\nPoisson <r> = %.4f\n", 2.0 * std::log(2.0) - 1.0);
    return 0;
}
