// Quantum and classical Poincare sections side by side as ASCII shades.
//
//   demo_quantum_poincare [ell] [K] [kicks]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "qkr/experiments.hpp"

namespace {

void draw(const qkr::CellDistribution& a, const qkr::CellDistribution& b)
{
    static const std::string shades = " .:-=+*#%@";
    double top = 0.0;
    for (double p : a.values())
        top = std::max(top, p);
    for (double p : b.values())
        top = std::max(top, p);
    for (long row = a.ell() - 1; row >= 0; --row) {
        std::string line;
        for (const auto* d : {&a, &b}) {
            for (int x = 0; x < d->ell(); ++x) {
                const double f = top > 0 ? d->at(x, row) / top : 0.0;
                line += shades[std::size_t(std::min(9.0, std::floor(f * 9.999)))];
            }
            line += "   ";
        }
        std::puts(line.c_str());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    const long ell = argc > 1 ? std::atol(argv[1]) : 20;
    const double kick = argc > 2 ? std::atof(argv[2]) : 5.0;
    const long kicks = argc > 3 ? std::atol(argv[3]) : 5;
    try {
        const auto r = qkr::compute_poincare(ell, kick, kicks, 20, 400000, 1);
        std::printf("ell = %ld, K = %g, %ld kicks   (left: quantum, right: classical)\n\n", ell, kick, kicks);
        draw(r.quantum, r.classical);
        std::printf("\ntotal variation %.4f   entropy quantum %.4f   classical %.4f   max %.4f\n", r.total_variation,
                    r.entropy_quantum, r.entropy_classical, std::log(double(ell * ell)));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
