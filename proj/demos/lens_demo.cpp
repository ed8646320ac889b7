// Converges the Koenigs function of a lens map, compares it with atanh, and
// checks condition (A) at alpha = 1.
//
//   ./lens_demo 0.5

#include <cstdio>
#include <cstdlib>

#include "koenigs/koenigs.hpp"

int main(int argc, char** argv) {
    using namespace koenigs;
    const double t = argc > 1 ? std::atof(argv[1]) : 0.5;
    try {
        const LensMap lens = lens_map(t);
        const KoenigsApproximation sigma = koenigs_approx(lens.map);
        std::printf("%s: depth %d, Cauchy gap %.3g\n", lens.map.name().c_str(), sigma.depth, sigma.cauchy_gap);

        for (cplx z : {cplx{0.3, 0.0}, cplx{0.0, 0.5}, cplx{-0.4, 0.4}}) {
            const cplx s = koenigs_eval(sigma, z).value;
            std::printf("  sigma(%+.2f%+.2fi) = %+.12f%+.12fi   |sigma - atanh| = %.2e\n", z.real(), z.imag(),
                        s.real(), s.imag(), std::abs(s - std::atanh(z)));
        }

        const ConditionReport a = check_condition_A(lens.map, 1.0, 0);
        std::printf("condition (A), alpha 1, m 0: %s (worst margin %.2e, coverage %.4f)\n", a.label.c_str(),
                    *a.worst_margin, a.coverage);

        const SeminormEstimate b = bloch_seminorm(as_function(sigma), 1.0);
        std::printf("Bloch seminorm of sigma: %.6f (%s)\n", b.value, to_string(b.state));
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
