// Built with -ffast-math so the exp loop uses the vectorized libm. Only pure
// arithmetic on finite values lives here; all validation and NaN handling
// stays with the callers.
#include "sparc/mc_kernels.hpp"

#include <cmath>

namespace sparc::kernels {

double exp_gap_sum(const double* t, size_t m, double a) {
    const double a2 = a * a;
    double s = 0.0;
    for (size_t j = 0; j < m; ++j) s += std::exp(a * t[j] - a2);
    return s;
}

void correct_mass(const double* t, size_t m, const double* a, size_t G, double* out) {
    for (size_t g = 0; g < G; ++g) out[g] = 1.0 / (1.0 + exp_gap_sum(t, m, a[g]));
}

} // namespace sparc::kernels
