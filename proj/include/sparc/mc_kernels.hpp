#pragma once

#include <cstddef>

namespace sparc::kernels {

// Sum over j of exp(a*t[j] - a^2) for interferer gaps t[j] = u_j - u_1.
// This is the max-subtraction-stabilized denominator of the posterior ratio
// with the correct column as pivot: arguments are bounded above by t^2/4, so
// no overflow for any a >= 0; underflow to zero is harmless.
double exp_gap_sum(const double* t, size_t m, double a);

// For each of G signal strengths a[g], the posterior mass on the correct
// column: out[g] = 1 / (1 + exp_gap_sum(t, m, a[g])).
void correct_mass(const double* t, size_t m, const double* a, size_t G, double* out);

} // namespace sparc::kernels
