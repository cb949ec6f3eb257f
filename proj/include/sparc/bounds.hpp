#pragma once

#include <cstdint>
#include <string>

#include "sparc/params.hpp"

namespace sparc {

// Universal constants of the finite-length bound. The bound's absolute value
// is only meaningful up to these; the functional form and monotonicities are
// the claims the calculator stands behind.
struct BoundConstants {
    double c_small = 1.0;
    double C_big = 1.0;

    // K_T = C^{2T} (T!)^{11},  kappa_T = [c^{2T} (T!)^{17}]^{-1}.
    double log_K_T(uint32_t T) const;
    double log_kappa_T(uint32_t T) const;
    double K_T(uint32_t T) const;
    double kappa_T(uint32_t T) const;
};

struct Theorem1Result {
    double bound = 0.0;      // may exceed 1 (vacuous but correct)
    double log_bound = 0.0;  // natural log, finite
    bool vacuous = false;    // bound > 1
    double K_T = 0.0;
    double kappa_T = 0.0;
    double log_K_T = 0.0;
    double log_kappa_T = 0.0;
};

// P(error rate > epsilon) <= K_T exp{-kappa_T L/(log M)^{2T-1} (eps sigma2 C/2 - P f_R)^2}.
// Requires epsilon > (2 snr / C) * f_R_value; below that the bound does not apply.
Theorem1Result theorem1_bound(const CodeParams& params, uint32_t T, double f_R_value,
                              double epsilon, const BoundConstants& constants = {});

// How the error exponent scales with n under the two size regimes.
enum class ScalingRegime {
    MEqualsLPowA,       // M = L^a: exponent order n/(log n)^{2T}
    LEqualsKnOverLogLog // L = k n/log log n: exponent order n/(log log n)^{2T}
};

struct ExponentScale {
    double L = 0.0;               // real-valued size implied by L log M = n R
    double M = 0.0;
    double exponent_factor = 0.0; // L/(log M)^{2T-1}
    std::string L_of_n;
    std::string M_of_n;
    std::string exponent_order;
};

// regime_param is the exponent a for MEqualsLPowA and the factor k for
// LEqualsKnOverLogLog. R is in nats. Requires n >= 16.
ExponentScale exponent_scale(uint64_t n, ScalingRegime regime, double regime_param, double R,
                             uint32_t T);

struct CapacityGapReport {
    double delta_R_min = 0.0; // smallest admissible relative gap from capacity
    double f_R_at_min = 0.0;  // sqrt(kappa2)/(log M sqrt(log log M))
    double T_upper = 0.0;     // 2 snr / delta_R_min
};

// Requires M > e^e so that log log M > 1's denominator stays positive.
CapacityGapReport capacity_gap_report(double M, double kappa2, const CodeParams& params);

} // namespace sparc
