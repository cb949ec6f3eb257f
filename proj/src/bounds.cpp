#include "sparc/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sparc/errors.hpp"
#include "sparc/state_evolution.hpp"

namespace sparc {

double BoundConstants::log_K_T(uint32_t T) const {
    return 2.0 * T * std::log(C_big) + 11.0 * std::lgamma((double)T + 1.0);
}

double BoundConstants::log_kappa_T(uint32_t T) const {
    return -(2.0 * T * std::log(c_small) + 17.0 * std::lgamma((double)T + 1.0));
}

double BoundConstants::K_T(uint32_t T) const { return std::exp(log_K_T(T)); }

double BoundConstants::kappa_T(uint32_t T) const { return std::exp(log_kappa_T(T)); }

Theorem1Result theorem1_bound(const CodeParams& params, uint32_t T, double f_R_value,
                              double epsilon, const BoundConstants& constants) {
    params.validate();
    require(params.sigma2 > 0.0, ErrorCode::Precondition,
            "theorem1_bound: requires positive noise variance");
    require(T >= 1, ErrorCode::InvalidArgument, "theorem1_bound: T must be >= 1");
    require(f_R_value >= 0.0, ErrorCode::InvalidArgument, "theorem1_bound: f_R must be >= 0");
    require(constants.c_small > 0.0 && constants.C_big > 0.0, ErrorCode::InvalidArgument,
            "theorem1_bound: constants must be positive");
    const double C = params.capacity();
    const double threshold = 2.0 * params.snr() / C * f_R_value;
    require(epsilon > threshold, ErrorCode::Precondition,
            "theorem1_bound: epsilon must exceed (2 snr / C) * f_R");

    Theorem1Result out;
    out.log_K_T = constants.log_K_T(T);
    out.log_kappa_T = constants.log_kappa_T(T);
    out.K_T = std::exp(out.log_K_T);
    out.kappa_T = std::exp(out.log_kappa_T);

    const double arg = epsilon * params.sigma2 * C / 2.0 - params.P * f_R_value;
    const double logM = std::log((double)params.M);
    // Exponent magnitude in the log domain so extreme T cannot underflow it.
    const double log_mag = out.log_kappa_T + std::log((double)params.L) -
                           (2.0 * T - 1.0) * std::log(logM) + 2.0 * std::log(arg);
    const double magnitude = std::exp(std::min(log_mag, 700.0));
    out.log_bound = out.log_K_T - magnitude;
    out.bound = std::exp(out.log_bound);
    out.vacuous = out.log_bound > 0.0;
    return out;
}

namespace {

// Smallest L > 1 with a * L * log L = c, by bisection (left side is
// increasing there).
double solve_L_log_L(double a, double c) {
    double lo = 1.0 + 1e-12;
    double hi = std::max(4.0, 2.0 * c / a);
    while (a * hi * std::log(hi) < c) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (a * mid * std::log(mid) < c)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ExponentScale exponent_scale(uint64_t n, ScalingRegime regime, double regime_param, double R,
                             uint32_t T) {
    require(n >= 16, ErrorCode::InvalidArgument, "exponent_scale: n must be >= 16");
    require(R > 0.0, ErrorCode::InvalidArgument, "exponent_scale: R must be positive");
    require(regime_param > 0.0, ErrorCode::InvalidArgument,
            "exponent_scale: regime parameter must be positive");
    require(T >= 1, ErrorCode::InvalidArgument, "exponent_scale: T must be >= 1");

    ExponentScale out;
    const double nR = (double)n * R;
    const std::string p2T = std::to_string(2 * T);
    if (regime == ScalingRegime::MEqualsLPowA) {
        // L log M = n R with M = L^a  =>  a L log L = n R.
        out.L = solve_L_log_L(regime_param, nR);
        out.M = std::pow(out.L, regime_param);
        out.L_of_n = "Theta(n/log n)";
        out.M_of_n = "Theta((n/log n)^a)";
        out.exponent_order = "n/(log n)^" + p2T;
    } else {
        const double loglogn = std::log(std::log((double)n));
        out.L = regime_param * (double)n / loglogn;
        out.M = std::exp(nR / out.L);
        out.L_of_n = "Theta(n/log log n)";
        out.M_of_n = "Theta((log n)^(R/k))";
        out.exponent_order = "n/(log log n)^" + p2T;
    }
    out.exponent_factor = out.L / std::pow(std::log(out.M), 2.0 * T - 1.0);
    return out;
}

CapacityGapReport capacity_gap_report(double M, double kappa2, const CodeParams& params) {
    require(M > std::exp(std::exp(1.0)), ErrorCode::InvalidArgument,
            "capacity_gap_report: M must exceed e^e");
    require(kappa2 > 0.0, ErrorCode::InvalidArgument,
            "capacity_gap_report: kappa2 must be positive");
    require(params.sigma2 > 0.0 && params.P > 0.0, ErrorCode::InvalidArgument,
            "capacity_gap_report: requires positive P and sigma2");
    CapacityGapReport out;
    out.delta_R_min = delta_R_min(M, kappa2);
    const double logM = std::log(M);
    out.f_R_at_min = std::sqrt(kappa2) / (logM * std::sqrt(std::log(logM)));
    out.T_upper = 2.0 * params.snr() / out.delta_R_min;
    return out;
}

} // namespace sparc
