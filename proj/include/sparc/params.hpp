#pragma once

#include <cmath>
#include <cstdint>

#include "sparc/errors.hpp"

namespace sparc {

// Scalar code/channel parameters. L sections of M columns each, block length
// n, rate R in nats per channel use. R is the exact value L*ln(M)/n once n is
// fixed; R_target is what was asked for.
struct CodeParams {
    uint32_t L = 0;
    uint32_t M = 0;
    uint64_t n = 0;
    double P = 0.0;
    double sigma2 = 1.0;
    double R = 0.0;
    double R_target = 0.0;
    bool rate_at_or_above_capacity = false;

    double snr() const { return sigma2 > 0.0 ? P / sigma2 : INFINITY; }
    double capacity() const { return 0.5 * std::log1p(snr()); }
    // Fractional gap from capacity; 1 in the noiseless limit.
    double delta_R() const {
        const double c = capacity();
        return std::isfinite(c) ? (c - R) / c : 1.0;
    }
    uint32_t log2M() const {
        uint32_t b = 0;
        while ((1u << b) < M) ++b;
        return b;
    }
    uint64_t N() const { return (uint64_t)L * M; }

    void validate() const;
};

inline bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Fix n from L*ln(M) = n*R, rounding n up (rate rounds down, which is the
// safe direction). Exact integer solutions are snapped rather than bumped by
// one through floating-point dust.
CodeParams derive_params(uint32_t L, uint32_t M, double R_target_nats, double P, double sigma2);

} // namespace sparc
