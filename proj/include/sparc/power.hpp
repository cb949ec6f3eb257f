#pragma once

#include <vector>

#include "sparc/params.hpp"

namespace sparc {

// Per-section power allocation: positive, non-increasing, sums to P.
struct PowerAllocation {
    std::vector<double> p;
    double total = 0.0;

    void validate(const CodeParams& params) const;
};

// P_l = P * (e^{2C/L}-1)/(1-e^{-2C}) * e^{-2Cl/L}: geometric decay tuned so
// section l is decodable once the effective noise has shrunk to its share.
// Requires finite capacity (sigma2 > 0).
PowerAllocation exponential_allocation(const CodeParams& params);

// P_l = P/L. The degenerate choice for the noiseless channel, where the
// exponential form would put all power in the first section.
PowerAllocation flat_allocation(const CodeParams& params);

// nu_l = L*P_l / (R*tau2), the per-section signal strength entering the state
// evolution bounds.
std::vector<double> nu_coefficients(const CodeParams& params, const PowerAllocation& alloc,
                                    double tau2);

} // namespace sparc
