#include "sparc/power.hpp"

#include <cmath>

namespace sparc {

void PowerAllocation::validate(const CodeParams& params) const {
    require(p.size() == params.L, ErrorCode::InvalidArgument, "allocation length != L");
    double sum = 0.0;
    for (size_t l = 0; l < p.size(); ++l) {
        require(p[l] > 0.0 && std::isfinite(p[l]), ErrorCode::InvalidArgument,
                "allocation entries must be positive");
        if (l > 0)
            require(p[l] <= p[l - 1] * (1.0 + 1e-12), ErrorCode::InvalidArgument,
                    "allocation must be non-increasing");
        sum += p[l];
    }
    require(std::fabs(sum - params.P) <= 1e-10 * params.P, ErrorCode::InvalidArgument,
            "allocation does not sum to P");
}

PowerAllocation exponential_allocation(const CodeParams& params) {
    params.validate();
    require(params.sigma2 > 0.0, ErrorCode::Precondition,
            "exponential allocation needs finite capacity (sigma2 > 0)");
    const double C = params.capacity();
    const double L = (double)params.L;
    // Closed-form normalization; no numeric renormalization pass.
    const double scale = params.P * std::expm1(2.0 * C / L) / (-std::expm1(-2.0 * C));
    PowerAllocation a;
    a.p.resize(params.L);
    for (uint32_t l = 1; l <= params.L; ++l) {
        a.p[l - 1] = scale * std::exp(-2.0 * C * (double)l / L);
        a.total += a.p[l - 1];
    }
    a.validate(params);
    return a;
}

PowerAllocation flat_allocation(const CodeParams& params) {
    params.validate();
    PowerAllocation a;
    a.p.assign(params.L, params.P / (double)params.L);
    a.total = params.P;
    a.validate(params);
    return a;
}

std::vector<double> nu_coefficients(const CodeParams& params, const PowerAllocation& alloc,
                                    double tau2) {
    require(tau2 > 0.0 && std::isfinite(tau2), ErrorCode::InvalidArgument, "tau2 must be positive");
    std::vector<double> nu(alloc.p.size());
    const double c = (double)params.L / (params.R * tau2);
    for (size_t l = 0; l < nu.size(); ++l) nu[l] = c * alloc.p[l];
    return nu;
}

} // namespace sparc
