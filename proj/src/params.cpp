#include "sparc/params.hpp"

#include <cmath>

namespace sparc {

void CodeParams::validate() const {
    require(L >= 1, ErrorCode::InvalidArgument, "L must be >= 1");
    require(M >= 2 && is_pow2(M), ErrorCode::InvalidArgument, "M must be a power of two >= 2");
    require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
    require(P > 0.0 && std::isfinite(P), ErrorCode::InvalidArgument, "P must be positive");
    require(sigma2 >= 0.0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
            "sigma2 must be non-negative");
    require(R > 0.0, ErrorCode::InvalidArgument, "R must be positive");
}

CodeParams derive_params(uint32_t L, uint32_t M, double R_target_nats, double P, double sigma2) {
    require(L >= 1, ErrorCode::InvalidArgument, "L must be >= 1");
    require(M >= 2 && is_pow2(M), ErrorCode::InvalidArgument, "M must be a power of two >= 2");
    require(R_target_nats > 0.0 && std::isfinite(R_target_nats), ErrorCode::InvalidArgument,
            "R_target must be positive");
    require(P > 0.0 && std::isfinite(P), ErrorCode::InvalidArgument, "P must be positive");
    require(sigma2 >= 0.0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
            "sigma2 must be non-negative");

    const double bits = (double)L * std::log((double)M);
    const double n_real = bits / R_target_nats;
    const double snapped = std::nearbyint(n_real);
    uint64_t n;
    if (std::fabs(n_real - snapped) <= 1e-6 * std::max(1.0, n_real))
        n = (uint64_t)snapped;
    else
        n = (uint64_t)std::ceil(n_real);
    if (n == 0) n = 1;

    CodeParams p;
    p.L = L;
    p.M = M;
    p.n = n;
    p.P = P;
    p.sigma2 = sigma2;
    p.R = bits / (double)n;
    p.R_target = R_target_nats;
    p.rate_at_or_above_capacity = p.R >= p.capacity();
    p.validate();
    return p;
}

} // namespace sparc
