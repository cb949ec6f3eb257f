#include "sparc/channel.hpp"

#include <cmath>

#include "sparc/rng.hpp"

namespace sparc {

ChannelDraw transmit(const std::vector<double>& x, double sigma2, uint64_t seed) {
    require(sigma2 >= 0.0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
            "sigma2 must be non-negative");
    ChannelDraw d;
    d.seed = seed;
    d.w.resize(x.size());
    d.y.resize(x.size());
    if (sigma2 == 0.0) {
        d.y = x;
        return d;
    }
    SplitMix64 g(seed);
    const double s = std::sqrt(sigma2);
    for (size_t i = 0; i < x.size(); ++i) {
        d.w[i] = s * g.gaussian();
        d.y[i] = x[i] + d.w[i];
    }
    return d;
}

} // namespace sparc
