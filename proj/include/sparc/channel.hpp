#pragma once

#include <cstdint>
#include <vector>

#include "sparc/errors.hpp"

namespace sparc {

struct ChannelDraw {
    std::vector<double> y;
    std::vector<double> w;
    uint64_t seed = 0;
};

// y = x + w, w ~ N(0, sigma2) i.i.d. from the seeded stream.
ChannelDraw transmit(const std::vector<double>& x, double sigma2, uint64_t seed);

} // namespace sparc
