#include "sparc/rng.hpp"

#include <cmath>

namespace sparc {

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t fnv1a64(std::string_view tag) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

uint64_t derive_seed(uint64_t master, uint64_t index, std::string_view tag) {
    uint64_t s = mix64(master ^ fnv1a64(tag));
    return mix64(s + index * 0x9E3779B97F4A7C15ull);
}

namespace {

// 128-layer ziggurat for the standard normal. Layer 0 is the base strip whose
// virtual width x0 = v / f(r) encodes the tail mass beyond r; layers shrink
// toward the mode. Rejection happens on the wedge between consecutive layer
// widths, and the tail is sampled by the standard exponential-accept method.
struct ZigTables {
    double x[129];
    double f[129];
    ZigTables() {
        const double r = 3.442619855899;
        const double v = 9.91256303526217e-3;
        auto pdf = [](double t) { return std::exp(-0.5 * t * t); };
        x[1] = r;
        f[1] = pdf(r);
        x[0] = v / f[1];
        f[0] = 1.0;
        for (int i = 2; i <= 127; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(v / x[i - 1] + pdf(x[i - 1])));
            f[i] = pdf(x[i]);
        }
        x[128] = 0.0;
        f[128] = 1.0;
    }
};

const ZigTables zt;

} // namespace

double SplitMix64::gaussian() {
    for (;;) {
        const uint64_t u = next();
        const int i = (int)(u & 127);
        const int64_t j = (int64_t)(u >> 11) - (int64_t)(1ull << 52);
        const double x = (double)j * 0x1.0p-52 * zt.x[i];
        if (std::fabs(x) < zt.x[i + 1]) return x;
        if (i == 0) {
            if (std::fabs(x) < zt.x[1]) return x;
            double xt, yt;
            do {
                xt = -std::log(uniform01_pos()) / zt.x[1];
                yt = -std::log(uniform01_pos());
            } while (yt + yt < xt * xt);
            return j < 0 ? -(zt.x[1] + xt) : zt.x[1] + xt;
        }
        const double u2 = uniform01();
        if (zt.f[i] + u2 * (zt.f[i + 1] - zt.f[i]) < std::exp(-0.5 * x * x)) return x;
    }
}

void fill_gaussian(SplitMix64& g, double* out, size_t count) {
    for (size_t k = 0; k < count; ++k) out[k] = g.gaussian();
}

void fill_gaussian(SplitMix64& g, float* out, size_t count, float scale) {
    for (size_t k = 0; k < count; ++k) out[k] = (float)g.gaussian() * scale;
}

} // namespace sparc
