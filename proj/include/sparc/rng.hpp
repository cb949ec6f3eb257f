#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace sparc {

// SplitMix64: the counter-based 64-bit generator used for every random draw
// in this project. State advances by a fixed odd constant, so a stream is a
// pure function of its seed, and tagged sub-streams can be derived without
// coordination (see derive_seed below).
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return (double)(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform01_pos() { return ((double)(next() >> 11) + 1.0) * 0x1.0p-53; }

    double gaussian();

private:
    uint64_t state_;
};

// Seed-derivation rule, documented here once and used everywhere:
//   h = fnv1a64(tag)
//   s = mix64(master ^ h)
//   return mix64(s + index * 0x9E3779B97F4A7C15)
// where mix64 is the SplitMix64 output finalizer. Distinct (index, tag)
// pairs give statistically independent streams from one master seed, and the
// mapping is stable across runs, platforms, and thread counts.
uint64_t mix64(uint64_t z);
uint64_t fnv1a64(std::string_view tag);
uint64_t derive_seed(uint64_t master, uint64_t index, std::string_view tag);

// Bulk fills (ziggurat-based standard normals, optional scale factor).
void fill_gaussian(SplitMix64& g, double* out, size_t count);
void fill_gaussian(SplitMix64& g, float* out, size_t count, float scale);

} // namespace sparc
