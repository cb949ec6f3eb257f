#pragma once

#include <cstdint>
#include <vector>

#include "sparc/params.hpp"
#include "sparc/power.hpp"
#include "sparc/rng.hpp"

namespace sparc {

// One selected column per section.
struct Message {
    std::vector<uint32_t> sections;

    void validate(const CodeParams& params) const;
    bool operator==(const Message&) const = default;
};

// Dense length-ML coefficient vector: one non-zero per section, value
// sqrt(n*P_l).
using BetaVector = std::vector<double>;

// Bit mapping convention: section l takes the l-th consecutive log2(M)-bit
// group, big-endian (first bit of the group is the most significant).
Message bits_to_message(const std::vector<uint8_t>& bits, const CodeParams& params);
std::vector<uint8_t> message_to_bits(const Message& msg, const CodeParams& params);

Message random_message(const CodeParams& params, SplitMix64& g);

BetaVector message_to_beta(const Message& msg, const CodeParams& params,
                           const PowerAllocation& alloc);

} // namespace sparc
