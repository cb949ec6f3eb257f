#include "sparc/codebook.hpp"

#include <cmath>

namespace sparc {

void Message::validate(const CodeParams& params) const {
    require(sections.size() == params.L, ErrorCode::InvalidArgument, "message length != L");
    for (uint32_t s : sections)
        require(s < params.M, ErrorCode::InvalidArgument, "section index out of range");
}

Message bits_to_message(const std::vector<uint8_t>& bits, const CodeParams& params) {
    const uint32_t b = params.log2M();
    require(bits.size() == (size_t)params.L * b, ErrorCode::InvalidArgument,
            "bit vector length != L*log2(M)");
    Message m;
    m.sections.resize(params.L);
    for (uint32_t l = 0; l < params.L; ++l) {
        uint32_t v = 0;
        for (uint32_t k = 0; k < b; ++k) {
            const uint8_t bit = bits[(size_t)l * b + k];
            require(bit <= 1, ErrorCode::InvalidArgument, "bits must be 0/1");
            v = (v << 1) | bit;
        }
        m.sections[l] = v;
    }
    return m;
}

std::vector<uint8_t> message_to_bits(const Message& msg, const CodeParams& params) {
    msg.validate(params);
    const uint32_t b = params.log2M();
    std::vector<uint8_t> bits((size_t)params.L * b);
    for (uint32_t l = 0; l < params.L; ++l)
        for (uint32_t k = 0; k < b; ++k)
            bits[(size_t)l * b + k] = (msg.sections[l] >> (b - 1 - k)) & 1u;
    return bits;
}

Message random_message(const CodeParams& params, SplitMix64& g) {
    Message m;
    m.sections.resize(params.L);
    for (uint32_t l = 0; l < params.L; ++l)
        m.sections[l] = (uint32_t)(g.next() & (params.M - 1));
    return m;
}

BetaVector message_to_beta(const Message& msg, const CodeParams& params,
                           const PowerAllocation& alloc) {
    msg.validate(params);
    BetaVector beta(params.N(), 0.0);
    for (uint32_t l = 0; l < params.L; ++l)
        beta[(size_t)l * params.M + msg.sections[l]] = std::sqrt((double)params.n * alloc.p[l]);
    return beta;
}

} // namespace sparc
