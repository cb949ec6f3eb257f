#pragma once

#include <cstdint>
#include <vector>

#include "sparc/codebook.hpp"
#include "sparc/params.hpp"

namespace sparc {

enum class MatrixKind { DenseGaussian, ImplicitFast };

// The n x ML design operator. Dense kind stores i.i.d. N(0,1/n) entries
// (float storage, double accumulation; generation is per-row seeded so the
// same (seed, dims) always reproduces the same matrix bit for bit). Implicit
// kind is a randomly signed, row-sampled Walsh-Hadamard operator with matched
// second moments, exposed only through apply / apply_transpose.
class DesignMatrix {
public:
    static constexpr uint64_t kDefaultMemCapBytes = 4ull << 30;

    MatrixKind kind = MatrixKind::DenseGaussian;
    uint64_t n = 0, N = 0;
    uint64_t seed = 0;

    // y[i] = sum_j A_ij v[j]
    void apply(const double* v, double* out) const;
    // r[j] = sum_i A_ij z[i]
    void apply_transpose(const double* z, double* out) const;

    std::vector<double> apply(const std::vector<double>& v) const;
    std::vector<double> apply_transpose(const std::vector<double>& z) const;

    uint64_t storage_bytes() const;

private:
    friend DesignMatrix sample_design_matrix(const CodeParams&, MatrixKind, uint64_t, uint64_t);

    std::vector<float> dense_;        // row-major n x N

    uint64_t K_ = 0;                  // Hadamard size, power of two >= max(n, N)
    std::vector<int8_t> signs_;       // length N
    std::vector<uint32_t> rows_;      // n selected rows of the K x K transform
};

DesignMatrix sample_design_matrix(const CodeParams& params, MatrixKind kind, uint64_t seed,
                                  uint64_t mem_cap_bytes = DesignMatrix::kDefaultMemCapBytes);

inline std::vector<double> encode(const DesignMatrix& A, const BetaVector& beta) {
    return A.apply(beta);
}

} // namespace sparc
