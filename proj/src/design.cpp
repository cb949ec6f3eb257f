#include "sparc/design.hpp"

#include <cmath>
#include <cstring>

#include "sparc/rng.hpp"

namespace sparc {

namespace {

// In-place unnormalized Walsh-Hadamard butterfly, K a power of two.
void fwht(double* x, uint64_t K) {
    for (uint64_t h = 1; h < K; h <<= 1) {
        for (uint64_t i = 0; i < K; i += h << 1) {
            for (uint64_t j = i; j < i + h; ++j) {
                const double a = x[j], b = x[j + h];
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
    }
}

} // namespace

uint64_t DesignMatrix::storage_bytes() const {
    if (kind == MatrixKind::DenseGaussian) return n * N * sizeof(float);
    return signs_.size() + rows_.size() * sizeof(uint32_t);
}

DesignMatrix sample_design_matrix(const CodeParams& params, MatrixKind kind, uint64_t seed,
                                  uint64_t mem_cap_bytes) {
    params.validate();
    DesignMatrix A;
    A.kind = kind;
    A.n = params.n;
    A.N = params.N();
    A.seed = seed;

    if (kind == MatrixKind::DenseGaussian) {
        const uint64_t bytes = A.n * A.N * sizeof(float);
        require(bytes <= mem_cap_bytes, ErrorCode::Memory,
                "dense design matrix exceeds the memory cap; raise the cap or use the implicit kind");
        A.dense_.resize(A.n * A.N);
        const float scale = (float)(1.0 / std::sqrt((double)A.n));
        for (uint64_t r = 0; r < A.n; ++r) {
            SplitMix64 g(derive_seed(seed, r, "design-row"));
            fill_gaussian(g, A.dense_.data() + r * A.N, A.N, scale);
        }
        return A;
    }

    uint64_t K = 1;
    while (K < A.n || K < A.N) K <<= 1;
    A.K_ = K;
    SplitMix64 gs(derive_seed(seed, 0, "design-signs"));
    A.signs_.resize(A.N);
    for (uint64_t j = 0; j < A.N; ++j) A.signs_[j] = (gs.next() & 1) ? 1 : -1;
    // Partial Fisher-Yates: first n entries of a seeded permutation of [0, K).
    SplitMix64 gp(derive_seed(seed, 0, "design-rows"));
    std::vector<uint32_t> perm(K);
    for (uint64_t i = 0; i < K; ++i) perm[i] = (uint32_t)i;
    A.rows_.resize(A.n);
    for (uint64_t i = 0; i < A.n; ++i) {
        const uint64_t j = i + gp.next() % (K - i);
        std::swap(perm[i], perm[j]);
        A.rows_[i] = perm[i];
    }
    return A;
}

void DesignMatrix::apply(const double* v, double* out) const {
    if (kind == MatrixKind::DenseGaussian) {
        for (uint64_t r = 0; r < n; ++r) {
            const float* row = dense_.data() + r * N;
            double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
            uint64_t j = 0;
            for (; j + 8 <= N; j += 8) {
                s0 += (double)row[j] * v[j];
                s1 += (double)row[j + 1] * v[j + 1];
                s2 += (double)row[j + 2] * v[j + 2];
                s3 += (double)row[j + 3] * v[j + 3];
                s4 += (double)row[j + 4] * v[j + 4];
                s5 += (double)row[j + 5] * v[j + 5];
                s6 += (double)row[j + 6] * v[j + 6];
                s7 += (double)row[j + 7] * v[j + 7];
            }
            double s = ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
            for (; j < N; ++j) s += (double)row[j] * v[j];
            out[r] = s;
        }
        return;
    }
    std::vector<double> buf(K_, 0.0);
    for (uint64_t j = 0; j < N; ++j) buf[j] = signs_[j] * v[j];
    fwht(buf.data(), K_);
    const double scale = 1.0 / std::sqrt((double)n);
    for (uint64_t i = 0; i < n; ++i) out[i] = buf[rows_[i]] * scale;
}

void DesignMatrix::apply_transpose(const double* z, double* out) const {
    if (kind == MatrixKind::DenseGaussian) {
        std::memset(out, 0, N * sizeof(double));
        for (uint64_t r = 0; r < n; ++r) {
            const float* row = dense_.data() + r * N;
            const double zr = z[r];
            for (uint64_t j = 0; j < N; ++j) out[j] += zr * (double)row[j];
        }
        return;
    }
    std::vector<double> buf(K_, 0.0);
    for (uint64_t i = 0; i < n; ++i) buf[rows_[i]] = z[i];
    fwht(buf.data(), K_);
    const double scale = 1.0 / std::sqrt((double)n);
    for (uint64_t j = 0; j < N; ++j) out[j] = buf[j] * signs_[j] * scale;
}

std::vector<double> DesignMatrix::apply(const std::vector<double>& v) const {
    require(v.size() == N, ErrorCode::InvalidArgument, "apply: dimension mismatch");
    std::vector<double> out(n);
    apply(v.data(), out.data());
    return out;
}

std::vector<double> DesignMatrix::apply_transpose(const std::vector<double>& z) const {
    require(z.size() == n, ErrorCode::InvalidArgument, "apply_transpose: dimension mismatch");
    std::vector<double> out(N);
    apply_transpose(z.data(), out.data());
    return out;
}

} // namespace sparc
