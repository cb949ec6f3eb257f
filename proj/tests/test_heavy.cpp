// Long-running cross-checks: an independent Monte Carlo transcription of the
// x(tau) expectation, and end-to-end decoding at high snr.
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "sparc/amp.hpp"
#include "sparc/channel.hpp"
#include "sparc/codebook.hpp"
#include "sparc/design.hpp"
#include "sparc/params.hpp"
#include "sparc/power.hpp"
#include "sparc/rng.hpp"
#include "sparc/state_evolution.hpp"

using namespace sparc;

namespace {

// From-scratch sampler for the power-weighted posterior-mass expectation,
//   x(tau) = sum_l (P_l/P) E[ e^{a_l Z_1 + a_l^2} / (e^{a_l Z_1 + a_l^2}
//                             + sum_{j>=2} e^{a_l Z_j}) ],  a_l = sqrt(n P_l)/tau,
// written directly from that formula with the standard-library RNG: shared
// Z-draws across sections, empirical variance from the per-draw aggregate.
McEstimate x_reference(double tau2, const CodeParams& params, const PowerAllocation& alloc,
                       uint64_t samples, uint64_t seed) {
    const double tau = std::sqrt(tau2);
    std::vector<double> a(params.L);
    for (uint32_t l = 0; l < params.L; ++l)
        a[l] = std::sqrt((double)params.n * alloc.p[l]) / tau;

    std::mt19937_64 g(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(params.M);
    double sum = 0.0, sum2 = 0.0;
    for (uint64_t s = 0; s < samples; ++s) {
        for (auto& v : z) v = gauss(g);
        double y = 0.0;
        for (uint32_t l = 0; l < params.L; ++l) {
            const double num = std::exp(a[l] * z[0] + a[l] * a[l]);
            double den = num;
            for (uint32_t j = 1; j < params.M; ++j) den += std::exp(a[l] * z[j]);
            y += alloc.p[l] / params.P * (num / den);
        }
        sum += y;
        sum2 += y * y;
    }
    const double mean = sum / (double)samples;
    const double var = (sum2 - (double)samples * mean * mean) / (double)(samples - 1);
    return {mean, std::sqrt(var / (double)samples)};
}

} // namespace

TEST_CASE("x(tau) agrees with an independent sampler at two noise levels") {
    const double C = 0.5 * std::log1p(15.0);
    const CodeParams p = derive_params(32, 512, 0.7 * C, 15.0, 1.0);
    const PowerAllocation alloc = exponential_allocation(p);

    for (double tau2 : {p.P + p.sigma2, 4.0}) {
        const McEstimate lib = x_of_tau(tau2, p, alloc, {100000, 11});
        const McEstimate ref = x_reference(tau2, p, alloc, 300000, 20260822);
        const double tol = 3.0 * std::sqrt(lib.std_err * lib.std_err + ref.std_err * ref.std_err);
        CAPTURE(tau2);
        CAPTURE(lib.value);
        CAPTURE(ref.value);
        CHECK(std::abs(lib.value - ref.value) < tol + 2e-4);
    }
}

TEST_CASE("removing the residual correction term degrades the final mse") {
    // Regression guard: the corrected recursion must actually be exercising its
    // correction term, so turning it off should hurt in nearly every trial.
    const double C = 0.5 * std::log1p(11.1);
    const CodeParams p = derive_params(256, 256, 0.8 * C, 11.1, 1.0);
    const PowerAllocation alloc = exponential_allocation(p);
    const SeTrace tr = se_recursion(p, alloc, {100000, 1});

    DecoderConfig on, off;
    on.tau2_schedule.assign(tr.tau2.begin(), tr.tau2.begin() + tr.T);
    on.T = tr.T;
    off = on;
    off.onsager = false;

    const uint64_t master = 77;
    uint32_t degraded = 0;
    for (uint32_t i = 0; i < 10; ++i) {
        const DesignMatrix A = sample_design_matrix(p, MatrixKind::DenseGaussian,
                                                    derive_seed(master, i, "design"));
        SplitMix64 g(derive_seed(master, i, "message"));
        const Message msg = random_message(p, g);
        const BetaVector beta0 = message_to_beta(msg, p, alloc);
        const ChannelDraw ch = transmit(encode(A, beta0), p.sigma2,
                                        derive_seed(master, i, "channel"));
        const double mse_on = run_decoder(A, ch.y, p, alloc, on, &beta0).diag.mse.back();
        const double mse_off = run_decoder(A, ch.y, p, alloc, off, &beta0).diag.mse.back();
        CAPTURE(i);
        CAPTURE(mse_on);
        CAPTURE(mse_off);
        if (mse_off > mse_on) ++degraded;
    }
    CHECK(degraded >= 8);
}

TEST_CASE("high-snr codes decode perfectly in nearly every trial") {
    const double C = 0.5 * std::log1p(100.0);
    const CodeParams p = derive_params(8, 8, 0.15 * C, 100.0, 1.0);
    const PowerAllocation alloc = exponential_allocation(p);

    DecoderConfig cfg;
    cfg.tau_mode = TauMode::Online;
    cfg.T = 12;

    const uint64_t master = 404;
    uint32_t perfect = 0;
    for (uint32_t i = 0; i < 100; ++i) {
        const DesignMatrix A = sample_design_matrix(p, MatrixKind::DenseGaussian,
                                                    derive_seed(master, i, "design"));
        SplitMix64 g(derive_seed(master, i, "message"));
        const Message msg = random_message(p, g);
        const BetaVector beta0 = message_to_beta(msg, p, alloc);
        const ChannelDraw ch = transmit(encode(A, beta0), p.sigma2,
                                        derive_seed(master, i, "channel"));
        const DecodeResult res = run_decoder(A, ch.y, p, alloc, cfg, &beta0);
        if (section_error_rate(res.decoded, msg) == 0.0) ++perfect;
        CHECK(res.diag.tau2_online.back() < 2.0); // settles near sigma2
    }
    CHECK(perfect >= 99);
}
