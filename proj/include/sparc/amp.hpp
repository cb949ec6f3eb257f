#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparc/codebook.hpp"
#include "sparc/design.hpp"
#include "sparc/params.hpp"
#include "sparc/power.hpp"

namespace sparc {

// Section-wise posterior-mean denoiser: within section l,
//   out_i = sqrt(n P_l) * exp(s_i * sqrt(n P_l)/tau2) / sum_j exp(s_j * sqrt(n P_l)/tau2),
// computed with per-section max subtraction so any finite input is safe.
BetaVector eta(const BetaVector& s, double tau2, const CodeParams& params,
               const PowerAllocation& alloc);

// Decoder state after executing step t: z = z^t, s = s^t = beta^t + A'z^t,
// beta = beta^{t+1} = eta(s^t) with tau2 = tau2_t. t = -1 is the initial
// state (beta = 0, no residual yet).
struct AmpState {
    int32_t t = -1;
    BetaVector beta;
    std::vector<double> z;
    std::vector<double> s;
    double tau2 = 0.0;
    double lambda = 0.0;
};

AmpState initial_amp_state(const CodeParams& params);

// One step: z^t = y - A beta^t + (z^{t-1}/tau2_{t-1}) (P - ||beta^t||^2/n)
// (correction absent at t = 0), then the denoiser with this step's tau2.
AmpState amp_step(const AmpState& st, const DesignMatrix& A, const std::vector<double>& y,
                  double tau2_t, const CodeParams& params, const PowerAllocation& alloc,
                  bool onsager = true);

enum class TauMode { SePrecomputed, Online };

struct DecoderConfig {
    TauMode tau_mode = TauMode::SePrecomputed;
    std::vector<double> tau2_schedule; // tau2_t for t = 0..T-1 (SePrecomputed mode)
    uint32_t T = 0;
    bool onsager = true;               // off only for the regression diagnostic
    int32_t capture_s_stats_at = -1;   // step at which to summarize s^t - beta0
};

struct SStats {
    bool present = false;
    int32_t t = -1;
    double stddev = 0.0;
    double ks = 0.0;     // KS of entries normalized by their sample std
};

struct Diagnostics {
    std::vector<double> mse;         // ||beta^t - beta0||^2 / n, t = 0..T
    std::vector<double> overlap;     // (1/nP) beta0 . beta^t,   t = 0..T
    std::vector<double> lambda;      // per executed step
    std::vector<double> tau2_used;   // per executed step
    std::vector<double> tau2_online; // ||z^t||^2 / n per executed step
    SStats s_stats;
};

struct DecodeResult {
    BetaVector beta;       // beta^T
    Message decoded;
    BetaVector beta_hard;
    Diagnostics diag;
};

DecodeResult run_decoder(const DesignMatrix& A, const std::vector<double>& y,
                         const CodeParams& params, const PowerAllocation& alloc,
                         const DecoderConfig& cfg, const BetaVector* truth = nullptr);

// Per-section argmax, ties to the lowest index.
std::pair<Message, BetaVector> hard_decision(const BetaVector& beta, const CodeParams& params,
                                             const PowerAllocation& alloc);

double section_error_rate(const Message& decoded, const Message& truth);

} // namespace sparc
