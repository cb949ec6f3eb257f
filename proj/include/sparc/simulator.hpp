#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparc/amp.hpp"
#include "sparc/design.hpp"
#include "sparc/params.hpp"
#include "sparc/power.hpp"
#include "sparc/state_evolution.hpp"

namespace sparc {

// Everything one trial needs: code, power, decoder schedule, seeding, and the
// design-matrix policy.
struct SimConfig {
    CodeParams params;
    PowerAllocation alloc;
    std::vector<double> tau2_schedule; // tau2_0..tau2_{T-1} drive the decoder
    uint32_t T = 0;
    uint64_t master_seed = 1;
    MatrixKind kind = MatrixKind::DenseGaussian;
    bool fresh_matrix = true;          // new A per trial: the analyzed measure
    bool onsager = true;
    TauMode tau_mode = TauMode::SePrecomputed;
    int32_t capture_s_stats_at = -1;
    std::vector<double> epsilons;      // deviation thresholds for aggregation
    uint64_t mem_cap_bytes = DesignMatrix::kDefaultMemCapBytes;
};

struct TrialResult {
    uint32_t trial_index = 0;
    uint64_t seed = 0;                  // derived trial seed
    double ser = 1.0;
    bool decoded_ok = false;            // ser == 0
    std::vector<double> mse_trajectory; // ||beta^t - beta_0||^2/n, t = 0..T
    std::vector<double> overlap;        // beta_0 . beta^t/(nP),    t = 0..T
    std::vector<double> tau_online;     // ||z^t||^2/n per executed step
    SStats s_stats;
    bool failed = false;
    std::string error;
};

struct Aggregate {
    uint64_t num_trials = 0; // attempted
    uint64_t num_failed = 0;
    double mean_ser = 0.0;   // over successful trials
    double std_err_ser = 0.0;
    std::vector<double> epsilons;
    std::vector<double> deviation_fraction; // empirical P(ser > eps)
};

struct BatchResult {
    std::vector<TrialResult> trials;
    Aggregate agg;
};

// One encode -> transmit -> decode -> score pass. All randomness derives from
// (master_seed, trial_index, component tag), so a trial is a pure function of
// the config and its index. Decoder failures are thrown with the trial index
// attached; run_batch records them instead.
TrialResult run_trial(const SimConfig& cfg, uint32_t trial_index);

// Trials are assigned round-robin to worker threads and aggregated in index
// order, so results do not depend on the parallelism level.
BatchResult run_batch(const SimConfig& cfg, uint32_t num_trials, uint32_t parallelism);

// Base experiment for an M sweep; n is re-derived per grid point.
struct SweepConfig {
    uint32_t L = 0;
    double P = 0.0;
    double sigma2 = 0.0;
    double R_target = 0.0; // nats
    uint64_t master_seed = 1;
    MatrixKind kind = MatrixKind::DenseGaussian;
    bool fresh_matrix = true;
    McConfig mc; // state evolution sampling
    SeOptions se_opts;
    std::vector<double> epsilons;
    uint64_t mem_cap_bytes = DesignMatrix::kDefaultMemCapBytes;
};

struct SweepPoint {
    uint32_t M = 0;
    uint64_t n = 0;
    uint32_t T = 0;
    uint32_t num_trials = 0;
    uint64_t num_failed = 0;
    double mean_ser = 0.0;
    double std_err_ser = 0.0;
    double se_predicted_ser = 0.0;
    double se_predicted_std_err = 0.0;
};

struct SweepResult {
    std::vector<uint32_t> grid; // strictly increasing powers of two
    std::vector<SweepPoint> points;
};

// For each M: derive n from L log M = n R, rerun state evolution, run the
// batch, and attach the predicted error rate for the dashed-line comparison.
SweepResult sweep_M(const SweepConfig& base, const std::vector<uint32_t>& M_grid,
                    uint32_t num_trials, uint32_t parallelism);

} // namespace sparc
