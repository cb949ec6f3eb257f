#include "sparc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sparc/channel.hpp"
#include "sparc/codebook.hpp"
#include "sparc/rng.hpp"
#include "sparc/stats.hpp"

namespace sparc {

namespace {

void validate_sim_config(const SimConfig& cfg) {
    cfg.params.validate();
    cfg.alloc.validate(cfg.params);
    require(cfg.T >= 1, ErrorCode::InvalidArgument, "sim: decoder needs at least one step");
    require(cfg.tau_mode == TauMode::Online || cfg.tau2_schedule.size() >= cfg.T,
            ErrorCode::InvalidArgument, "sim: tau2 schedule shorter than T");
}

// The shared matrix is only used in pinned mode; fresh mode samples per trial.
TrialResult run_trial_with(const SimConfig& cfg, uint32_t trial_index,
                           const DesignMatrix* pinned) {
    const uint64_t trial_seed = derive_seed(cfg.master_seed, trial_index, "trial");
    TrialResult out;
    out.trial_index = trial_index;
    out.seed = trial_seed;

    DesignMatrix fresh;
    const DesignMatrix* A = pinned;
    if (!A) {
        fresh = sample_design_matrix(cfg.params, cfg.kind,
                                     derive_seed(trial_seed, 0, "design"), cfg.mem_cap_bytes);
        A = &fresh;
    }

    SplitMix64 msg_gen(derive_seed(trial_seed, 0, "message"));
    const Message msg = random_message(cfg.params, msg_gen);
    const BetaVector beta0 = message_to_beta(msg, cfg.params, cfg.alloc);
    const std::vector<double> x = A->apply(beta0);
    const ChannelDraw ch = transmit(x, cfg.params.sigma2, derive_seed(trial_seed, 0, "channel"));

    DecoderConfig dc;
    dc.tau_mode = cfg.tau_mode;
    dc.tau2_schedule = cfg.tau2_schedule;
    dc.T = cfg.T;
    dc.onsager = cfg.onsager;
    dc.capture_s_stats_at = cfg.capture_s_stats_at;
    const DecodeResult res = run_decoder(*A, ch.y, cfg.params, cfg.alloc, dc, &beta0);

    out.ser = section_error_rate(res.decoded, msg);
    out.decoded_ok = out.ser == 0.0;
    out.mse_trajectory = res.diag.mse;
    out.overlap = res.diag.overlap;
    out.tau_online = res.diag.tau2_online;
    out.s_stats = res.diag.s_stats;
    return out;
}

TrialResult run_trial_noexcept(const SimConfig& cfg, uint32_t trial_index,
                               const DesignMatrix* pinned) {
    try {
        return run_trial_with(cfg, trial_index, pinned);
    } catch (const std::exception& e) {
        TrialResult out;
        out.trial_index = trial_index;
        out.seed = derive_seed(cfg.master_seed, trial_index, "trial");
        out.failed = true;
        out.error = e.what();
        return out;
    }
}

} // namespace

TrialResult run_trial(const SimConfig& cfg, uint32_t trial_index) {
    validate_sim_config(cfg);
    DesignMatrix pinned;
    const DesignMatrix* shared = nullptr;
    if (!cfg.fresh_matrix) {
        pinned = sample_design_matrix(cfg.params, cfg.kind,
                                      derive_seed(cfg.master_seed, 0, "design"),
                                      cfg.mem_cap_bytes);
        shared = &pinned;
    }
    try {
        return run_trial_with(cfg, trial_index, shared);
    } catch (const Error& e) {
        throw Error(e.code, "trial " + std::to_string(trial_index) + ": " + std::string(e.what()));
    }
}

BatchResult run_batch(const SimConfig& cfg, uint32_t num_trials, uint32_t parallelism) {
    validate_sim_config(cfg);
    require(num_trials >= 1, ErrorCode::InvalidArgument, "run_batch: num_trials must be >= 1");
    require(parallelism >= 1, ErrorCode::InvalidArgument, "run_batch: parallelism must be >= 1");

    DesignMatrix pinned;
    const DesignMatrix* shared = nullptr;
    if (!cfg.fresh_matrix) {
        pinned = sample_design_matrix(cfg.params, cfg.kind,
                                      derive_seed(cfg.master_seed, 0, "design"),
                                      cfg.mem_cap_bytes);
        shared = &pinned;
    }

    BatchResult out;
    out.trials.resize(num_trials);
    uint32_t workers = std::min(parallelism, num_trials);
    if (cfg.fresh_matrix && cfg.kind == MatrixKind::DenseGaussian) {
        // Each worker holds a private matrix; keep their sum under the cap.
        const uint64_t bytes = (uint64_t)cfg.params.n * cfg.params.N() * sizeof(float);
        const uint64_t fit = std::max<uint64_t>(1, cfg.mem_cap_bytes / std::max<uint64_t>(1, bytes));
        workers = (uint32_t)std::min<uint64_t>(workers, fit);
    }

    auto work = [&](uint32_t w) {
        for (uint32_t i = w; i < num_trials; i += workers)
            out.trials[i] = run_trial_noexcept(cfg, i, shared);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (uint32_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    std::vector<double> sers;
    sers.reserve(num_trials);
    out.agg.num_trials = num_trials;
    for (const TrialResult& tr : out.trials) {
        if (tr.failed)
            ++out.agg.num_failed;
        else
            sers.push_back(tr.ser);
    }
    if (!sers.empty()) {
        out.agg.mean_ser = mean_of(sers);
        out.agg.std_err_ser =
            sers.size() > 1 ? sample_std(sers) / std::sqrt((double)sers.size()) : 0.0;
    }
    out.agg.epsilons = cfg.epsilons;
    for (double eps : cfg.epsilons) {
        uint64_t over = 0;
        for (double s : sers)
            if (s > eps) ++over;
        out.agg.deviation_fraction.push_back(sers.empty() ? 0.0 : (double)over / sers.size());
    }
    return out;
}

SweepResult sweep_M(const SweepConfig& base, const std::vector<uint32_t>& M_grid,
                    uint32_t num_trials, uint32_t parallelism) {
    require(!M_grid.empty(), ErrorCode::InvalidArgument, "sweep_M: empty grid");
    require(base.L >= 1 && base.P > 0.0 && base.R_target > 0.0, ErrorCode::InvalidArgument,
            "sweep_M: invalid base config");
    for (size_t i = 0; i < M_grid.size(); ++i) {
        require(is_pow2(M_grid[i]) && M_grid[i] >= 2, ErrorCode::InvalidArgument,
                "sweep_M: every M must be a power of two >= 2");
        require(i == 0 || M_grid[i] > M_grid[i - 1], ErrorCode::InvalidArgument,
                "sweep_M: grid must be strictly increasing");
    }

    SweepResult out;
    out.grid = M_grid;
    for (uint32_t M : M_grid) {
        const CodeParams params = derive_params(base.L, M, base.R_target, base.P, base.sigma2);
        const PowerAllocation alloc =
            base.sigma2 > 0.0 ? exponential_allocation(params) : flat_allocation(params);
        const SeTrace trace = se_recursion(params, alloc, base.mc, base.se_opts);
        const McEstimate pred = se_predicted_ser(trace, params, alloc, base.mc);

        SimConfig sc;
        sc.params = params;
        sc.alloc = alloc;
        sc.tau2_schedule = trace.tau2;
        sc.T = trace.T;
        sc.master_seed = derive_seed(base.master_seed, M, "sweep-m");
        sc.kind = base.kind;
        sc.fresh_matrix = base.fresh_matrix;
        sc.epsilons = base.epsilons;
        sc.mem_cap_bytes = base.mem_cap_bytes;
        const BatchResult batch = run_batch(sc, num_trials, parallelism);

        SweepPoint pt;
        pt.M = M;
        pt.n = params.n;
        pt.T = trace.T;
        pt.num_trials = num_trials;
        pt.num_failed = batch.agg.num_failed;
        pt.mean_ser = batch.agg.mean_ser;
        pt.std_err_ser = batch.agg.std_err_ser;
        pt.se_predicted_ser = pred.value;
        pt.se_predicted_std_err = pred.std_err;
        out.points.push_back(pt);
    }
    return out;
}

} // namespace sparc
