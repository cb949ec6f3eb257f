#include "sparc.h"

#include <cstring>
#include <string>

#include "sparc/bounds.hpp"
#include "sparc/errors.hpp"
#include "sparc/power.hpp"
#include "sparc/simulator.hpp"
#include "sparc/state_evolution.hpp"
#include "sparc/version.hpp"

struct sparc_code {
    sparc::CodeParams params;
    sparc::PowerAllocation alloc;
};

struct sparc_se_trace {
    sparc::SeTrace trace;
};

struct sparc_sim_result {
    sparc::BatchResult batch;
};

struct sparc_sweep_result {
    sparc::SweepResult sweep;
};

namespace {

thread_local std::string g_last_error;

sparc_status to_status(sparc::ErrorCode c) {
    switch (c) {
        case sparc::ErrorCode::InvalidArgument: return SPARC_ERR_INVALID_ARGUMENT;
        case sparc::ErrorCode::Precondition: return SPARC_ERR_PRECONDITION;
        case sparc::ErrorCode::NonConvergence: return SPARC_ERR_NONCONVERGENCE;
        case sparc::ErrorCode::Memory: return SPARC_ERR_MEMORY;
        case sparc::ErrorCode::Numeric: return SPARC_ERR_NUMERIC;
        case sparc::ErrorCode::Internal: return SPARC_ERR_INTERNAL;
    }
    return SPARC_ERR_INTERNAL;
}

template <typename Fn>
sparc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SPARC_OK;
    } catch (const sparc::Error& e) {
        g_last_error = e.what();
        return to_status(e.code);
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SPARC_ERR_MEMORY;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SPARC_ERR_INTERNAL;
    }
}

void check_handle(const void* p, const char* what) {
    sparc::require(p != nullptr, sparc::ErrorCode::InvalidArgument,
                   std::string(what) + " handle is NULL");
}

sparc_code* make_code(sparc::CodeParams params) {
    auto* code = new sparc_code;
    code->params = params;
    code->alloc = params.sigma2 > 0.0 ? sparc::exponential_allocation(params)
                                      : sparc::flat_allocation(params);
    return code;
}

void set_if(double* p, double v) {
    if (p) *p = v;
}

} // namespace

extern "C" {

const char* sparc_version(void) { return sparc::kVersion; }

const char* sparc_strerror(sparc_status status) {
    switch (status) {
        case SPARC_OK: return "ok";
        case SPARC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SPARC_ERR_PRECONDITION: return "mathematical precondition failed";
        case SPARC_ERR_NONCONVERGENCE: return "did not converge";
        case SPARC_ERR_MEMORY: return "memory limit";
        case SPARC_ERR_NUMERIC: return "numeric failure";
        case SPARC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* sparc_last_error(void) { return g_last_error.c_str(); }

sparc_status sparc_code_create(uint32_t L, uint32_t M, double R_nats, double P, double sigma2,
                               sparc_code** out) {
    return guarded([&] {
        check_handle(out, "output");
        *out = make_code(sparc::derive_params(L, M, R_nats, P, sigma2));
    });
}

sparc_status sparc_code_create_n(uint32_t L, uint32_t M, uint64_t n, double P, double sigma2,
                                 sparc_code** out) {
    return guarded([&] {
        check_handle(out, "output");
        sparc::CodeParams params;
        params.L = L;
        params.M = M;
        params.n = n;
        params.P = P;
        params.sigma2 = sigma2;
        params.R = n > 0 ? (double)L * std::log((double)M) / (double)n : 0.0;
        params.R_target = params.R;
        params.validate();
        params.rate_at_or_above_capacity =
            std::isfinite(params.capacity()) && params.R >= params.capacity();
        *out = make_code(params);
    });
}

void sparc_code_free(sparc_code* code) { delete code; }

uint32_t sparc_code_L(const sparc_code* code) { return code ? code->params.L : 0; }
uint32_t sparc_code_M(const sparc_code* code) { return code ? code->params.M : 0; }
uint64_t sparc_code_n(const sparc_code* code) { return code ? code->params.n : 0; }
double sparc_code_rate(const sparc_code* code) { return code ? code->params.R : 0.0; }
double sparc_code_P(const sparc_code* code) { return code ? code->params.P : 0.0; }
double sparc_code_sigma2(const sparc_code* code) { return code ? code->params.sigma2 : 0.0; }
double sparc_code_snr(const sparc_code* code) { return code ? code->params.snr() : 0.0; }
double sparc_code_capacity(const sparc_code* code) { return code ? code->params.capacity() : 0.0; }
double sparc_code_delta_r(const sparc_code* code) { return code ? code->params.delta_R() : 0.0; }

sparc_status sparc_code_power(const sparc_code* code, double* out, uint64_t len) {
    return guarded([&] {
        check_handle(code, "code");
        check_handle(out, "output");
        sparc::require(len >= code->params.L, sparc::ErrorCode::InvalidArgument,
                       "power buffer too short");
        std::memcpy(out, code->alloc.p.data(), code->params.L * sizeof(double));
    });
}

sparc_status sparc_se_run(const sparc_code* code, uint64_t mc_samples, uint64_t mc_seed,
                          uint32_t max_iter, double kappa2, sparc_se_trace** out) {
    return guarded([&] {
        check_handle(code, "code");
        check_handle(out, "output");
        sparc::McConfig mc;
        mc.samples = mc_samples;
        mc.seed = mc_seed;
        sparc::SeOptions opts;
        if (max_iter > 0) opts.max_iter = max_iter;
        if (kappa2 > 0.0) opts.kappa2 = kappa2;
        auto* trace = new sparc_se_trace{sparc::se_recursion(code->params, code->alloc, mc, opts)};
        *out = trace;
    });
}

void sparc_se_trace_free(sparc_se_trace* trace) { delete trace; }

uint32_t sparc_se_trace_T(const sparc_se_trace* trace) { return trace ? trace->trace.T : 0; }
uint32_t sparc_se_trace_len(const sparc_se_trace* trace) {
    return trace ? (uint32_t)trace->trace.x.size() : 0;
}
double sparc_se_trace_f_r(const sparc_se_trace* trace) { return trace ? trace->trace.f_R : 0.0; }
double sparc_se_trace_delta_r(const sparc_se_trace* trace) {
    return trace ? trace->trace.delta_R : 0.0;
}
int sparc_se_trace_eq18_ok(const sparc_se_trace* trace) {
    return trace && trace->trace.eq18_ok ? 1 : 0;
}
int sparc_se_trace_stopped_on_floor(const sparc_se_trace* trace) {
    return trace && trace->trace.stopped_on_floor ? 1 : 0;
}
const char* sparc_se_trace_evaluator(const sparc_se_trace* trace) {
    return trace ? trace->trace.evaluator.c_str() : "";
}

sparc_status sparc_se_trace_column(const sparc_se_trace* trace, const char* name, double* out,
                                   uint64_t len) {
    return guarded([&] {
        check_handle(trace, "trace");
        check_handle(name, "column name");
        check_handle(out, "output");
        const sparc::SeTrace& tr = trace->trace;
        const std::vector<double>* col = nullptr;
        if (std::strcmp(name, "x") == 0) col = &tr.x;
        else if (std::strcmp(name, "tau2") == 0) col = &tr.tau2;
        else if (std::strcmp(name, "sigma2_t") == 0) col = &tr.sigma2_t;
        else if (std::strcmp(name, "sigma_perp2") == 0) col = &tr.sigma_perp2;
        else if (std::strcmp(name, "tau_perp2") == 0) col = &tr.tau_perp2;
        sparc::require(col != nullptr, sparc::ErrorCode::InvalidArgument,
                       "unknown trace column: " + std::string(name));
        sparc::require(len >= col->size(), sparc::ErrorCode::InvalidArgument,
                       "trace buffer too short");
        std::memcpy(out, col->data(), col->size() * sizeof(double));
    });
}

sparc_status sparc_se_predicted_ser(const sparc_code* code, const sparc_se_trace* trace,
                                    uint64_t mc_samples, uint64_t mc_seed, double* value,
                                    double* std_err) {
    return guarded([&] {
        check_handle(code, "code");
        check_handle(trace, "trace");
        sparc::McConfig mc;
        mc.samples = mc_samples;
        mc.seed = mc_seed;
        const sparc::McEstimate est =
            sparc::se_predicted_ser(trace->trace, code->params, code->alloc, mc);
        set_if(value, est.value);
        set_if(std_err, est.std_err);
    });
}

sparc_status sparc_sim_run(const sparc_code* code, const sparc_se_trace* trace,
                           const sparc_sim_options* options, sparc_sim_result** out) {
    return guarded([&] {
        check_handle(code, "code");
        check_handle(trace, "trace");
        check_handle(options, "options");
        check_handle(out, "output");
        sparc::SimConfig cfg;
        cfg.params = code->params;
        cfg.alloc = code->alloc;
        cfg.tau2_schedule = trace->trace.tau2;
        cfg.T = options->T_override > 0 ? options->T_override : trace->trace.T;
        cfg.master_seed = options->master_seed;
        cfg.kind = options->implicit_matrix ? sparc::MatrixKind::ImplicitFast
                                            : sparc::MatrixKind::DenseGaussian;
        cfg.fresh_matrix = options->fresh_matrix != 0;
        cfg.tau_mode =
            options->tau_online ? sparc::TauMode::Online : sparc::TauMode::SePrecomputed;
        if (options->mem_cap_bytes > 0) cfg.mem_cap_bytes = options->mem_cap_bytes;
        if (options->epsilons && options->num_epsilons > 0)
            cfg.epsilons.assign(options->epsilons, options->epsilons + options->num_epsilons);
        *out = new sparc_sim_result{
            sparc::run_batch(cfg, options->num_trials, options->parallelism)};
    });
}

void sparc_sim_result_free(sparc_sim_result* result) { delete result; }

uint32_t sparc_sim_num_trials(const sparc_sim_result* result) {
    return result ? (uint32_t)result->batch.agg.num_trials : 0;
}
uint64_t sparc_sim_num_failed(const sparc_sim_result* result) {
    return result ? result->batch.agg.num_failed : 0;
}
double sparc_sim_mean_ser(const sparc_sim_result* result) {
    return result ? result->batch.agg.mean_ser : 0.0;
}
double sparc_sim_std_err_ser(const sparc_sim_result* result) {
    return result ? result->batch.agg.std_err_ser : 0.0;
}

sparc_status sparc_sim_deviation_fraction(const sparc_sim_result* result, uint32_t epsilon_index,
                                          double* out) {
    return guarded([&] {
        check_handle(result, "result");
        check_handle(out, "output");
        sparc::require(epsilon_index < result->batch.agg.deviation_fraction.size(),
                       sparc::ErrorCode::InvalidArgument, "epsilon index out of range");
        *out = result->batch.agg.deviation_fraction[epsilon_index];
    });
}

sparc_status sparc_sim_trial(const sparc_sim_result* result, uint32_t trial, uint64_t* seed,
                             double* ser, int* decoded_ok, int* failed) {
    return guarded([&] {
        check_handle(result, "result");
        sparc::require(trial < result->batch.trials.size(), sparc::ErrorCode::InvalidArgument,
                       "trial index out of range");
        const sparc::TrialResult& tr = result->batch.trials[trial];
        if (seed) *seed = tr.seed;
        set_if(ser, tr.ser);
        if (decoded_ok) *decoded_ok = tr.decoded_ok ? 1 : 0;
        if (failed) *failed = tr.failed ? 1 : 0;
    });
}

uint32_t sparc_sim_trial_mse_len(const sparc_sim_result* result, uint32_t trial) {
    if (!result || trial >= result->batch.trials.size()) return 0;
    return (uint32_t)result->batch.trials[trial].mse_trajectory.size();
}

sparc_status sparc_sim_trial_mse(const sparc_sim_result* result, uint32_t trial, double* out,
                                 uint64_t len) {
    return guarded([&] {
        check_handle(result, "result");
        check_handle(out, "output");
        sparc::require(trial < result->batch.trials.size(), sparc::ErrorCode::InvalidArgument,
                       "trial index out of range");
        const auto& mse = result->batch.trials[trial].mse_trajectory;
        sparc::require(len >= mse.size(), sparc::ErrorCode::InvalidArgument,
                       "mse buffer too short");
        std::memcpy(out, mse.data(), mse.size() * sizeof(double));
    });
}

sparc_status sparc_sweep_run(const sparc_sweep_options* options, sparc_sweep_result** out) {
    return guarded([&] {
        check_handle(options, "options");
        check_handle(out, "output");
        check_handle(options->M_grid, "M grid");
        sparc::SweepConfig base;
        base.L = options->L;
        base.P = options->P;
        base.sigma2 = options->sigma2;
        base.R_target = options->R_nats;
        base.master_seed = options->master_seed;
        base.kind = options->implicit_matrix ? sparc::MatrixKind::ImplicitFast
                                             : sparc::MatrixKind::DenseGaussian;
        base.fresh_matrix = options->fresh_matrix != 0;
        base.mc.samples = options->mc_samples;
        base.mc.seed = options->mc_seed;
        if (options->mem_cap_bytes > 0) base.mem_cap_bytes = options->mem_cap_bytes;
        std::vector<uint32_t> grid(options->M_grid, options->M_grid + options->grid_len);
        *out = new sparc_sweep_result{
            sparc::sweep_M(base, grid, options->num_trials, options->parallelism)};
    });
}

void sparc_sweep_result_free(sparc_sweep_result* result) { delete result; }

uint32_t sparc_sweep_len(const sparc_sweep_result* result) {
    return result ? (uint32_t)result->sweep.points.size() : 0;
}

sparc_status sparc_sweep_point(const sparc_sweep_result* result, uint32_t index, uint32_t* M,
                               uint64_t* n, uint32_t* T, uint32_t* num_trials,
                               uint64_t* num_failed, double* mean_ser, double* std_err_ser,
                               double* se_predicted_ser) {
    return guarded([&] {
        check_handle(result, "result");
        sparc::require(index < result->sweep.points.size(), sparc::ErrorCode::InvalidArgument,
                       "sweep index out of range");
        const sparc::SweepPoint& pt = result->sweep.points[index];
        if (M) *M = pt.M;
        if (n) *n = pt.n;
        if (T) *T = pt.T;
        if (num_trials) *num_trials = pt.num_trials;
        if (num_failed) *num_failed = pt.num_failed;
        set_if(mean_ser, pt.mean_ser);
        set_if(std_err_ser, pt.std_err_ser);
        set_if(se_predicted_ser, pt.se_predicted_ser);
    });
}

sparc_status sparc_theorem1_bound(const sparc_code* code, uint32_t T, double f_r, double epsilon,
                                  double c_small, double C_big, double* bound, double* log_bound,
                                  int* vacuous, double* K_T, double* kappa_T) {
    return guarded([&] {
        check_handle(code, "code");
        sparc::BoundConstants constants;
        if (c_small > 0.0) constants.c_small = c_small;
        if (C_big > 0.0) constants.C_big = C_big;
        const sparc::Theorem1Result res =
            sparc::theorem1_bound(code->params, T, f_r, epsilon, constants);
        set_if(bound, res.bound);
        set_if(log_bound, res.log_bound);
        if (vacuous) *vacuous = res.vacuous ? 1 : 0;
        set_if(K_T, res.K_T);
        set_if(kappa_T, res.kappa_T);
    });
}

sparc_status sparc_exponent_scale(uint64_t n, int regime, double regime_param, double R_nats,
                                  uint32_t T, double* L, double* M, double* exponent_factor,
                                  char* order_buf, uint64_t order_buf_len) {
    return guarded([&] {
        sparc::require(regime == 0 || regime == 1, sparc::ErrorCode::InvalidArgument,
                       "regime must be 0 or 1");
        const sparc::ExponentScale sc = sparc::exponent_scale(
            n,
            regime == 0 ? sparc::ScalingRegime::MEqualsLPowA
                        : sparc::ScalingRegime::LEqualsKnOverLogLog,
            regime_param, R_nats, T);
        set_if(L, sc.L);
        set_if(M, sc.M);
        set_if(exponent_factor, sc.exponent_factor);
        if (order_buf && order_buf_len > 0) {
            std::strncpy(order_buf, sc.exponent_order.c_str(), order_buf_len - 1);
            order_buf[order_buf_len - 1] = '\0';
        }
    });
}

sparc_status sparc_capacity_gap(double M, double kappa2, const sparc_code* code,
                                double* delta_r_min, double* f_r_at_min, double* T_upper) {
    return guarded([&] {
        check_handle(code, "code");
        const sparc::CapacityGapReport rep = sparc::capacity_gap_report(M, kappa2, code->params);
        set_if(delta_r_min, rep.delta_R_min);
        set_if(f_r_at_min, rep.f_R_at_min);
        set_if(T_upper, rep.T_upper);
    });
}

sparc_status sparc_f_r(double M, double delta_r, double kappa2, double* out) {
    return guarded([&] {
        check_handle(out, "output");
        *out = sparc::f_R(M, delta_r, kappa2);
    });
}

sparc_status sparc_delta_r_min(double M, double kappa2, double* out) {
    return guarded([&] {
        check_handle(out, "output");
        *out = sparc::delta_R_min(M, kappa2);
    });
}

sparc_status sparc_chi_increments(const sparc_code* code, double kappa2, double delta,
                                  double* chi1, double* chi) {
    return guarded([&] {
        check_handle(code, "code");
        sparc::BoundInputs inputs;
        if (kappa2 > 0.0) inputs.kappa2 = kappa2;
        inputs.delta = delta;
        const sparc::ChiIncrements incr = sparc::chi_increments(code->params, inputs);
        set_if(chi1, incr.chi1);
        set_if(chi, incr.chi);
    });
}

} // extern "C"
