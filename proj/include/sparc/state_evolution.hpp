#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparc/params.hpp"
#include "sparc/power.hpp"

namespace sparc {

struct McConfig {
    uint64_t samples = 100000;
    uint64_t seed = 1;
};

// A point estimate with its Monte Carlo standard error.
struct McEstimate {
    double value = 0.0;
    double std_err = 0.0;
};

// The state evolution sequence. x_t is the power-weighted fraction of
// correctly decodable sections, tau2_t = sigma2 + P(1 - x_t) the effective
// noise variance. T is the stopping index.
struct SeTrace {
    std::vector<double> x;
    std::vector<double> tau2;
    std::vector<double> sigma2_t;     // tau2_t - sigma2 = P(1 - x_t)
    std::vector<double> sigma_perp2;  // sigma2_t * (1 - sigma2_t/sigma2_{t-1}); index 0 = sigma2_0
    std::vector<double> tau_perp2;    // tau2_t  * (1 - tau2_t/tau2_{t-1});   index 0 = tau2_0
    uint32_t T = 0;
    double f_R = 0.0;        // target residual at delta = Delta_R
    double delta_R = 0.0;
    bool eq18_ok = false;    // f_R < 1, i.e. the x >= 1 - f_R target is meaningful
    bool stopped_on_floor = false; // terminated by the increment floor instead
    std::string evaluator;   // "grid" or "direct"
};

struct SeOptions {
    uint32_t max_iter = 400;
    double kappa2 = 1.0;
    double increment_floor = 1e-4; // stop rule when f_R >= 1
};

// Monte Carlo estimate of x(tau): the power-weighted expectation of the
// posterior mass on the correct column under the effective observation model
// beta_0 + tau*Z. Deterministic given mc.seed (64 fixed shards).
McEstimate x_of_tau(double tau2, const CodeParams& params, const PowerAllocation& alloc,
                    const McConfig& mc);

// Iterate x_{t+1} = x(tau_t), tau2_{t+1} = sigma2 + P(1 - x_{t+1}) until
// x_t >= 1 - f_R (or, when f_R >= 1 makes that target vacuous, until the
// per-step increment falls below the floor). The expectation is evaluated on
// a shared log-spaced grid of signal strengths with common random numbers
// across all evaluations whenever that is cheaper than direct per-section
// evaluation; both paths use the same seeded draws per shard.
SeTrace se_recursion(const CodeParams& params, const PowerAllocation& alloc, const McConfig& mc,
                     const SeOptions& opts = {});

// Free constants of the analytic lower bounds; defaults follow the
// "universal positive constants" convention (all outputs that depend on them
// hold only up to these unspecified constants).
struct BoundInputs {
    double kappa2 = 1.0;
    double kappa3 = 1.0;
    double alpha = 0.5;    // in [0,1)
    double upsilon = 1.0;  // > 0
    double delta = 0.0;    // in (0, min(Delta_R, 1/2)]; 0 = use min(Delta_R, 1/2)

    void validate() const;
};

// Closed-form lower bound on x(tau): per-section Q-function branches over
// nu_l > 2 and the band 2(1 - upsilon/sqrt(log M)) <= nu_l <= 2.
double x_lower_bound(double tau2, const CodeParams& params, const PowerAllocation& alloc,
                     const BoundInputs& inputs);

// Large-M form: prefactor (1 - M^{-kappa2 delta^2}/(delta sqrt(log M))) on the
// nu_l > 2 + delta mass plus a quarter of the boundary band.
double x_lower_bound_asymptotic(double tau2, const CodeParams& params,
                                const PowerAllocation& alloc, const BoundInputs& inputs);

// Per-iteration increment lower bounds for the exponential allocation:
// chi1 bounds x_1, chi bounds x_t - x_{t-1} until x_t reaches 1 - f(M).
struct ChiIncrements {
    double chi1 = 0.0;
    double chi = 0.0;
};
ChiIncrements chi_increments(const CodeParams& params, const BoundInputs& inputs);

// Target residual M^{-kappa2 delta^2} / (delta sqrt(log M)).
double f_R(double M, double delta_R, double kappa2);

// Smallest admissible capacity gap sqrt(log log M / (kappa2 log M)).
double delta_R_min(double M, double kappa2);

// Section error rate predicted at the end of state evolution: the chance the
// correct column loses the argmax under s ~ beta_0 + tau_T Z. (The effective
// observation model here is a reconstruction; it is the natural reading of
// the prediction, not a quantity the analysis pins down.)
McEstimate se_predicted_ser(double tau2_T, const CodeParams& params, const PowerAllocation& alloc,
                            const McConfig& mc);
McEstimate se_predicted_ser(const SeTrace& trace, const CodeParams& params,
                            const PowerAllocation& alloc, const McConfig& mc);

} // namespace sparc
