#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "sparc/errors.hpp"
#include "sparc/state_evolution.hpp"
#include "sparc/stats.hpp"

using namespace sparc;

namespace {

CodeParams run_params(uint32_t L, uint32_t M, double snr, double rate_frac) {
    const double C = 0.5 * std::log1p(snr);
    return derive_params(L, M, rate_frac * C, snr, 1.0);
}

} // namespace

TEST_CASE("normal tail helpers hit known quantiles") {
    CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q_function(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("x saturates as tau goes to zero") {
    const CodeParams p = run_params(64, 512, 11.1, 0.8);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 5000;
    const McEstimate e = x_of_tau(0.01, p, alloc, mc);
    CHECK(e.value >= 0.999);
    CHECK(e.value <= 1.0);
}

TEST_CASE("x is non-increasing in tau2") {
    const CodeParams p = run_params(32, 64, 15.0, 0.7);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 20000;
    const std::vector<double> tau2s = {1.0, 2.0, 4.0, 8.0, 16.0};
    McEstimate prev = x_of_tau(tau2s[0], p, alloc, mc);
    CHECK(prev.value > 0.0);
    CHECK(prev.value <= 1.0);
    for (size_t i = 1; i < tau2s.size(); ++i) {
        const McEstimate cur = x_of_tau(tau2s[i], p, alloc, mc);
        CHECK(cur.value <= prev.value + 2.0 * (cur.std_err + prev.std_err));
        prev = cur;
    }
}

TEST_CASE("closed-form lower bound: single section above the knee") {
    // L=1, M=512, P=15, sigma2=1, R=1, tau2=5: nu = L P/(R tau2) = 3,
    // bound = Q(-alpha (nu/2-1) sqrt(log M)/sqrt(nu)) / (1 + M^{-(1-alpha)(nu/2-1)}).
    CodeParams p;
    p.L = 1;
    p.M = 512;
    p.n = 10;
    p.P = 15.0;
    p.sigma2 = 1.0;
    p.R = 1.0;
    p.R_target = 1.0;
    p.validate();
    PowerAllocation alloc = flat_allocation(p);
    BoundInputs in;
    CHECK(x_lower_bound(5.0, p, alloc, in) == doctest::Approx(0.52946052099727092).epsilon(1e-13));
    // tau2 = 7.5 puts nu = 2, the boundary band: Q(2 upsilon/sqrt(nu))/(1+e^{-upsilon sqrt(log M)}).
    CHECK(x_lower_bound(7.5, p, alloc, in) ==
          doctest::Approx(0.072670494215733308).epsilon(1e-13));
    // Far below the band the section contributes nothing.
    CHECK(x_lower_bound(40.0, p, alloc, in) == 0.0);
}

TEST_CASE("closed-form lower bound is dominated by the Monte Carlo expectation") {
    const CodeParams p = run_params(64, 512, 15.0, 0.7);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 10000;
    BoundInputs in;
    for (double tau2 : {4.0, 8.0, 16.0}) {
        const McEstimate e = x_of_tau(tau2, p, alloc, mc);
        const double lb = x_lower_bound(tau2, p, alloc, in);
        CHECK(lb <= e.value + 3.0 * e.std_err);
    }
}

TEST_CASE("asymptotic lower bound applies the mass prefactor") {
    // Prefactor 1 - M^{-kappa2 delta^2}/(delta sqrt(log M)) at delta=0.3, M=512.
    CodeParams p;
    p.L = 1;
    p.M = 512;
    p.n = 10;
    p.P = 15.0;
    p.sigma2 = 1.0;
    p.R = 1.0;
    p.R_target = 1.0;
    p.validate();
    PowerAllocation alloc = flat_allocation(p);
    BoundInputs in;
    in.delta = 0.3;
    // nu = 3 > 2 + delta: the whole (single-section) mass gets the prefactor.
    CHECK(x_lower_bound_asymptotic(5.0, p, alloc, in) ==
          doctest::Approx(0.2387795209666321).epsilon(1e-13));
    // nu = 2 sits in the boundary band: a quarter of the mass.
    CHECK(x_lower_bound_asymptotic(7.5, p, alloc, in) == doctest::Approx(0.25).epsilon(1e-13));
    // nu below both -> zero.
    CHECK(x_lower_bound_asymptotic(40.0, p, alloc, in) == 0.0);
    // delta outside (0, 1/2) is rejected.
    BoundInputs bad;
    bad.delta = 0.6;
    CHECK_THROWS_AS((void)x_lower_bound_asymptotic(5.0, p, alloc, bad), Error);
}

TEST_CASE("per-iteration increments at a comfortable rate gap") {
    // snr=15, R = 0.7 C exactly, L=1024, M=512, delta = Delta_R = 0.3.
    CodeParams p;
    p.L = 1024;
    p.M = 512;
    p.P = 15.0;
    p.sigma2 = 1.0;
    p.R = 0.7 * 0.5 * std::log1p(15.0);
    p.R_target = p.R;
    p.n = 6583;
    p.validate();
    CHECK(p.delta_R() == doctest::Approx(0.3).epsilon(1e-12));
    BoundInputs in;
    in.delta = 0.3;
    const ChiIncrements inc = chi_increments(p, in);
    CHECK(inc.chi1 == doctest::Approx(0.048459301338002886).epsilon(1e-12));
    CHECK(inc.chi == doctest::Approx(-0.14826997279254686).epsilon(1e-12));
    CHECK(inc.chi1 > inc.chi);
    // Simplified forms evaluated at delta = Delta_R: chi1 collapses to its
    // simplified value exactly, chi stays strictly above its own.
    const double chi1_lb = 0.048459301338002886;
    const double chi_lb = -0.18371392575259451;
    CHECK(inc.chi1 >= chi1_lb - 1e-12);
    CHECK(inc.chi >= chi_lb);
    // delta = 0 defaults to min(Delta_R, 1/2) = 0.3 here.
    BoundInputs dflt;
    const ChiIncrements inc2 = chi_increments(p, dflt);
    CHECK(inc2.chi1 == doctest::Approx(inc.chi1).epsilon(1e-14));
    CHECK(inc2.chi == doctest::Approx(inc.chi).epsilon(1e-14));
    // delta above min(Delta_R, 1/2) is rejected.
    BoundInputs big;
    big.delta = 0.4;
    CHECK_THROWS_AS((void)chi_increments(p, big), Error);
}

TEST_CASE("target residual value and monotonicities") {
    CHECK(f_R(512.0, 0.2, 1.0) == doctest::Approx(1.5597867279381687).epsilon(1e-13));
    CHECK(f_R(512.0, 0.3, 1.0) < f_R(512.0, 0.2, 1.0));
    CHECK(f_R(4096.0, 0.2, 1.0) < f_R(512.0, 0.2, 1.0));
    CHECK(f_R(512.0, 0.2, 2.0) < f_R(512.0, 0.2, 1.0));
    CHECK_THROWS_AS((void)f_R(1.0, 0.2, 1.0), Error);
    CHECK_THROWS_AS((void)f_R(512.0, 0.0, 1.0), Error);
}

TEST_CASE("minimum admissible gap") {
    // At M = e^e: sqrt(log log M / log M) = e^{-1/2}.
    const double Mee = std::exp(std::exp(1.0));
    CHECK(delta_R_min(Mee * 1.0000001, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
    CHECK(delta_R_min(4096.0, 1.0) < delta_R_min(512.0, 1.0));
    CHECK(delta_R_min(512.0, 4.0) == doctest::Approx(0.5 * delta_R_min(512.0, 1.0)).epsilon(1e-13));
    CHECK_THROWS_AS((void)delta_R_min(2.0, 1.0), Error);
}

TEST_CASE("recursion reaches the residual target below capacity") {
    const CodeParams p = run_params(64, 512, 15.0, 0.7);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 10000;
    const SeTrace tr = se_recursion(p, alloc, mc);
    CHECK(tr.eq18_ok);
    CHECK(!tr.stopped_on_floor);
    CHECK(tr.delta_R == doctest::Approx(p.delta_R()).epsilon(1e-14));
    CHECK(tr.f_R < 1.0);
    REQUIRE(tr.T >= 1);
    REQUIRE(tr.x.size() == tr.T + 1);
    REQUIRE(tr.tau2.size() == tr.T + 1);
    REQUIRE(tr.sigma2_t.size() == tr.T + 1);
    REQUIRE(tr.sigma_perp2.size() == tr.T + 1);
    REQUIRE(tr.tau_perp2.size() == tr.T + 1);
    CHECK(tr.x[0] == 0.0);
    CHECK(tr.tau2[0] == doctest::Approx(p.sigma2 + p.P).epsilon(1e-14));
    CHECK(tr.x[tr.T] >= 1.0 - tr.f_R);
    for (uint32_t t = 0; t <= tr.T; ++t) {
        CHECK(tr.tau2[t] == doctest::Approx(p.sigma2 + p.P * (1.0 - tr.x[t])).epsilon(1e-12));
        CHECK(tr.sigma2_t[t] == doctest::Approx(tr.tau2[t] - p.sigma2).epsilon(1e-12));
        if (t > 0) {
            CHECK(tr.x[t] >= tr.x[t - 1] - 1e-6);
            CHECK(tr.sigma_perp2[t] ==
                  doctest::Approx(tr.sigma2_t[t] * (1.0 - tr.sigma2_t[t] / tr.sigma2_t[t - 1]))
                      .epsilon(1e-10));
            CHECK(tr.tau_perp2[t] ==
                  doctest::Approx(tr.tau2[t] * (1.0 - tr.tau2[t] / tr.tau2[t - 1]))
                      .epsilon(1e-10));
        }
    }
    CHECK(tr.sigma_perp2[0] == doctest::Approx(tr.sigma2_t[0]).epsilon(1e-14));
    CHECK(tr.tau_perp2[0] == doctest::Approx(tr.tau2[0]).epsilon(1e-14));
    // The strength range here is too wide for a grid of at most 2L nodes.
    CHECK(tr.evaluator == "direct");
    const McEstimate direct = x_of_tau(tr.tau2[0], p, alloc, mc);
    CHECK(std::abs(tr.x[1] - direct.value) < 3.0 * direct.std_err + 2e-3);
}

TEST_CASE("a narrow strength range switches to the shared grid evaluator") {
    // Low snr compresses the allocation decay, so the grid needs few nodes.
    const CodeParams p = run_params(32, 64, 1.0, 0.5);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 20000;
    const SeTrace tr = se_recursion(p, alloc, mc);
    CHECK(tr.evaluator == "grid");
    CHECK(tr.eq18_ok);
    CHECK(tr.x[tr.T] >= 1.0 - tr.f_R);
    // Interpolated first step tracks the direct expectation at tau2_0.
    const McEstimate direct = x_of_tau(tr.tau2[0], p, alloc, mc);
    CHECK(std::abs(tr.x[1] - direct.value) < 3.0 * direct.std_err + 5e-3);
}

TEST_CASE("recursion falls back to the increment floor when the target is vacuous") {
    const CodeParams p = run_params(64, 64, 11.1, 0.8);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 10000;
    const SeTrace tr = se_recursion(p, alloc, mc);
    CHECK(!tr.eq18_ok);
    CHECK(tr.f_R >= 1.0);
    CHECK(tr.stopped_on_floor);
    REQUIRE(tr.T >= 2);
    CHECK(tr.x[tr.T] - tr.x[tr.T - 1] < 1e-4);
    CHECK(tr.x[tr.T] > 0.5); // still converges to a substantial fixed point
}

TEST_CASE("recursion with few sections uses the direct evaluator and matches x_of_tau") {
    const CodeParams p = run_params(8, 16, 15.0, 0.6);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 5000;
    const SeTrace tr = se_recursion(p, alloc, mc);
    CHECK(tr.evaluator == "direct");
    const McEstimate direct = x_of_tau(tr.tau2[0], p, alloc, mc);
    CHECK(tr.x[1] == doctest::Approx(direct.value).epsilon(1e-10));
}

TEST_CASE("recursion refuses rates at or above capacity") {
    const CodeParams p = run_params(32, 64, 7.0, 1.05);
    CHECK(p.rate_at_or_above_capacity);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 1000;
    try {
        (void)se_recursion(p, alloc, mc);
        FAIL("expected a precondition error");
    } catch (const Error& e) {
        CHECK(e.code == ErrorCode::Precondition);
    }
}

TEST_CASE("recursion reports non-convergence when the iteration budget is too small") {
    const CodeParams p = run_params(8, 4, 11.1, 0.8);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 2000;
    SeOptions opts;
    opts.max_iter = 1;
    try {
        (void)se_recursion(p, alloc, mc, opts);
        FAIL("expected non-convergence");
    } catch (const Error& e) {
        CHECK(e.code == ErrorCode::NonConvergence);
    }
}

TEST_CASE("predicted section error rate matches the two-column closed form") {
    // M=2: the correct column loses iff Z2 - Z1 > b, probability Q(b/sqrt(2)).
    CodeParams p;
    p.L = 1;
    p.M = 2;
    p.n = 16;
    p.P = 1.0;
    p.sigma2 = 1.0;
    p.R = std::log(2.0) / 16.0;
    p.R_target = p.R;
    p.validate();
    PowerAllocation alloc = flat_allocation(p);
    McConfig mc;
    mc.samples = 200000;
    const double tau2 = 4.0;
    const double b = std::sqrt(16.0 * 1.0 / tau2);
    const McEstimate e = se_predicted_ser(tau2, p, alloc, mc);
    const double expect = q_function(b / std::sqrt(2.0));
    CHECK(std::abs(e.value - expect) < 3.0 * e.std_err);
    // The reported std err is near the binomial value.
    const double binom = std::sqrt(expect * (1.0 - expect) / (double)mc.samples);
    CHECK(e.std_err == doctest::Approx(binom).epsilon(0.25));
    // Zero effective noise decodes perfectly.
    const McEstimate z = se_predicted_ser(0.0, p, alloc, mc);
    CHECK(z.value == 0.0);
    CHECK(z.std_err == 0.0);
}

TEST_CASE("trace-based prediction uses the final tau") {
    const CodeParams p = run_params(16, 16, 15.0, 0.6);
    const PowerAllocation alloc = exponential_allocation(p);
    McConfig mc;
    mc.samples = 20000;
    const SeTrace tr = se_recursion(p, alloc, mc);
    const McEstimate a = se_predicted_ser(tr, p, alloc, mc);
    const McEstimate b = se_predicted_ser(tr.tau2[tr.T], p, alloc, mc);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
    CHECK(a.std_err == doctest::Approx(b.std_err).epsilon(1e-14));
}
