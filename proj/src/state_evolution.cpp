#include "sparc/state_evolution.hpp"

#include <algorithm>
#include <cmath>

#include "sparc/mc_kernels.hpp"
#include "sparc/rng.hpp"
#include "sparc/stats.hpp"

namespace sparc {

namespace {

// Beyond this signal strength the correct-column mass is 1.0 to double
// precision for any draw this sampler can produce, so evaluation saturates.
constexpr double kSatA = 18.0;
constexpr uint32_t kShards = 64;

// Run the shard loop: per sample, fill gaps t[j] = u_{j+1} - u_1 into buf and
// call fn(buf). Shard seeds are derived from mc.seed, so the draw sequence is
// a pure function of the seed regardless of caller structure.
template <typename Fn>
void for_each_sample(uint32_t M, const McConfig& mc, Fn&& fn) {
    const size_t m = M - 1;
    std::vector<double> t(m);
    for (uint32_t k = 0; k < kShards; ++k) {
        uint64_t cnt = mc.samples / kShards + (k < mc.samples % kShards ? 1 : 0);
        if (cnt == 0) continue;
        SplitMix64 g(derive_seed(mc.seed, k, "se-shard"));
        for (uint64_t s = 0; s < cnt; ++s) {
            const double u1 = g.gaussian();
            for (size_t j = 0; j < m; ++j) t[j] = g.gaussian() - u1;
            fn(t.data());
        }
    }
}

struct SectionStrengths {
    std::vector<double> a;  // clamped to kSatA, non-increasing
    size_t n_sat = 0;       // leading sections already saturated
    double w_sat = 0.0;     // their total weight P_l/P
};

SectionStrengths strengths_at(double tau2, const CodeParams& params,
                              const PowerAllocation& alloc) {
    SectionStrengths st;
    const double tau = std::sqrt(tau2);
    st.a.reserve(params.L);
    for (uint32_t l = 0; l < params.L; ++l) {
        const double a = std::sqrt((double)params.n * alloc.p[l]) / tau;
        if (a >= kSatA) {
            ++st.n_sat;
            st.w_sat += alloc.p[l] / params.P;
        } else {
            st.a.push_back(a);
        }
    }
    return st;
}

// Monotone cubic (Fritsch-Carlson) interpolant on a uniform grid in log a.
class XGrid {
public:
    XGrid(std::vector<double> loga, std::vector<double> val, std::vector<double> se)
        : loga_(std::move(loga)), val_(std::move(val)), se_(std::move(se)) {
        const size_t n = loga_.size();
        h_ = loga_[1] - loga_[0];
        slope_.resize(n, 0.0);
        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) d[i] = (val_[i + 1] - val_[i]) / h_;
        slope_[0] = d[0];
        slope_[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0)
                slope_[i] = 0.0;
            else
                slope_[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
        }
    }

    double value(double a) const { return eval(val_, std::log(a)); }
    double stderr_at(double a) const {
        // Linear interpolation is plenty for an error estimate.
        const double x = std::log(a);
        const auto [i, u] = bracket(x);
        return se_[i] * (1.0 - u) + se_[i + 1] * u;
    }

private:
    std::pair<size_t, double> bracket(double x) const {
        double u = (x - loga_.front()) / h_;
        if (u <= 0.0) return {0, 0.0};
        if (u >= (double)(loga_.size() - 1)) return {loga_.size() - 2, 1.0};
        size_t i = (size_t)u;
        return {i, u - (double)i};
    }

    double eval(const std::vector<double>& y, double x) const {
        const auto [i, u] = bracket(x);
        const double y0 = y[i], y1 = y[i + 1];
        const double m0 = slope_[i] * h_, m1 = slope_[i + 1] * h_;
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
               (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    }

    std::vector<double> loga_, val_, se_, slope_;
    double h_ = 0.0;
};

XGrid build_grid(double a_lo, double a_hi, uint32_t G, const CodeParams& params,
                 const McConfig& mc) {
    std::vector<double> loga(G), nodes(G), acc(G, 0.0), acc2(G, 0.0);
    const double l0 = std::log(a_lo), l1 = std::log(a_hi);
    for (uint32_t g = 0; g < G; ++g) {
        loga[g] = l0 + (l1 - l0) * (double)g / (double)(G - 1);
        nodes[g] = std::exp(loga[g]);
    }
    std::vector<double> r(G);
    for_each_sample(params.M, mc, [&](const double* t) {
        kernels::correct_mass(t, params.M - 1, nodes.data(), G, r.data());
        for (uint32_t g = 0; g < G; ++g) {
            acc[g] += r[g];
            acc2[g] += r[g] * r[g];
        }
    });
    const double S = (double)mc.samples;
    std::vector<double> val(G), se(G);
    for (uint32_t g = 0; g < G; ++g) {
        val[g] = acc[g] / S;
        const double var = std::max(0.0, acc2[g] / S - val[g] * val[g]);
        se[g] = S > 1 ? std::sqrt(var / (S - 1)) : 0.0;
    }
    return XGrid(std::move(loga), std::move(val), std::move(se));
}

McEstimate x_from_grid(const XGrid& grid, double tau2, const CodeParams& params,
                       const PowerAllocation& alloc) {
    const auto st = strengths_at(tau2, params, alloc);
    double x = st.w_sat, se = 0.0;
    for (size_t i = 0; i < st.a.size(); ++i) {
        const double w = alloc.p[st.n_sat + i] / params.P;
        x += w * std::clamp(grid.value(st.a[i]), 0.0, 1.0);
        se += w * grid.stderr_at(st.a[i]);
    }
    return {x, se};
}

} // namespace

McEstimate x_of_tau(double tau2, const CodeParams& params, const PowerAllocation& alloc,
                    const McConfig& mc) {
    require(tau2 > 0.0 && std::isfinite(tau2), ErrorCode::InvalidArgument,
            "x_of_tau: tau2 must be positive");
    require(mc.samples >= 1, ErrorCode::InvalidArgument, "x_of_tau: need at least one sample");
    params.validate();

    const auto st = strengths_at(tau2, params, alloc);
    const size_t live = st.a.size();
    std::vector<double> w(live);
    for (size_t i = 0; i < live; ++i) w[i] = alloc.p[st.n_sat + i] / params.P;

    double acc = 0.0, acc2 = 0.0;
    if (live == 0) {
        acc = st.w_sat * (double)mc.samples;
        acc2 = st.w_sat * st.w_sat * (double)mc.samples;
    } else {
        std::vector<double> r(live);
        for_each_sample(params.M, mc, [&](const double* t) {
            kernels::correct_mass(t, params.M - 1, st.a.data(), live, r.data());
            double v = st.w_sat;
            for (size_t i = 0; i < live; ++i) v += w[i] * r[i];
            acc += v;
            acc2 += v * v;
        });
    }
    const double S = (double)mc.samples;
    const double x = acc / S;
    const double var = std::max(0.0, acc2 / S - x * x);
    return {x, S > 1 ? std::sqrt(var / (S - 1)) : 0.0};
}

SeTrace se_recursion(const CodeParams& params, const PowerAllocation& alloc, const McConfig& mc,
                     const SeOptions& opts) {
    params.validate();
    alloc.validate(params);
    require(opts.max_iter >= 1, ErrorCode::InvalidArgument, "se_recursion: max_iter must be >= 1");
    const double C = params.capacity();
    require(!std::isfinite(C) || params.R < C, ErrorCode::Precondition,
            "se_recursion: requires R < capacity");

    SeTrace tr;
    tr.delta_R = params.delta_R();
    tr.f_R = f_R((double)params.M, tr.delta_R, opts.kappa2);
    tr.eq18_ok = tr.f_R < 1.0;
    tr.x.push_back(0.0);
    tr.tau2.push_back(params.sigma2 + params.P);

    // Signal-strength range over the whole recursion: tau in [sigma, tau_0].
    const double tau0 = std::sqrt(tr.tau2[0]);
    const double a_lo = std::sqrt((double)params.n * alloc.p[params.L - 1]) / tau0 / 1.05;
    double a_hi = params.sigma2 > 0.0
                      ? std::sqrt((double)params.n * alloc.p[0] / params.sigma2) * 1.05
                      : kSatA;
    a_hi = std::min(a_hi, kSatA);

    uint32_t G = 0;
    if (a_hi > a_lo * 1.02) {
        G = (uint32_t)std::ceil(std::log(a_hi / a_lo) / 0.02) + 1;
        G = std::clamp<uint32_t>(G, 33, 257);
    }
    const bool use_grid = G > 0 && (uint64_t)G <= 2ull * params.L;
    tr.evaluator = use_grid ? "grid" : "direct";

    XGrid grid = use_grid ? build_grid(a_lo, a_hi, G, params, mc)
                          : XGrid({0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0});

    const double target = 1.0 - tr.f_R;
    bool done = false;
    for (uint32_t t = 1; t <= opts.max_iter && !done; ++t) {
        const McEstimate e = use_grid ? x_from_grid(grid, tr.tau2.back(), params, alloc)
                                      : x_of_tau(tr.tau2.back(), params, alloc, mc);
        const double x_prev = tr.x.back();
        tr.x.push_back(e.value);
        tr.tau2.push_back(params.sigma2 + params.P * (1.0 - e.value));
        if (tr.eq18_ok && e.value >= target) {
            tr.T = t;
            done = true;
        } else if (!tr.eq18_ok && e.value - x_prev < opts.increment_floor) {
            tr.T = t;
            tr.stopped_on_floor = true;
            done = true;
        }
    }
    if (!done)
        throw Error(ErrorCode::NonConvergence,
                    "se_recursion: target not reached within max_iter; the rate is too close to "
                    "capacity for this M (gap admissibility fails)");

    tr.sigma2_t.resize(tr.x.size());
    tr.sigma_perp2.resize(tr.x.size());
    tr.tau_perp2.resize(tr.x.size());
    for (size_t t = 0; t < tr.x.size(); ++t) {
        tr.sigma2_t[t] = tr.tau2[t] - params.sigma2;
        if (t == 0) {
            tr.sigma_perp2[t] = tr.sigma2_t[t];
            tr.tau_perp2[t] = tr.tau2[t];
        } else {
            tr.sigma_perp2[t] =
                tr.sigma2_t[t] * (1.0 - tr.sigma2_t[t] / tr.sigma2_t[t - 1]);
            tr.tau_perp2[t] = tr.tau2[t] * (1.0 - tr.tau2[t] / tr.tau2[t - 1]);
        }
    }
    return tr;
}

void BoundInputs::validate() const {
    require(kappa2 > 0.0 && kappa3 > 0.0, ErrorCode::InvalidArgument,
            "kappa2 and kappa3 must be positive");
    require(alpha >= 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must be in [0,1)");
    require(upsilon > 0.0, ErrorCode::InvalidArgument, "upsilon must be positive");
}

double x_lower_bound(double tau2, const CodeParams& params, const PowerAllocation& alloc,
                     const BoundInputs& inputs) {
    inputs.validate();
    const auto nu = nu_coefficients(params, alloc, tau2);
    const double logM = std::log((double)params.M);
    const double rootlogM = std::sqrt(logM);
    double x = 0.0;
    for (uint32_t l = 0; l < params.L; ++l) {
        const double w = alloc.p[l] / params.P;
        const double v = nu[l];
        if (v > 2.0) {
            const double num = q_function(-inputs.alpha * (v / 2.0 - 1.0) / std::sqrt(v) * rootlogM);
            const double den =
                1.0 + std::pow((double)params.M, -(1.0 - inputs.alpha) * (v / 2.0 - 1.0));
            x += w * num / den;
        } else if (v >= 2.0 * (1.0 - inputs.upsilon / rootlogM)) {
            const double num = q_function(2.0 * inputs.upsilon / std::sqrt(v));
            const double den = 1.0 + std::exp(-inputs.upsilon * rootlogM);
            x += w * num / den;
        }
    }
    return x;
}

double x_lower_bound_asymptotic(double tau2, const CodeParams& params,
                                const PowerAllocation& alloc, const BoundInputs& inputs) {
    inputs.validate();
    require(inputs.delta > 0.0 && inputs.delta < 0.5, ErrorCode::InvalidArgument,
            "x_lower_bound_asymptotic: delta must be in (0, 1/2)");
    const auto nu = nu_coefficients(params, alloc, tau2);
    const double logM = std::log((double)params.M);
    const double rootlogM = std::sqrt(logM);
    const double pre =
        1.0 - std::pow((double)params.M, -inputs.kappa2 * inputs.delta * inputs.delta) /
                  (inputs.delta * rootlogM);
    double main = 0.0, band = 0.0;
    for (uint32_t l = 0; l < params.L; ++l) {
        const double w = alloc.p[l] / params.P;
        const double v = nu[l];
        if (v > 2.0 + inputs.delta)
            main += w;
        else if (v >= 2.0 * (1.0 - inputs.kappa3 / rootlogM))
            band += w;
    }
    return pre * main + 0.25 * band;
}

ChiIncrements chi_increments(const CodeParams& params, const BoundInputs& inputs) {
    inputs.validate();
    const double C = params.capacity();
    require(std::isfinite(C) && params.R < C, ErrorCode::Precondition,
            "chi_increments: requires finite capacity and R < C");
    const double dR = params.delta_R();
    double delta = inputs.delta > 0.0 ? inputs.delta : std::min(dR, 0.5);
    require(delta > 0.0 && delta <= std::min(dR, 0.5) + 1e-12, ErrorCode::InvalidArgument,
            "chi_increments: delta must be in (0, min(Delta_R, 1/2)]");
    const double M = (double)params.M, L = (double)params.L;
    const double f = f_R(M, delta, inputs.kappa2);
    const double rc = (1.0 + delta / 2.0) * params.R / C;
    const double s2P = params.sigma2 / params.P;
    ChiIncrements out;
    out.chi1 = (1.0 - f) * (params.P + params.sigma2) / params.P *
               (1.0 - rc - 5.0 * params.R / L);
    out.chi = (1.0 - f) * (s2P * (1.0 - rc) - f * rc) - 5.0 * params.R * (1.0 + s2P) / L;
    return out;
}

double f_R(double M, double delta_R, double kappa2) {
    require(M >= 2.0, ErrorCode::InvalidArgument, "f_R: M must be >= 2");
    require(delta_R > 0.0 && delta_R <= 1.0, ErrorCode::InvalidArgument,
            "f_R: delta_R must be in (0,1]");
    require(kappa2 > 0.0, ErrorCode::InvalidArgument, "f_R: kappa2 must be positive");
    const double logM = std::log(M);
    return std::exp(-kappa2 * delta_R * delta_R * logM) / (delta_R * std::sqrt(logM));
}

double delta_R_min(double M, double kappa2) {
    require(kappa2 > 0.0, ErrorCode::InvalidArgument, "delta_R_min: kappa2 must be positive");
    const double logM = std::log(M);
    require(logM > 1.0, ErrorCode::InvalidArgument, "delta_R_min: M must exceed e");
    return std::sqrt(std::log(logM) / (kappa2 * logM));
}

McEstimate se_predicted_ser(double tau2_T, const CodeParams& params, const PowerAllocation& alloc,
                            const McConfig& mc) {
    params.validate();
    require(tau2_T >= 0.0, ErrorCode::InvalidArgument, "se_predicted_ser: tau2 must be >= 0");
    if (tau2_T == 0.0) return {0.0, 0.0};
    const double tau = std::sqrt(tau2_T);
    std::vector<double> b(params.L);
    for (uint32_t l = 0; l < params.L; ++l)
        b[l] = std::sqrt((double)params.n * alloc.p[l]) / tau;

    double acc = 0.0, acc2 = 0.0;
    const double invL = 1.0 / (double)params.L;
    for_each_sample(params.M, mc, [&](const double* t) {
        // t[j] = Z_{j+1} - Z_1, so max_j Z_j - Z_1 = max_j t[j]; the correct
        // column loses section l exactly when that gap exceeds b_l.
        double gap = t[0];
        for (uint32_t j = 1; j + 1 < params.M; ++j) gap = std::max(gap, t[j]);
        size_t lost = 0;
        for (uint32_t l = 0; l < params.L; ++l)
            if (b[l] < gap) ++lost;
        const double v = (double)lost * invL;
        acc += v;
        acc2 += v * v;
    });
    const double S = (double)mc.samples;
    const double ser = acc / S;
    const double var = std::max(0.0, acc2 / S - ser * ser);
    return {ser, S > 1 ? std::sqrt(var / (S - 1)) : 0.0};
}

McEstimate se_predicted_ser(const SeTrace& trace, const CodeParams& params,
                            const PowerAllocation& alloc, const McConfig& mc) {
    require(trace.T < trace.tau2.size(), ErrorCode::InvalidArgument,
            "se_predicted_ser: incomplete trace");
    return se_predicted_ser(trace.tau2[trace.T], params, alloc, mc);
}

} // namespace sparc
