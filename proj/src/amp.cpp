#include "sparc/amp.hpp"

#include <cmath>

#include "sparc/stats.hpp"

namespace sparc {

namespace {

// Denoiser into a caller buffer; returns ||out||^2. Throws on numeric
// breakdown (NaN input, section sums drifting) instead of renormalizing.
double eta_into(const double* s, double tau2, const CodeParams& params,
                const PowerAllocation& alloc, double* out) {
    require(tau2 > 0.0 && std::isfinite(tau2), ErrorCode::InvalidArgument,
            "eta: tau2 must be positive");
    const uint32_t M = params.M;
    double norm2 = 0.0;
    for (uint32_t l = 0; l < params.L; ++l) {
        const double* ss = s + (size_t)l * M;
        double* oo = out + (size_t)l * M;
        const double root = std::sqrt((double)params.n * alloc.p[l]);
        const double b = root / tau2;
        double m = ss[0];
        for (uint32_t j = 1; j < M; ++j)
            if (ss[j] > m) m = ss[j];
        double sum = 0.0;
        for (uint32_t j = 0; j < M; ++j) {
            const double w = std::exp(b * (ss[j] - m));
            oo[j] = w;
            sum += w;
        }
        const double scale = root / sum;
        double check = 0.0;
        for (uint32_t j = 0; j < M; ++j) {
            oo[j] *= scale;
            check += oo[j];
            norm2 += oo[j] * oo[j];
        }
        require(std::isfinite(check) && std::fabs(check - root) <= 1e-6 * root,
                ErrorCode::Numeric, "eta: section sum drifted from sqrt(n P_l)");
    }
    return norm2;
}

} // namespace

BetaVector eta(const BetaVector& s, double tau2, const CodeParams& params,
               const PowerAllocation& alloc) {
    require(s.size() == params.N(), ErrorCode::InvalidArgument, "eta: dimension mismatch");
    BetaVector out(s.size());
    eta_into(s.data(), tau2, params, alloc, out.data());
    return out;
}

AmpState initial_amp_state(const CodeParams& params) {
    AmpState st;
    st.beta.assign(params.N(), 0.0);
    return st;
}

AmpState amp_step(const AmpState& st, const DesignMatrix& A, const std::vector<double>& y,
                  double tau2_t, const CodeParams& params, const PowerAllocation& alloc,
                  bool onsager) {
    const int32_t t = st.t + 1;
    const uint64_t n = params.n;
    AmpState nx;
    nx.t = t;
    nx.tau2 = tau2_t;

    if (t == 0) {
        nx.z = y;
        nx.lambda = 0.0;
    } else {
        std::vector<double> Abeta = A.apply(st.beta);
        double bn2 = 0.0;
        for (double v : st.beta) bn2 += v * v;
        const double coef = (params.P - bn2 / (double)n) / st.tau2;
        nx.lambda = -coef;
        nx.z.resize(n);
        for (uint64_t i = 0; i < n; ++i)
            nx.z[i] = y[i] - Abeta[i] + (onsager ? coef * st.z[i] : 0.0);
    }

    nx.s = A.apply_transpose(nx.z);
    for (uint64_t j = 0; j < params.N(); ++j) nx.s[j] += st.beta[j];
    nx.beta.resize(params.N());
    eta_into(nx.s.data(), tau2_t, params, alloc, nx.beta.data());
    return nx;
}

DecodeResult run_decoder(const DesignMatrix& A, const std::vector<double>& y,
                         const CodeParams& params, const PowerAllocation& alloc,
                         const DecoderConfig& cfg, const BetaVector* truth) {
    require(cfg.T >= 1, ErrorCode::InvalidArgument, "decoder: T must be >= 1");
    require(y.size() == params.n, ErrorCode::InvalidArgument, "decoder: y has wrong length");
    if (cfg.tau_mode == TauMode::SePrecomputed)
        require(cfg.tau2_schedule.size() >= cfg.T, ErrorCode::InvalidArgument,
                "decoder: tau schedule shorter than T");

    const uint64_t n = params.n;
    const uint64_t N = params.N();
    const double invn = 1.0 / (double)n;

    std::vector<double> beta(N, 0.0), z(n), s(N), Abeta(n);
    double beta_norm2 = 0.0;
    double tau2_prev = 0.0;

    DecodeResult res;
    Diagnostics& d = res.diag;
    auto record_beta_stats = [&](const std::vector<double>& b) {
        if (!truth) return;
        double q2 = 0.0, dot = 0.0;
        for (uint64_t j = 0; j < N; ++j) {
            const double e = b[j] - (*truth)[j];
            q2 += e * e;
            dot += b[j] * (*truth)[j];
        }
        d.mse.push_back(q2 * invn);
        d.overlap.push_back(dot / ((double)n * params.P));
    };
    record_beta_stats(beta);

    for (uint32_t t = 0; t < cfg.T; ++t) {
        if (t == 0) {
            z = y;
            d.lambda.push_back(0.0);
        } else {
            A.apply(beta.data(), Abeta.data());
            const double coef = (params.P - beta_norm2 * invn) / tau2_prev;
            d.lambda.push_back(-coef);
            for (uint64_t i = 0; i < n; ++i)
                z[i] = y[i] - Abeta[i] + (cfg.onsager ? coef * z[i] : 0.0);
        }
        double z2 = 0.0;
        for (uint64_t i = 0; i < n; ++i) z2 += z[i] * z[i];
        d.tau2_online.push_back(z2 * invn);

        const double tau2_t =
            cfg.tau_mode == TauMode::Online ? z2 * invn : cfg.tau2_schedule[t];
        require(tau2_t > 0.0 && std::isfinite(tau2_t), ErrorCode::Numeric,
                "decoder: non-positive tau2 in schedule");
        d.tau2_used.push_back(tau2_t);

        A.apply_transpose(z.data(), s.data());
        for (uint64_t j = 0; j < N; ++j) s[j] += beta[j];

        if (truth && cfg.capture_s_stats_at == (int32_t)t) {
            std::vector<double> e(N);
            for (uint64_t j = 0; j < N; ++j) e[j] = s[j] - (*truth)[j];
            d.s_stats.present = true;
            d.s_stats.t = (int32_t)t;
            d.s_stats.stddev = sample_std(e);
            const double sd = d.s_stats.stddev > 0 ? d.s_stats.stddev : 1.0;
            for (double& v : e) v /= sd;
            d.s_stats.ks = ks_vs_normal(std::move(e));
        }

        beta_norm2 = eta_into(s.data(), tau2_t, params, alloc, beta.data());
        tau2_prev = tau2_t;
        record_beta_stats(beta);
    }

    res.beta = std::move(beta);
    auto hd = hard_decision(res.beta, params, alloc);
    res.decoded = std::move(hd.first);
    res.beta_hard = std::move(hd.second);
    return res;
}

std::pair<Message, BetaVector> hard_decision(const BetaVector& beta, const CodeParams& params,
                                             const PowerAllocation& alloc) {
    require(beta.size() == params.N(), ErrorCode::InvalidArgument,
            "hard_decision: dimension mismatch");
    Message msg;
    msg.sections.resize(params.L);
    BetaVector hard(beta.size(), 0.0);
    for (uint32_t l = 0; l < params.L; ++l) {
        const double* sec = beta.data() + (size_t)l * params.M;
        uint32_t best = 0;
        for (uint32_t j = 1; j < params.M; ++j)
            if (sec[j] > sec[best]) best = j;
        msg.sections[l] = best;
        hard[(size_t)l * params.M + best] = std::sqrt((double)params.n * alloc.p[l]);
    }
    return {std::move(msg), std::move(hard)};
}

double section_error_rate(const Message& decoded, const Message& truth) {
    require(decoded.sections.size() == truth.sections.size(), ErrorCode::InvalidArgument,
            "section_error_rate: length mismatch");
    size_t bad = 0;
    for (size_t l = 0; l < truth.sections.size(); ++l)
        if (decoded.sections[l] != truth.sections[l]) ++bad;
    return truth.sections.empty() ? 0.0 : (double)bad / (double)truth.sections.size();
}

} // namespace sparc
