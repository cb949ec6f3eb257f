// Command-line front end: JSON config in, CSV/JSON experiment artifacts out.
// All numerics live behind the shared library's C interface; this file only
// parses, dispatches, and serializes. Exit codes: 0 success, 1 usage or
// config error, 2 mathematical precondition failure, 3 numeric failure.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparc.h"

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Resolved {
    uint32_t L = 0, M = 0;
    double R_nats = 0.0, P = 0.0, sigma2 = 0.0;

    std::string kind = "dense";
    bool fresh_per_trial = true;
    uint64_t memory_cap_bytes = 0; // 0 = library default

    std::string tau_mode = "se";
    uint32_t T_override = 0;

    uint64_t mc_samples = 100000;
    uint64_t mc_seed = 1;

    uint32_t num_trials = 100;
    uint64_t master_seed = 1;
    std::vector<double> epsilon_list;
    uint32_t parallelism = 1;

    double kappa2 = 1.0, kappa3 = 1.0, alpha = 0.5, upsilon = 1.0;
    double c_small = 1.0, C_big = 1.0;

    std::string format = "csv";
    std::string path;
};

[[noreturn]] void fail_field(const std::string& where, const std::string& what) {
    throw ConfigError("config field " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail_field(where, "must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) fail_field(where + "." + it.key(), "unknown field");
    }
}

double get_real(const json& obj, const std::string& where, const char* key, double fallback,
                bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail_field(where + "." + key, "missing");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail_field(where + "." + key, "must be a number");
    return v.get<double>();
}

uint64_t get_uint(const json& obj, const std::string& where, const char* key, uint64_t fallback,
                  bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail_field(where + "." + key, "missing");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) fail_field(where + "." + key, "must be a non-negative integer");
    return v.get<uint64_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail_field(where + "." + key, "must be true or false");
    return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& where, const char* key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail_field(where + "." + key, "must be a string");
    return v.get<std::string>();
}

Resolved resolve_config(const json& root) {
    Resolved r;
    check_keys(root, "config",
               {"code", "matrix", "decoder", "se", "sim", "constants", "output"});
    if (!root.contains("code")) fail_field("code", "missing");

    const json& code = root.at("code");
    check_keys(code, "code", {"L", "M", "R_bits", "R_nats", "snr", "P", "sigma2"});
    r.L = (uint32_t)get_uint(code, "code", "L", 0, true);
    r.M = (uint32_t)get_uint(code, "code", "M", 0, true);
    const bool has_bits = code.contains("R_bits"), has_nats = code.contains("R_nats");
    if (has_bits == has_nats) fail_field("code", "exactly one of R_bits/R_nats is required");
    r.R_nats = has_nats ? get_real(code, "code", "R_nats", 0.0, true)
                        : get_real(code, "code", "R_bits", 0.0, true) * M_LN2;
    const bool has_snr = code.contains("snr");
    const bool has_ps = code.contains("P") || code.contains("sigma2");
    if (has_snr == (code.contains("P") && code.contains("sigma2")) || (has_snr && has_ps))
        fail_field("code", "exactly one of snr or the (P, sigma2) pair is required");
    if (has_snr) {
        r.P = get_real(code, "code", "snr", 0.0, true);
        r.sigma2 = 1.0;
    } else {
        r.P = get_real(code, "code", "P", 0.0, true);
        r.sigma2 = get_real(code, "code", "sigma2", 0.0, true);
    }

    const json empty = json::object();
    const json& matrix = root.contains("matrix") ? root.at("matrix") : empty;
    check_keys(matrix, "matrix", {"kind", "fresh_per_trial", "memory_cap_bytes"});
    r.kind = get_str(matrix, "matrix", "kind", "dense");
    if (r.kind != "dense" && r.kind != "implicit")
        fail_field("matrix.kind", "must be \"dense\" or \"implicit\"");
    r.fresh_per_trial = get_bool(matrix, "matrix", "fresh_per_trial", true);
    r.memory_cap_bytes = get_uint(matrix, "matrix", "memory_cap_bytes", 0);

    const json& decoder = root.contains("decoder") ? root.at("decoder") : empty;
    check_keys(decoder, "decoder", {"tau_mode", "T_override"});
    r.tau_mode = get_str(decoder, "decoder", "tau_mode", "se");
    if (r.tau_mode != "se" && r.tau_mode != "online")
        fail_field("decoder.tau_mode", "must be \"se\" or \"online\"");
    r.T_override = (uint32_t)get_uint(decoder, "decoder", "T_override", 0);

    const json& se = root.contains("se") ? root.at("se") : empty;
    check_keys(se, "se", {"mc_samples", "seed"});
    r.mc_samples = get_uint(se, "se", "mc_samples", r.mc_samples);
    if (r.mc_samples == 0) fail_field("se.mc_samples", "must be positive");
    r.mc_seed = get_uint(se, "se", "seed", r.mc_seed);

    const json& sim = root.contains("sim") ? root.at("sim") : empty;
    check_keys(sim, "sim", {"num_trials", "master_seed", "epsilon_list", "parallelism"});
    r.num_trials = (uint32_t)get_uint(sim, "sim", "num_trials", r.num_trials);
    r.master_seed = get_uint(sim, "sim", "master_seed", r.master_seed);
    r.parallelism = (uint32_t)get_uint(sim, "sim", "parallelism", r.parallelism);
    if (r.parallelism == 0) fail_field("sim.parallelism", "must be positive");
    if (sim.contains("epsilon_list")) {
        const json& eps = sim.at("epsilon_list");
        if (!eps.is_array()) fail_field("sim.epsilon_list", "must be an array of numbers");
        for (const json& e : eps) {
            if (!e.is_number()) fail_field("sim.epsilon_list", "must be an array of numbers");
            r.epsilon_list.push_back(e.get<double>());
        }
    }

    const json& constants = root.contains("constants") ? root.at("constants") : empty;
    check_keys(constants, "constants",
               {"kappa2", "kappa3", "alpha", "upsilon", "c_small", "C_big"});
    r.kappa2 = get_real(constants, "constants", "kappa2", r.kappa2);
    r.kappa3 = get_real(constants, "constants", "kappa3", r.kappa3);
    r.alpha = get_real(constants, "constants", "alpha", r.alpha);
    r.upsilon = get_real(constants, "constants", "upsilon", r.upsilon);
    r.c_small = get_real(constants, "constants", "c_small", r.c_small);
    r.C_big = get_real(constants, "constants", "C_big", r.C_big);
    if (r.kappa2 <= 0 || r.kappa3 <= 0 || r.upsilon <= 0 || r.c_small <= 0 || r.C_big <= 0)
        fail_field("constants", "kappa2, kappa3, upsilon, c_small, C_big must be positive");
    if (r.alpha < 0 || r.alpha >= 1) fail_field("constants.alpha", "must be in [0,1)");

    const json& output = root.contains("output") ? root.at("output") : empty;
    check_keys(output, "output", {"format", "path"});
    r.format = get_str(output, "output", "format", "csv");
    if (r.format != "csv" && r.format != "json")
        fail_field("output.format", "must be \"csv\" or \"json\"");
    r.path = get_str(output, "output", "path", "");
    return r;
}

Resolved load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return resolve_config(root);
}

// The provenance block embedded in every output. Excludes the output path
// and the parallelism level: neither changes any computed number, and reruns
// at different parallelism must stay byte-identical.
ordered_json config_echo(const Resolved& r, const sparc_code* code) {
    ordered_json e;
    e["code"] = {{"L", r.L},
                 {"M", r.M},
                 {"n", sparc_code_n(code)},
                 {"R_nats", r.R_nats},
                 {"R_bits", r.R_nats / M_LN2},
                 {"R_realized_nats", sparc_code_rate(code)},
                 {"P", r.P},
                 {"sigma2", r.sigma2}};
    e["matrix"] = {{"kind", r.kind},
                   {"fresh_per_trial", r.fresh_per_trial},
                   {"memory_cap_bytes", r.memory_cap_bytes}};
    e["decoder"] = {{"tau_mode", r.tau_mode}, {"T_override", r.T_override}};
    e["se"] = {{"mc_samples", r.mc_samples}, {"seed", r.mc_seed}};
    e["sim"] = {{"num_trials", r.num_trials},
                {"master_seed", r.master_seed},
                {"epsilon_list", r.epsilon_list}};
    e["constants"] = {{"kappa2", r.kappa2},   {"kappa3", r.kappa3},
                      {"alpha", r.alpha},     {"upsilon", r.upsilon},
                      {"c_small", r.c_small}, {"C_big", r.C_big}};
    e["output"] = {{"format", r.format}};
    return e;
}

std::string fmt_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string preamble(const ordered_json& echo) {
    return std::string("# sparc-version: ") + sparc_version() + "\n# config: " + echo.dump() +
           "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

std::string sibling_json_path(const std::string& csv_path) {
    const size_t dot = csv_path.find_last_of('.');
    const size_t slash = csv_path.find_last_of('/');
    std::string stem = csv_path;
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem = csv_path.substr(0, dot);
    std::string out = stem + ".json";
    if (out == csv_path) out = csv_path + ".agg.json";
    return out;
}

int exit_for(sparc_status s) {
    switch (s) {
        case SPARC_OK: return 0;
        case SPARC_ERR_INVALID_ARGUMENT:
        case SPARC_ERR_MEMORY: return 1;
        case SPARC_ERR_PRECONDITION:
        case SPARC_ERR_NONCONVERGENCE: return 2;
        default: return 3;
    }
}

[[noreturn]] void die(sparc_status s, const std::string& context) {
    std::fprintf(stderr, "sparc: %s: %s (%s)\n", context.c_str(), sparc_last_error(),
                 sparc_strerror(s));
    std::exit(exit_for(s));
}

struct CodeHandle {
    sparc_code* p = nullptr;
    ~CodeHandle() { sparc_code_free(p); }
};

struct TraceHandle {
    sparc_se_trace* p = nullptr;
    ~TraceHandle() { sparc_se_trace_free(p); }
};

void make_code(const Resolved& r, CodeHandle& code) {
    const sparc_status s =
        sparc_code_create(r.L, r.M, r.R_nats, r.P, r.sigma2, &code.p);
    if (s != SPARC_OK) die(s, "building code parameters");
}

void run_se(const Resolved& r, const CodeHandle& code, TraceHandle& trace) {
    const sparc_status s =
        sparc_se_run(code.p, r.mc_samples, r.mc_seed, 0, r.kappa2, &trace.p);
    if (s != SPARC_OK) die(s, "state evolution");
}

std::vector<double> trace_column(const TraceHandle& trace, const char* name) {
    std::vector<double> col(sparc_se_trace_len(trace.p));
    const sparc_status s = sparc_se_trace_column(trace.p, name, col.data(), col.size());
    if (s != SPARC_OK) die(s, "reading trace");
    return col;
}

const std::string& require_path(const Resolved& r) {
    if (r.path.empty())
        throw ConfigError("no output path: set output.path in the config or pass --out");
    return r.path;
}

int cmd_se(const Resolved& r) {
    CodeHandle code;
    make_code(r, code);
    TraceHandle trace;
    run_se(r, code, trace);

    const auto x = trace_column(trace, "x");
    const auto tau2 = trace_column(trace, "tau2");
    const auto sigma2_t = trace_column(trace, "sigma2_t");
    const auto sigma_perp2 = trace_column(trace, "sigma_perp2");
    const auto tau_perp2 = trace_column(trace, "tau_perp2");
    const ordered_json echo = config_echo(r, code.p);

    double delta_r_min = NAN;
    (void)sparc_delta_r_min((double)r.M, r.kappa2, &delta_r_min);
    double chi1 = NAN, chi = NAN;
    (void)sparc_chi_increments(code.p, r.kappa2, 0.0, &chi1, &chi);
    const double f_r = sparc_se_trace_f_r(trace.p);
    const double delta_r = sparc_se_trace_delta_r(trace.p);
    const uint32_t T = sparc_se_trace_T(trace.p);

    if (r.format == "json") {
        ordered_json out;
        out["version"] = sparc_version();
        out["config"] = echo;
        out["trace"] = {{"x_t", x},
                        {"tau2_t", tau2},
                        {"sigma2_t", sigma2_t},
                        {"sigma_perp2_t", sigma_perp2},
                        {"tau_perp2_t", tau_perp2}};
        out["T"] = T;
        out["f_R"] = f_r;
        out["delta_R"] = delta_r;
        out["delta_R_min"] = delta_r_min;
        out["chi"] = chi;
        out["chi1"] = chi1;
        out["eq18_ok"] = sparc_se_trace_eq18_ok(trace.p) != 0;
        out["stopped_on_floor"] = sparc_se_trace_stopped_on_floor(trace.p) != 0;
        out["evaluator"] = sparc_se_trace_evaluator(trace.p);
        write_file(require_path(r), out.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << preamble(echo);
        csv << "t,x_t,tau2_t,sigma2_t,sigma_perp2_t,tau_perp2_t\n";
        for (size_t t = 0; t < x.size(); ++t)
            csv << t << ',' << fmt_real(x[t]) << ',' << fmt_real(tau2[t]) << ','
                << fmt_real(sigma2_t[t]) << ',' << fmt_real(sigma_perp2[t]) << ','
                << fmt_real(tau_perp2[t]) << '\n';
        csv << "# T=" << T << '\n';
        csv << "# f_R=" << fmt_real(f_r) << '\n';
        csv << "# delta_R=" << fmt_real(delta_r) << '\n';
        csv << "# delta_R_min=" << fmt_real(delta_r_min) << '\n';
        csv << "# chi=" << fmt_real(chi) << '\n';
        csv << "# chi1=" << fmt_real(chi1) << '\n';
        write_file(require_path(r), csv.str());
    }
    return sparc_se_trace_eq18_ok(trace.p) ? 0 : 2;
}

int cmd_sim(const Resolved& r) {
    CodeHandle code;
    make_code(r, code);
    TraceHandle trace;
    run_se(r, code, trace);

    sparc_sim_options opt = {};
    opt.master_seed = r.master_seed;
    opt.num_trials = r.num_trials;
    opt.parallelism = r.parallelism;
    opt.fresh_matrix = r.fresh_per_trial ? 1 : 0;
    opt.implicit_matrix = r.kind == "implicit" ? 1 : 0;
    opt.tau_online = r.tau_mode == "online" ? 1 : 0;
    opt.T_override = r.T_override;
    opt.mem_cap_bytes = r.memory_cap_bytes;
    opt.epsilons = r.epsilon_list.data();
    opt.num_epsilons = (uint32_t)r.epsilon_list.size();
    sparc_sim_result* result = nullptr;
    const sparc_status s = sparc_sim_run(code.p, trace.p, &opt, &result);
    if (s != SPARC_OK) die(s, "simulation");

    const uint32_t trials = sparc_sim_num_trials(result);
    const uint32_t T_eff = opt.T_override > 0 ? opt.T_override : sparc_se_trace_T(trace.p);
    const ordered_json echo = config_echo(r, code.p);

    std::ostringstream csv;
    csv << preamble(echo);
    csv << "trial,seed,ser,decoded_ok";
    for (uint32_t t = 0; t <= T_eff; ++t) csv << ",mse_" << t;
    csv << '\n';
    std::vector<double> mse(T_eff + 1);
    for (uint32_t i = 0; i < trials; ++i) {
        uint64_t seed = 0;
        double ser = 0.0;
        int ok = 0, failed = 0;
        sparc_sim_trial(result, i, &seed, &ser, &ok, &failed);
        std::fill(mse.begin(), mse.end(), NAN);
        if (!failed && sparc_sim_trial_mse_len(result, i) == mse.size())
            sparc_sim_trial_mse(result, i, mse.data(), mse.size());
        csv << i << ',' << seed << ',' << (failed ? "nan" : fmt_real(ser)) << ','
            << (failed ? 0 : ok);
        for (double v : mse) csv << ',' << fmt_real(v);
        csv << '\n';
    }
    const std::string& csv_path = require_path(r);
    write_file(csv_path, csv.str());

    double pred = NAN, pred_se = NAN;
    (void)sparc_se_predicted_ser(code.p, trace.p, r.mc_samples, r.mc_seed, &pred, &pred_se);

    ordered_json agg;
    agg["version"] = sparc_version();
    agg["config"] = echo;
    agg["n"] = sparc_code_n(code.p);
    agg["T"] = T_eff;
    agg["num_trials"] = trials;
    agg["num_failed"] = sparc_sim_num_failed(result);
    agg["mean_ser"] = sparc_sim_mean_ser(result);
    agg["std_err_ser"] = sparc_sim_std_err_ser(result);
    agg["epsilon_list"] = r.epsilon_list;
    std::vector<double> fractions;
    for (uint32_t j = 0; j < r.epsilon_list.size(); ++j) {
        double f = 0.0;
        sparc_sim_deviation_fraction(result, j, &f);
        fractions.push_back(f);
    }
    agg["deviation_fractions"] = fractions;
    agg["se_predicted_ser"] = pred;
    agg["se_predicted_std_err"] = pred_se;
    write_file(sibling_json_path(csv_path), agg.dump(2) + "\n");

    const uint64_t failed = sparc_sim_num_failed(result);
    sparc_sim_result_free(result);
    return failed * 100 > trials ? 3 : 0;
}

int cmd_sweep(const Resolved& r, const std::vector<uint32_t>& grid) {
    CodeHandle code;
    make_code(r, code); // validates the base config; echo carries its fields

    sparc_sweep_options opt = {};
    opt.L = r.L;
    opt.R_nats = r.R_nats;
    opt.P = r.P;
    opt.sigma2 = r.sigma2;
    opt.M_grid = grid.data();
    opt.grid_len = (uint32_t)grid.size();
    opt.num_trials = r.num_trials;
    opt.parallelism = r.parallelism;
    opt.master_seed = r.master_seed;
    opt.mc_samples = r.mc_samples;
    opt.mc_seed = r.mc_seed;
    opt.fresh_matrix = r.fresh_per_trial ? 1 : 0;
    opt.implicit_matrix = r.kind == "implicit" ? 1 : 0;
    opt.mem_cap_bytes = r.memory_cap_bytes;
    sparc_sweep_result* result = nullptr;
    const sparc_status s = sparc_sweep_run(&opt, &result);
    if (s != SPARC_OK) die(s, "M sweep");

    const ordered_json echo = config_echo(r, code.p);
    uint64_t worst_failed = 0;
    const uint32_t len = sparc_sweep_len(result);

    if (r.format == "json") {
        ordered_json out;
        out["version"] = sparc_version();
        out["config"] = echo;
        ordered_json points = ordered_json::array();
        for (uint32_t i = 0; i < len; ++i) {
            uint32_t M = 0, T = 0, num_trials = 0;
            uint64_t n = 0, num_failed = 0;
            double mean = 0, se = 0, pred = 0;
            sparc_sweep_point(result, i, &M, &n, &T, &num_trials, &num_failed, &mean, &se,
                              &pred);
            worst_failed = std::max(worst_failed, num_failed);
            points.push_back({{"M", M},
                              {"n", n},
                              {"T", T},
                              {"num_trials", num_trials},
                              {"num_failed", num_failed},
                              {"mean_ser", mean},
                              {"std_err_ser", se},
                              {"se_predicted_ser", pred}});
        }
        out["points"] = points;
        write_file(require_path(r), out.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << preamble(echo);
        csv << "M,n,T,num_trials,mean_ser,std_err_ser,se_predicted_ser\n";
        for (uint32_t i = 0; i < len; ++i) {
            uint32_t M = 0, T = 0, num_trials = 0;
            uint64_t n = 0, num_failed = 0;
            double mean = 0, se = 0, pred = 0;
            sparc_sweep_point(result, i, &M, &n, &T, &num_trials, &num_failed, &mean, &se,
                              &pred);
            worst_failed = std::max(worst_failed, num_failed);
            csv << M << ',' << n << ',' << T << ',' << num_trials << ',' << fmt_real(mean)
                << ',' << fmt_real(se) << ',' << fmt_real(pred) << '\n';
        }
        write_file(require_path(r), csv.str());
    }
    sparc_sweep_result_free(result);
    return worst_failed * 100 > r.num_trials ? 3 : 0;
}

int cmd_bounds(const Resolved& r, uint32_t T, double epsilon) {
    CodeHandle code;
    make_code(r, code);
    const double delta_r = sparc_code_delta_r(code.p);

    double f_r = NAN;
    sparc_status s = sparc_f_r((double)r.M, delta_r, r.kappa2, &f_r);
    if (s != SPARC_OK) die(s, "target error rate f_R (is the rate below capacity?)");

    double bound = NAN, log_bound = NAN, K_T = NAN, kappa_T = NAN;
    int vacuous = 0;
    s = sparc_theorem1_bound(code.p, T, f_r, epsilon, r.c_small, r.C_big, &bound, &log_bound,
                             &vacuous, &K_T, &kappa_T);
    if (s == SPARC_ERR_PRECONDITION) {
        const double snr = sparc_code_snr(code.p);
        const double threshold = 2.0 * snr / sparc_code_capacity(code.p) * f_r;
        std::fprintf(stderr,
                     "sparc: epsilon %.17g is at or below the bound's threshold %.17g "
                     "(2 snr / C * f_R); the bound does not apply\n",
                     epsilon, threshold);
        return 2;
    }
    if (s != SPARC_OK) die(s, "deviation bound");

    ordered_json out;
    out["version"] = sparc_version();
    out["config"] = config_echo(r, code.p);
    out["annotation"] = "bound holds up to the unspecified universal constants c, C";
    out["T"] = T;
    out["epsilon"] = epsilon;
    out["delta_R"] = delta_r;
    out["f_R"] = f_r;
    out["bound"] = bound;
    out["log_bound"] = log_bound;
    out["vacuous_flag"] = vacuous != 0;
    out["K_T"] = K_T;
    out["kappa_T"] = kappa_T;

    char order[64] = {0};
    double Ls = NAN, Ms = NAN, factor = NAN;
    ordered_json scales;
    if (sparc_exponent_scale(sparc_code_n(code.p), 0, 1.0, r.R_nats, T, &Ls, &Ms, &factor,
                             order, sizeof order) == SPARC_OK)
        scales["M_eq_L_pow_a"] = {{"a", 1.0},
                                  {"L", Ls},
                                  {"M", Ms},
                                  {"exponent_factor", factor},
                                  {"exponent_order", order}};
    if (sparc_exponent_scale(sparc_code_n(code.p), 1, 1.0, r.R_nats, T, &Ls, &Ms, &factor,
                             order, sizeof order) == SPARC_OK)
        scales["L_eq_kn_over_loglog"] = {{"k", 1.0},
                                         {"L", Ls},
                                         {"M", Ms},
                                         {"exponent_factor", factor},
                                         {"exponent_order", order}};
    out["exponent_scale"] = scales;

    double dmin = NAN, f_min = NAN, T_up = NAN;
    ordered_json gap;
    if (sparc_capacity_gap((double)r.M, r.kappa2, code.p, &dmin, &f_min, &T_up) == SPARC_OK) {
        gap = {{"delta_R_min", dmin}, {"f_R_at_min", f_min}, {"T_upper", T_up}};
    } else {
        gap = {{"error", sparc_last_error()}};
    }
    out["capacity_gap"] = gap;
    write_file(require_path(r), out.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse superposition codes: state evolution, AMP simulation, and bounds"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    uint64_t seed_override = 0;
    uint32_t trials_override = 0, parallelism_override = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* sub, bool sim_flags) {
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_path, "output path (overrides output.path)");
        if (sim_flags) {
            sub->add_option("--seed", seed_override, "overrides sim.master_seed")
                ->each([&](const std::string&) { has_seed = true; });
            sub->add_option("--trials", trials_override, "overrides sim.num_trials");
            sub->add_option("--parallelism", parallelism_override,
                            "overrides sim.parallelism");
        }
    };

    CLI::App* se = app.add_subcommand("se", "state evolution table");
    add_common(se, false);
    CLI::App* sim = app.add_subcommand("sim", "Monte Carlo decoder trials");
    add_common(sim, true);
    CLI::App* sweep = app.add_subcommand("sweep", "error rates across an M grid");
    add_common(sweep, true);
    std::string grid_arg = "64,128,256,512";
    sweep->add_option("--M-grid", grid_arg, "comma-separated powers of two");
    CLI::App* bounds = app.add_subcommand("bounds", "finite-length deviation bound");
    add_common(bounds, false);
    uint32_t bound_T = 1;
    double bound_epsilon = 0.0;
    bounds->add_option("--T", bound_T, "iterations the bound is evaluated at");
    bounds->add_option("--epsilon", bound_epsilon, "deviation threshold")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        Resolved r = load_config(config_path);
        if (!out_path.empty()) r.path = out_path;
        if (has_seed) r.master_seed = seed_override;
        if (trials_override > 0) r.num_trials = trials_override;
        if (parallelism_override > 0) r.parallelism = parallelism_override;

        if (se->parsed()) return cmd_se(r);
        if (sim->parsed()) return cmd_sim(r);
        if (sweep->parsed()) {
            std::vector<uint32_t> grid;
            std::stringstream ss(grid_arg);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                try {
                    grid.push_back((uint32_t)std::stoul(tok));
                } catch (const std::exception&) {
                    throw ConfigError("bad --M-grid entry: " + tok);
                }
            }
            return cmd_sweep(r, grid);
        }
        if (bounds->parsed()) return cmd_bounds(r, bound_T, bound_epsilon);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "sparc: %s\n", e.what());
        return 1;
    }
    return 1;
}
