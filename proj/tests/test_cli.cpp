#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string tmp_dir() {
    static std::string dir = [] {
        char tmpl[] = "/tmp/sparc_cli_XXXXXX";
        const char* d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

std::string path_in(const std::string& name) { return tmp_dir() + "/" + name; }

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool file_exists(const std::string& path) {
    struct stat st;
    return stat(path.c_str(), &st) == 0;
}

// Runs the CLI, captures exit code; stdout/stderr land in fixed scratch files.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPARC_CLI_PATH) + " " + args + " >" +
                            path_in("stdout.txt") + " 2>" + path_in("stderr.txt");
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string last_stderr() { return slurp(path_in("stderr.txt")); }

std::vector<std::string> data_lines(const std::string& content) {
    std::vector<std::string> out;
    std::istringstream ss(content);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

const char* kSeConfig = R"({
  "code": {"L": 16, "M": 16, "R_nats": 0.5, "snr": 15.0},
  "se": {"mc_samples": 5000, "seed": 1}
})";

const char* kSimConfig = R"({
  "code": {"L": 8, "M": 8, "R_nats": 0.3, "P": 16.0, "sigma2": 0.0},
  "se": {"mc_samples": 5000, "seed": 1},
  "sim": {"num_trials": 6, "master_seed": 5, "epsilon_list": [0.0, 0.5]}
})";

} // namespace

TEST_CASE("se writes the table with the exact header and footer") {
    const std::string cfg = path_in("se.json");
    const std::string out = path_in("se_table.csv");
    write(cfg, kSeConfig);
    CHECK(run_cli("se --config " + cfg + " --out " + out) == 0);
    const std::string table = slurp(out);
    REQUIRE(!table.empty());
    std::istringstream ss(table);
    std::string line;
    std::getline(ss, line);
    CHECK(line == std::string("# sparc-version: 1.0.0"));
    std::getline(ss, line);
    CHECK(line.rfind("# config: ", 0) == 0);
    std::getline(ss, line);
    CHECK(line == "t,x_t,tau2_t,sigma2_t,sigma_perp2_t,tau_perp2_t");
    std::getline(ss, line);
    CHECK(line == "0,0,16,15,15,16"); // x_0 = 0, tau2_0 = P + sigma2 = 16
    CHECK(table.find("# T=") != std::string::npos);
    CHECK(table.find("# f_R=") != std::string::npos);
    CHECK(table.find("# delta_R=") != std::string::npos);
    CHECK(table.find("# delta_R_min=") != std::string::npos);
    CHECK(table.find("# chi=") != std::string::npos);
    CHECK(table.find("# chi1=") != std::string::npos);
    // The echoed config never carries the output path or parallelism.
    CHECK(table.find("parallelism") == std::string::npos);
    CHECK(table.find("se_table") == std::string::npos);

    // Rerunning into another file is byte-identical.
    const std::string out2 = path_in("se_table2.csv");
    CHECK(run_cli("se --config " + cfg + " --out " + out2) == 0);
    CHECK(slurp(out2) == table);
}

TEST_CASE("se emits json when asked") {
    const std::string cfg = path_in("se_json.json");
    const std::string out = path_in("se_trace.json");
    write(cfg, R"({
  "code": {"L": 16, "M": 16, "R_nats": 0.5, "snr": 15.0},
  "se": {"mc_samples": 5000, "seed": 1},
  "output": {"format": "json"}
})");
    CHECK(run_cli("se --config " + cfg + " --out " + out) == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc.at("version") == "1.0.0");
    CHECK(doc.at("eq18_ok") == true);
    CHECK(doc.at("trace").at("x_t")[0] == 0.0);
    CHECK(doc.at("trace").at("tau2_t")[0] == 16.0);
    CHECK(doc.at("T").get<uint32_t>() >= 1);
    CHECK(!doc.at("config").contains("sim_parallelism"));
    CHECK(doc.at("config").at("sim").contains("num_trials"));
    CHECK(!doc.at("config").at("sim").contains("parallelism"));
    CHECK(!doc.at("config").at("output").contains("path"));
}

TEST_CASE("se exits 2 when the admissibility condition fails but still writes the table") {
    const std::string cfg = path_in("se_floor.json");
    const std::string out = path_in("se_floor.csv");
    write(cfg, R"({
  "code": {"L": 16, "M": 64, "R_nats": 0.997, "snr": 11.1},
  "se": {"mc_samples": 5000, "seed": 1}
})");
    CHECK(run_cli("se --config " + cfg + " --out " + out) == 2);
    const std::string table = slurp(out);
    CHECK(table.find("t,x_t") != std::string::npos);
    CHECK(table.find("# f_R=") != std::string::npos);
}

TEST_CASE("rates at capacity exit 2 from state evolution") {
    const std::string cfg = path_in("se_cap.json");
    write(cfg, R"({
  "code": {"L": 8, "M": 16, "R_nats": 2.0, "snr": 7.0},
  "se": {"mc_samples": 1000, "seed": 1}
})");
    CHECK(run_cli("se --config " + cfg + " --out " + path_in("cap.csv")) == 2);
    CHECK(last_stderr().find("state evolution") != std::string::npos);
}

TEST_CASE("config problems exit 1 with a field diagnostic") {
    const std::string cfg = path_in("bad.json");
    write(cfg, R"({
  "code": {"L": 8, "M": 16, "R_nats": 0.5, "snr": 7.0, "bogus": 1}
})");
    CHECK(run_cli("se --config " + cfg + " --out " + path_in("x.csv")) == 1);
    CHECK(last_stderr().find("bogus") != std::string::npos);

    write(cfg, R"({"code": {"L": 8, "M": 16, "snr": 7.0}})");
    CHECK(run_cli("se --config " + cfg + " --out " + path_in("x.csv")) == 1);
    CHECK(last_stderr().find("R_bits") != std::string::npos);

    write(cfg, R"({"code": {"L": 8, "M": 16, "R_nats": 0.5, "snr": 7.0, "P": 1.0}})");
    CHECK(run_cli("se --config " + cfg + " --out " + path_in("x.csv")) == 1);

    CHECK(run_cli("se --config " + path_in("missing.json") + " --out " + path_in("x.csv")) == 1);
    CHECK(run_cli("se --config " + cfg) == 1); // valid flag set, no output path
    CHECK(run_cli("se") == 1);                 // --config is required
}

TEST_CASE("sim writes trials plus an aggregate that matches them") {
    const std::string cfg = path_in("sim.json");
    const std::string out = path_in("trials.csv");
    write(cfg, kSimConfig);
    CHECK(run_cli("sim --config " + cfg + " --out " + out) == 0);
    const std::string csv = slurp(out);
    const std::vector<std::string> rows = data_lines(csv);
    REQUIRE(rows.size() == 7); // header + 6 trials
    CHECK(rows[0].rfind("trial,seed,ser,decoded_ok,mse_0", 0) == 0);

    REQUIRE(file_exists(path_in("trials.json")));
    const json agg = json::parse(slurp(path_in("trials.json")));
    CHECK(agg.at("num_trials") == 6);
    CHECK(agg.at("num_failed") == 0);
    double sum = 0.0;
    for (size_t i = 1; i < rows.size(); ++i) {
        std::istringstream fields(rows[i]);
        std::string tok;
        std::getline(fields, tok, ','); // trial
        std::getline(fields, tok, ','); // seed
        std::getline(fields, tok, ','); // ser
        sum += std::stod(tok);
    }
    CHECK(std::abs(agg.at("mean_ser").get<double>() - sum / 6.0) < 1e-12);
    CHECK(agg.at("epsilon_list").size() == 2);
    CHECK(agg.at("deviation_fractions").size() == 2);
    CHECK(agg.at("se_predicted_ser").get<double>() >= 0.0);
    CHECK(agg.at("T").get<uint32_t>() >= 1);
}

TEST_CASE("sim output is byte-identical across parallelism and reruns") {
    const std::string cfg = path_in("sim_par.json");
    write(cfg, kSimConfig);
    const std::string a = path_in("par1.csv");
    const std::string b = path_in("par2.csv");
    CHECK(run_cli("sim --config " + cfg + " --out " + a + " --parallelism 1") == 0);
    CHECK(run_cli("sim --config " + cfg + " --out " + b + " --parallelism 3") == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(path_in("par1.json")) == slurp(path_in("par2.json")));
}

TEST_CASE("sim respects seed and trial overrides") {
    const std::string cfg = path_in("sim_seed.json");
    write(cfg, kSimConfig);
    const std::string a = path_in("seed_a.csv");
    const std::string b = path_in("seed_b.csv");
    const std::string c = path_in("seed_c.csv");
    CHECK(run_cli("sim --config " + cfg + " --out " + a + " --seed 99") == 0);
    CHECK(run_cli("sim --config " + cfg + " --out " + b + " --seed 99") == 0);
    CHECK(run_cli("sim --config " + cfg + " --out " + c + " --seed 100") == 0);
    CHECK(slurp(a) == slurp(b));
    // A different master seed moves the per-trial seeds.
    const std::vector<std::string> ra = data_lines(slurp(a));
    const std::vector<std::string> rc = data_lines(slurp(c));
    REQUIRE(ra.size() == rc.size());
    CHECK(ra[1] != rc[1]);

    const std::string d = path_in("seed_d.csv");
    CHECK(run_cli("sim --config " + cfg + " --out " + d + " --trials 3") == 0);
    CHECK(data_lines(slurp(d)).size() == 4); // header + 3 trials
}

TEST_CASE("sweep emits one row per grid point") {
    const std::string cfg = path_in("sweep.json");
    const std::string out = path_in("sweep.csv");
    write(cfg, R"({
  "code": {"L": 8, "M": 4, "R_nats": 0.69314718055994531, "snr": 15.0},
  "se": {"mc_samples": 5000, "seed": 1},
  "sim": {"num_trials": 4, "master_seed": 11}
})");
    CHECK(run_cli("sweep --config " + cfg + " --out " + out + " --M-grid 4,8") == 0);
    const std::vector<std::string> rows = data_lines(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "M,n,T,num_trials,mean_ser,std_err_ser,se_predicted_ser");
    CHECK(rows[1].rfind("4,", 0) == 0);
    CHECK(rows[2].rfind("8,", 0) == 0);
    // Byte-identical rerun at higher parallelism.
    const std::string out2 = path_in("sweep2.csv");
    CHECK(run_cli("sweep --config " + cfg + " --out " + out2 + " --M-grid 4,8 --parallelism 2") ==
          0);
    CHECK(slurp(out2) == slurp(out));
    // Bad grid entries are config errors.
    CHECK(run_cli("sweep --config " + cfg + " --out " + out2 + " --M-grid 4,oops") == 1);
}

TEST_CASE("bounds reports the bound with its annotation or exits 2 below threshold") {
    const std::string cfg = path_in("bounds.json");
    const std::string out = path_in("bounds_out.json");
    write(cfg, R"({
  "code": {"L": 8, "M": 4096, "R_nats": 0.41588830833596718, "snr": 15.0}
})");
    CHECK(run_cli("bounds --config " + cfg + " --out " + out + " --epsilon 0.5") == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc.at("annotation").get<std::string>().find("universal constants") !=
          std::string::npos);
    CHECK(doc.at("T") == 1);
    CHECK(doc.at("f_R").get<double>() > 0.0);
    CHECK(doc.at("bound").get<double>() > 0.0);
    CHECK(doc.at("log_bound").is_number());
    CHECK(doc.at("exponent_scale").contains("M_eq_L_pow_a"));
    CHECK(doc.at("exponent_scale").contains("L_eq_kn_over_loglog"));
    CHECK(doc.at("capacity_gap").contains("delta_R_min"));
    CHECK(doc.at("K_T") == 1.0);

    // T is settable.
    CHECK(run_cli("bounds --config " + cfg + " --out " + out + " --epsilon 0.5 --T 2") == 0);
    CHECK(json::parse(slurp(out)).at("T") == 2);

    // Below the threshold: exit 2, threshold printed, nothing claimed.
    CHECK(run_cli("bounds --config " + cfg + " --out " + out + " --epsilon 0.01") == 2);
    CHECK(last_stderr().find("threshold") != std::string::npos);

    // --epsilon is required.
    CHECK(run_cli("bounds --config " + cfg + " --out " + out) == 1);
}
