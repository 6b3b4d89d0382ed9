#include "critsense/xcli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

using namespace critsense;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("critsense_xcli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "critsense");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string config_field_of(const std::string& text) {
    try {
        parse_config(text).validate();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_CASE("config errors name the offending field") {
    CHECK(config_field_of(R"({"bogus": 1})") == "bogus");
    CHECK(config_field_of(R"({"model": {"kind": "tfim", "Jx": 1}})") == "model.Jx");
    CHECK(config_field_of(R"({"model": {"kind": "potts"}})") == "model.kind");
    CHECK(config_field_of(R"({"scenario": "qfi_scaling", "L_list": [8, "ten"]})") == "L_list[1]");
    CHECK(config_field_of(R"({"scenario": "qfi_scaling", "L_list": [8], "probes": ["squeezed"]})") == "probes[0]");
    CHECK(config_field_of(R"({"scenario": "qfi_scaling", "L_list": [8], "theta": {"spacing": "cubic"}})") ==
          "theta.spacing");
    CHECK(config_field_of(R"({"scenario": "channel_sweep", "L_list": [4]})") == "channel");
    CHECK(config_field_of(R"({"scenario": "channel_sweep", "L_list": [4], "channel": {"kind": "bitflip_x"},
                              "p_list": [0.7]})") == "p_list[0]");
    CHECK(config_field_of(R"({"scenario": "qfi_scaling", "L_list": [8], "seed": -3})") == "seed");
    CHECK(config_field_of("[1, 2") == "<document>");
    CHECK(config_field_of(R"({"scenario": "qfi_scaling", "L_list": [8]})").empty());
}

TEST_CASE("config round trip through canonical JSON") {
    const ExperimentConfig a = parse_config(R"({"scenario": "channel_sweep", "model": {"kind": "tfim", "L": 6},
        "channel": {"kind": "bitflip_x", "p": 0.1}, "L_list": [4, 6], "p_list": [0.1, 0.3], "beta_list": ["inf", 0.5],
        "seed": 17})");
    const ExperimentConfig b = parse_config(to_json(a));
    CHECK(to_json(a) == to_json(b));
    CHECK(config_hash(a) == config_hash(b));
    ExperimentConfig c = b;
    c.seed = 18;
    CHECK(config_hash(c) != config_hash(a));
    CHECK(std::isinf(b.beta_list[0]));
}

TEST_CASE("exit codes") {
    const fs::path d = scratch("exit");
    spit(d / "bad.json", R"({"scenario": "qfi_scaling", "L_list": [8], "probes": ["nope"]})");
    CHECK(invoke({"qfi_scaling", "--config", (d / "bad.json").string(), "--out", (d / "o").string()}) == 2);
    CHECK(invoke({"qfi_scaling", "--config", (d / "missing.json").string(), "--out", (d / "o").string()}) == 2);
    CHECK(invoke({"qfi_scaling", "--out", (d / "o").string()}) == 2);
    spit(d / "mismatch.json", R"({"scenario": "hadamard", "L_list": [8]})");
    CHECK(invoke({"qfi_scaling", "--config", (d / "mismatch.json").string(), "--out", (d / "o").string()}) == 2);
    // valid document whose run fails numerically: the staggered probe needs even L
    spit(d / "odd.json", R"({"scenario": "qfi_scaling", "L_list": [5], "probes": ["critical_afm"]})");
    CHECK(invoke({"qfi_scaling", "--config", (d / "odd.json").string(), "--out", (d / "o").string()}) == 3);
    spit(d / "ok.json", R"({"scenario": "qfi_scaling", "L_list": [4, 6]})");
    CHECK(invoke({"qfi_scaling", "--config", (d / "ok.json").string(), "--out", (d / "o").string()}) == 0);
    CHECK(fs::exists(d / "o" / "qfi_scaling.csv"));
    CHECK(fs::exists(d / "o" / "plot_qfi_scaling.csv"));
}

TEST_CASE("bit-flip sweep reproduces the closed form") {
    const ExperimentConfig cfg = parse_config(R"({"scenario": "channel_sweep", "model": {"kind": "tfim"},
        "channel": {"kind": "bitflip_x"}, "probes": ["critical", "ghz"], "L_list": [4, 6],
        "p_list": [0.1, 0.3, 0.49]})");
    cfg.validate();
    const std::vector<ExperimentRecord> recs = run(cfg);
    CHECK(recs.size() == 12);
    for (const ExperimentRecord& r : recs) {
        REQUIRE(r.reference.has_value());
        CHECK(std::abs(r.value - *r.reference) < 1e-8);
    }
}

TEST_CASE("records are sorted and the CSV is byte-identical across runs") {
    const fs::path d = scratch("repro");
    spit(d / "cfg.json", R"({"scenario": "channel_sweep", "model": {"kind": "tfim"}, "channel": {"kind": "dephase_z"},
        "probes": ["ghz", "critical"], "L_list": [6, 4], "p_list": [0.3, 0.1], "seed": 5})");
    REQUIRE(invoke({"channel_sweep", "--config", (d / "cfg.json").string(), "--out", (d / "a").string()}) == 0);
    REQUIRE(invoke({"channel_sweep", "--config", (d / "cfg.json").string(), "--out", (d / "b").string(), "--threads",
                    "1"}) == 0);
    const std::string a = slurp(d / "a" / "channel_sweep.csv");
    CHECK(a == slurp(d / "b" / "channel_sweep.csv"));
    CHECK(slurp(d / "a" / "plot_channel_sweep.csv") == slurp(d / "b" / "plot_channel_sweep.csv"));
    CHECK(a.rfind("schema_version,", 0) == 0);

    const std::vector<ExperimentRecord> recs = run(parse_config(slurp(d / "cfg.json")));
    for (std::size_t k = 1; k < recs.size(); ++k) {
        const auto& x = recs[k - 1];
        const auto& y = recs[k];
        CHECK(std::tie(x.L, x.theta, x.p) <= std::tie(y.L, y.theta, y.p));
    }
    CHECK(csv_text(recs) == csv_text(run(parse_config(slurp(d / "cfg.json")))));
}

TEST_CASE("seed override changes only the recorded seed for deterministic scenarios") {
    const fs::path d = scratch("seed");
    spit(d / "cfg.json", R"({"scenario": "qfi_scaling", "L_list": [4, 6, 8], "probes": ["ghz"]})");
    REQUIRE(invoke({"qfi_scaling", "--config", (d / "cfg.json").string(), "--out", (d / "a").string(), "--seed",
                    "42"}) == 0);
    const std::string a = slurp(d / "a" / "qfi_scaling.csv");
    CHECK(a.find(",42,") != std::string::npos);
}

TEST_CASE("QFI scaling orders GHZ above the critical chain above the coherent state") {
    const ExperimentConfig cfg = parse_config(R"({"scenario": "qfi_scaling", "model": {"kind": "tfim"},
        "probes": ["ghz", "critical", "spin_coherent"], "L_list": [6, 8, 10]})");
    const std::vector<ExperimentRecord> recs = run(cfg);
    std::map<std::pair<std::string, int>, double> q;
    std::map<std::string, double> slope;
    for (const ExperimentRecord& r : recs) {
        if (r.observable == "qfi") q[{r.probe, r.L}] = r.value;
        if (r.observable == "qfi_fit") slope[r.probe] = r.value;
    }
    for (int L : {6, 8, 10}) {
        CHECK(q[{"ghz", L}] == doctest::Approx(4.0 * L * L).epsilon(1e-10));
        CHECK(q[{"spin_coherent", L}] == doctest::Approx(4.0 * L).epsilon(1e-10));
        CHECK(q[{"ghz", L}] > q[{"critical_fm", L}]);
        CHECK(q[{"critical_fm", L}] > q[{"spin_coherent", L}]);
    }
    CHECK(slope["ghz"] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(slope["spin_coherent"] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(slope["critical_fm"] > 1.0);
    CHECK(slope["critical_fm"] < 2.0);
}

TEST_CASE("atomic write replaces the target") {
    const fs::path d = scratch("atomic");
    atomic_write((d / "f.txt").string(), "one");
    atomic_write((d / "f.txt").string(), "two");
    CHECK(slurp(d / "f.txt") == "two");
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++n;
    CHECK(n == 1);
}
