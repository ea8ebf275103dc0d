#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vlcsim/cli.hpp"
#include "vlcsim/config.hpp"

using namespace vlcsim;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vlcsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("vlcsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ConfigError parse_error(const std::string& text) {
    try {
        parse_config(text, "t.toml");
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError("unreachable");
}

}  // namespace

TEST_CASE("default config text parses back to the defaults") {
    const auto cfg = parse_config(default_config_text());
    CHECK(cfg.canonical() == ExperimentConfig{}.canonical());
    CHECK(cfg.hash().size() == 16);
}

TEST_CASE("shipped defaults config") {
    const auto cfg = load_config(fs::path(VLCSIM_SOURCE_DIR) / "configs" / "paper_defaults.toml");
    CHECK(cfg.n == 512);
    CHECK(cfg.bias_db == 13.0);
    CHECK(cfg.room.total_power == 100.0);
    CHECK(cfg.led_peak_nm[0] == 632.5);
    CHECK(cfg.band_lower_nm[3] == 400.0);
    CHECK(load_config(fs::path(VLCSIM_SOURCE_DIR) / "configs" / "threetap.toml").channel_profile == "threetap");
    CHECK(load_config(fs::path(VLCSIM_SOURCE_DIR) / "configs" / "flat.toml").channel_profile == "flat");
}

TEST_CASE("values, comments and lists") {
    const auto cfg = parse_config(R"(
# comment
[modem]
n = 64   # trailing comment
bias_db = 1_0.5
assignment = "contiguous"
clip = false
[ber]
snr_db = [0, 5, 10,]
schemes = ["qct", "csk"]
[channel]
profile = "custom"
taps = [1, -0.5]
)");
    CHECK(cfg.n == 64);
    CHECK(cfg.bias_db == 10.5);
    CHECK(cfg.assignment == "contiguous");
    CHECK_FALSE(cfg.clip);
    CHECK(cfg.snr_db == std::vector<double>{0, 5, 10});
    CHECK(cfg.ber_schemes == std::vector<std::string>{"qct", "csk"});
    CHECK(cfg.channel().length() == 2);
}

TEST_CASE("parse errors carry line and key") {
    auto e = parse_error("[modem]\nn = 64\nfrobnicate = 1\n");
    CHECK(e.line() == 3);
    CHECK(e.key() == "modem.frobnicate");
    CHECK(std::string(e.what()).find("t.toml") != std::string::npos);

    e = parse_error("[nope]\n");
    CHECK(e.line() == 1);

    e = parse_error("[modem]\n\nn = 6x\n");
    CHECK(e.line() == 3);
    CHECK(e.key() == "modem.n");

    e = parse_error("[modem]\nn = 64\nn = 128\n");
    CHECK(e.line() == 3);

    e = parse_error("n = 64\n");
    CHECK(e.line() == 1);

    e = parse_error("[modem]\nassignment = \"open\n");
    CHECK(e.line() == 2);

    e = parse_error("[modem]\ncp_len = 4\nn = 48\n");
    CHECK(e.key() == "modem.n");
    CHECK(e.line() == 3);

    e = parse_error("[modem]\npam_order = 3\n");
    CHECK(e.key() == "modem.pam_order");

    e = parse_error("[modem]\nclip = 1\n");
    CHECK(e.key() == "modem.clip");

    e = parse_error("[ber]\nschemes = [\"qct\", \"ook\"]\n");
    CHECK(e.key() == "ber.schemes");
}

TEST_CASE("hash ignores formatting and run settings") {
    const auto a = parse_config("[modem]\nn = 64\n[run]\nseed = 5\n");
    const auto b = parse_config("[run]\nthreads = 3\nout_dir = \"x\"\n\n[modem]\n  n=64.0 # same\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != ExperimentConfig{}.hash());
    CHECK(a.canonical().find("run.") == std::string::npos);
}

TEST_CASE("help lists every key with default and unit") {
    const auto top = cli({"--help"});
    const auto run = cli({"run", "--help"});
    CHECK(top.code == 0);
    CHECK(run.code == 0);
    for (const auto& k : config_keys()) {
        const std::string line = k.name + " = " + k.default_value + "  [" + k.unit + "]";
        CHECK_MESSAGE(run.out.find(line) != std::string::npos, line);
        CHECK(top.out.find(line) != std::string::npos);
    }
}

TEST_CASE("csv helpers") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_number(0.1) == "0.1");
    CHECK(csv_number(1e-300) == "1e-300");
}

TEST_CASE("atomic writes replace the target and leave no temporary") {
    const auto dir = scratch("atomic");
    const auto target = dir / "sub" / "f.csv";
    write_file_atomic(target, "one");
    write_file_atomic(target, "two");
    CHECK(read(target) == "two");
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "sub")) files += e.is_regular_file() ? 1 : 0;
    CHECK(files == 1);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    CHECK(cli({}).code == 2);
    CHECK(cli({"run", (dir / "missing.toml").string(), "ber"}).code == 2);
    write(dir / "bad.toml", "[modem]\nn = 64\nbogus = 1\n");
    const auto bad = cli({"run", (dir / "bad.toml").string(), "ber"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 3") != std::string::npos);
    CHECK(bad.err.find("modem.bogus") != std::string::npos);
    write(dir / "ok.toml", "[modem]\nn = 64\n");
    CHECK(cli({"run", (dir / "ok.toml").string(), "sweep"}).code == 2);
    write(dir / "singular.toml", "[modem]\nn = 16\n[channel]\nprofile = \"custom\"\ntaps = [1, -1]\nnormalize = false\n"
                                 "[ber]\nschemes = [\"qct\"]\nsnr_db = [0]\n");
    const auto singular = cli({"run", (dir / "singular.toml").string(), "ber", "--out", (dir / "o").string()});
    CHECK(singular.code == 1);
    CHECK(singular.err.find("error") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("run writes named CSV and JSON outputs") {
    const auto dir = scratch("run");
    write(dir / "c.toml", "[modem]\nn = 64\n[papr]\nframes = 300\nstep_db = 1\n");
    const auto r = cli({"run", (dir / "c.toml").string(), "papr", "--out", (dir / "o").string(), "--threads", "2"});
    REQUIRE(r.code == 0);
    const auto hash = load_config(dir / "c.toml").hash();
    for (const char* scheme : {"dco-ofdm", "qct-stream", "qct-sum", "all"}) {
        const auto p = dir / "o" / ("papr_" + std::string(scheme) + "_" + hash + ".csv");
        CHECK_MESSAGE(fs::exists(p), p.string());
    }
    const auto csv = read(dir / "o" / ("papr_dco-ofdm_" + hash + ".csv"));
    CHECK(csv.rfind("threshold_db,ccdf\r\n", 0) == 0);
    CHECK(fs::exists(dir / "o" / ("papr_" + hash + ".json")));
    CHECK(r.out.find("CCDF") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("validate passes on the shipped data and catches faults") {
    const auto ok = cli({"validate"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("status=FAIL") == std::string::npos);
    CHECK(ok.out.find("\"status\":\"pass\"") != std::string::npos);

    const auto perturbed = cli({"validate", "--perturb-qct", "1e-3"});
    CHECK(perturbed.code == 1);
    CHECK(perturbed.out.find("check=qct-diagonalization status=FAIL") != std::string::npos);

    const auto dir = scratch("corrupt");
    fs::copy_file(default_data_dir() / "tcs_reflectance.csv", dir / "tcs_reflectance.csv");
    auto cmf = read(default_data_dir() / "cie_cmf_1931.csv");
    cmf.replace(cmf.find("\n400,"), 5, "\n400,x");
    write(dir / "cie_cmf_1931.csv", cmf);
    const char* previous = std::getenv("VLCSIM_DATA_DIR");
    const std::string saved = previous ? previous : "";
    setenv("VLCSIM_DATA_DIR", dir.c_str(), 1);
    const auto corrupt = cli({"validate"});
    if (previous)
        setenv("VLCSIM_DATA_DIR", saved.c_str(), 1);
    else
        unsetenv("VLCSIM_DATA_DIR");
    CHECK(corrupt.code == 1);
    CHECK(corrupt.out.find("check=cie-data status=FAIL") != std::string::npos);
    fs::remove_all(dir);
}
