#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"
#include "wirebus/errors.hpp"

using namespace wirebus;
using namespace wirebus::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("wirebus_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        v.push_back(line);
    }
    return v;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "t.toml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("unit strings") {
    CHECK(parse_quantity("354.25 kHz", Quantity::frequency) == 354250.0);
    CHECK(parse_quantity("100 mHz", Quantity::frequency) == 0.1);
    CHECK(parse_quantity("3.2 mm", Quantity::length) == 3.2e-3);
    CHECK(parse_quantity("5.5 pF", Quantity::capacitance) == 5.5e-12);
    CHECK(parse_quantity("0.5 mK", Quantity::temperature) == 0.5e-3);
    CHECK(parse_quantity("  70 ms ", Quantity::time) == 70e-3);
    CHECK(parse_quantity("1e2 mHz", Quantity::frequency) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(parse_quantity("2 µm", Quantity::length) == 2e-6);
    CHECK_THROWS_AS(parse_quantity("5.5", Quantity::capacitance), ConfigError);
    CHECK_THROWS_AS(parse_quantity("5.5 pQ", Quantity::capacitance), ConfigError);
    CHECK_THROWS_AS(parse_quantity("5.5 kHz", Quantity::length), ConfigError);
    CHECK_THROWS_AS(parse_quantity("abc Hz", Quantity::frequency), ConfigError);
    for (double x : {354250.0, 0.1, 3.2e-3, 5.5e-12, 1.0 / 3.0}) {
        CHECK(parse_quantity(format_quantity(x, Quantity::frequency), Quantity::frequency) == x);
    }
}

TEST_CASE("config diagnostics name the line and field") {
    const std::string unknown_key = config_error("[wire]\ncapacitance = \"5.5 pF\"\ncap = 1\n");
    CHECK(unknown_key.find("t.toml:3") != std::string::npos);
    CHECK(unknown_key.find("[wire].cap") != std::string::npos);

    CHECK(config_error("[wires]\n").find("unknown section [wires]") != std::string::npos);
    CHECK(config_error("[traps]\ndistance = 3.2\n").find("[traps].distance") != std::string::npos);
    CHECK(config_error("[traps]\ndistance = \"3.2 kg\"\n").find("unknown length unit") != std::string::npos);
    CHECK(config_error("[drive]\ntongue = \"low\"\n").find("[drive].tongue") != std::string::npos);
    CHECK(config_error("[integrator]\nprecision = \"quad\"\n").find("double-double") != std::string::npos);
    CHECK(config_error("[integrator]\nabs_tol = 1e-3\n").find("t.toml") != std::string::npos);
    CHECK(config_error("[sweep]\neta_steps = 1\n").find("[sweep].eta_steps") != std::string::npos);
    CHECK_FALSE(config_error("[traps\n").empty());
    // delta_omega is read after the detuning mode, whichever comes first.
    CHECK(config_error("[ensemble]\ndelta_omega = 0.01\ndetuning = \"relative\"\n").empty());
    CHECK(config_error("[ensemble]\ndelta_omega = 0.01\n").find("additive") != std::string::npos);
}

TEST_CASE("config echo round-trips") {
    const RunConfig d;
    CHECK(echo_config(parse_config(echo_config(d))) == echo_config(d));

    const RunConfig c = parse_config(R"(
[traps]
be_count = 4
ion_frequency = "1.5 MHz"
distance = "120 um"
equalize_rates = true
ion = "Be9"
[wire]
capacitance = "7 pF"
coupled = false
[drive]
omega_d_ratio = 12.5
Q = -0.3
tongue = 2
k = 1
[ensemble]
detuning = "relative"
delta_omega = 1e-7
seed = 12345678901
t_end = "40 ms"
T_Be0 = "3 uK"
write_trajectories = true
[integrator]
precision = "double-double"
propagation = "direct"
abs_tol = 3e-11
[output]
dir = "some \"odd\" dir"
)");
    CHECK(c.traps.ion_frequency_hz == 1.5e6);
    CHECK(c.drive.tongue == 2);
    CHECK(c.ensemble.seed == 12345678901ULL);
    CHECK(c.ensemble.delta_omega == 1e-7);
    CHECK(*c.ensemble.t_end == 40e-3);
    const std::string echoed = echo_config(c);
    const RunConfig back = parse_config(echoed);
    CHECK(echo_config(back) == echoed);
    CHECK(back.output.dir == "some \"odd\" dir");
    CHECK(back.ensemble.T_Be0 == 3e-6);
    CHECK(config_hash(echoed) == config_hash(echo_config(back)));
    CHECK(config_hash(echoed) != config_hash(echo_config(d)));
}

TEST_CASE("setup from config") {
    RunConfig c;
    const ExchangeSetup s = build_setup(c);
    CHECK(s.g1 > 0.0);
    c.traps.equalize_rates = true;
    const ExchangeSetup eq = build_setup(c);
    CHECK(std::abs(eq.g1 - eq.g2) < 1e-9 * eq.g2);
    c.wire.coupled = false;
    const ExchangeSetup off = build_setup(c);
    CHECK(off.g1 == 0.0);
    CHECK(off.system.gamma_be_e() == 0.0);
    CHECK_THROWS_AS(ion_mass_ratio("Xe"), ConfigError);
}

TEST_CASE("stability on a 2x2 grid") {
    const fs::path dir = scratch("stab");
    write(dir / "grid.toml", "[sweep]\neta_steps = 2\nratio_steps = 2\nratio_min = 0.3\nratio_max = 0.9\n");
    const Run r = invoke({"stability", "--config", (dir / "grid.toml").string(), "--out", (dir / "a").string()});
    CHECK(r.code == 0);
    const auto rows = lines(slurp(dir / "a" / "sweep.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "eta_prime,ratio_e_d,stable,mu,R_k,ratio_e_i");
    const auto side = nlohmann::json::parse(slurp(dir / "a" / "sweep.json"));
    CHECK(side["grid"]["eta_prime"]["steps"] == 2);
    CHECK(side["config_hash"].get<std::string>().size() == 16);
    CHECK(side["working_point"]["R_k"].get<double>() == doctest::Approx(111.5).epsilon(0.014));

    const Run again = invoke({"replay", (dir / "a" / "sweep.json").string(), "--out", (dir / "b").string()});
    CHECK(again.code == 0);
    CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));
    CHECK(slurp(dir / "a" / "resolved_config.toml") != "");
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    write(dir / "bad.toml", "[wire]\ncapacitance = \"5.5 pQ\"\n");
    const Run bad = invoke({"stability", "--config", (dir / "bad.toml").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("bad.toml:2") != std::string::npos);
    CHECK(bad.err.find("[wire].capacitance") != std::string::npos);

    CHECK(invoke({"stability", "--no-such-flag"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"workpoint", "--omega-d-ratio", "2", "--Q", "0"}).code == 2);
    CHECK(invoke({"entangle", "--g", "5.6"}).code == 2);
    CHECK(invoke({"ensemble", "--delta-omega", "fast"}).code == 2);
}

TEST_CASE("help lists every flag") {
    const Run top = invoke({"--help"});
    CHECK(top.code == 0);
    for (const char* sub : {"stability", "workpoint", "entangle", "exchange", "ensemble", "replay"}) {
        CHECK(top.out.find(sub) != std::string::npos);
    }
    const Run ens = invoke({"ensemble", "--help"});
    for (const char* flag : {"--config", "--seed", "--delta-omega", "--n-traj", "--threads", "--out", "--check"}) {
        CHECK(ens.out.find(flag) != std::string::npos);
    }
}

TEST_CASE("workpoint JSON") {
    const Run r = invoke({"workpoint", "--omega-d-ratio", "25", "--Q", "-6.0", "--k", "0", "--check"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["mu"].get<double>() == 0.08);
    CHECK(j["A"].get<double>() == doctest::Approx(7.88).epsilon(0.0025));
    CHECK(j["eta_prime"].get<double>() == doctest::Approx(1.52).epsilon(0.0066));
    CHECK(j["omega_e_ratio"].get<double>() == doctest::Approx(35.0).epsilon(0.0057));
    CHECK(j["R0"].get<double>() == doctest::Approx(111.5).epsilon(0.0134));

    const auto rt = nlohmann::json::parse(invoke({"workpoint", "--omega-d-ratio", "4", "--Q", "-0.5"}).out);
    CHECK(rt["mu"].get<double>() == 0.5);
    CHECK(rt["eta_prime"].get<double>() == doctest::Approx(1.0 / rt["A"].get<double>()));
}

TEST_CASE("entangle CSV") {
    const Run r = invoke({"entangle", "--g", "5.6 Hz", "--m", "1", "--n", "1", "--samples", "3", "--numeric"});
    CHECK(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "t,re_c100,im_c100,re_c010,im_c010,re_c001,im_c001,norm,deviation");
    CHECK(rows[1] == "0,1,0,0,0,0,0,1,0");
    // Middle sample is tau = tau_swap / 2: equal populations, electron empty.
    std::vector<double> v;
    std::stringstream ss(rows[2]);
    std::string field;
    while (std::getline(ss, field, ',')) {
        v.push_back(std::stod(field));
    }
    CHECK(v[1] * v[1] + v[2] * v[2] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(v[3] * v[3] + v[4] * v[4] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(v[5]) + std::abs(v[6]) < 1e-10);
    CHECK(v[8] < 1e-10);
}

TEST_CASE("ensemble outputs and replay") {
    const fs::path dir = scratch("ens");
    write(dir / "e.toml",
          "[ensemble]\nn_traj = 3\nsample_intervals = 4\nwrite_trajectories = true\ndelta_omega = \"200 mHz\"\n");
    const Run r = invoke({"ensemble", "--config", (dir / "e.toml").string(), "--out", (dir / "a").string(), "--seed",
                       "7", "--threads", "2"});
    CHECK(r.code == 0);
    const auto summary = lines(slurp(dir / "a" / "ensemble_summary.csv"));
    CHECK(summary.size() == 6);
    CHECK(summary[0] == "t,mean_TP,p5_TP,p95_TP,n_ok");
    CHECK(lines(slurp(dir / "a" / "trajectories.csv")).size() == 1 + 3 * 5);
    const auto m = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(m["seed"] == 7);
    CHECK(m["delta_omega"].get<double>() == 0.2);
    CHECK(m["n_failed"] == 0);

    const Run again = invoke({"replay", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string()});
    CHECK(again.code == 0);
    CHECK(slurp(dir / "a" / "ensemble_summary.csv") == slurp(dir / "b" / "ensemble_summary.csv"));
    CHECK(slurp(dir / "a" / "trajectories.csv") == slurp(dir / "b" / "trajectories.csv"));

    // A single trajectory gives degenerate aggregates.
    const Run one = invoke({"ensemble", "--n-traj", "1", "--out", (dir / "one").string()});
    CHECK(one.code == 0);
    for (const auto& row : lines(slurp(dir / "one" / "ensemble_summary.csv"))) {
        if (row[0] == 't') {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(row);
        std::string field;
        while (std::getline(ss, field, ',')) {
            f.push_back(field);
        }
        CHECK(f[1] == f[2]);
        CHECK(f[2] == f[3]);
        CHECK(f[4] == "1");
    }
}

TEST_CASE("exchange overlay without the wire conserves both ions") {
    const fs::path dir = scratch("exch");
    write(dir / "x.toml", "[wire]\ncoupled = false\n[output]\nsample_interval = \"5 ms\"\nwindow = \"0 s\"\n");
    const Run r = invoke({"exchange", "--config", (dir / "x.toml").string(), "--out", dir.string()});
    CHECK(r.code == 0);
    const auto rows = lines(slurp(dir / "exchange_overlay.csv"));
    REQUIRE(rows.size() > 10);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<double> v;
        std::stringstream ss(rows[i]);
        std::string field;
        while (std::getline(ss, field, ',')) {
            v.push_back(std::stod(field));
        }
        CHECK(v[1] == doctest::Approx(0.5e-3).epsilon(1e-9));
        CHECK(v[3] == doctest::Approx(10.0).epsilon(1e-9));
    }
    CHECK(lines(slurp(dir / "trajectory.csv"))[0] == "t,x_Be,v_Be,x_e,v_e,x_P,v_P,T_Be,T_e_inst,T_P");
}
