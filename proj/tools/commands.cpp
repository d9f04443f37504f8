#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "wirebus/coupling.hpp"
#include "wirebus/dynamics.hpp"
#include "wirebus/ensemble.hpp"
#include "wirebus/errors.hpp"
#include "wirebus/quantum.hpp"
#include "wirebus/sweep.hpp"

namespace wirebus::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    }
    return fs::path(dir);
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) {
        throw ConfigError("cannot write '" + p.string() + "'");
    }
    return os;
}

void write_text(const fs::path& p, const std::string& text) {
    auto os = open_out(p);
    os << text;
}

json units_row() {
    return {{"t", "s"}, {"x", "m"}, {"v", "m/s"}, {"T", "K"}, {"frequency", "Hz"}, {"rate", "rad/s"}};
}

/// Manifest fields shared by every config-driven command. Replaying the
/// manifest parses `config` and reruns `command`.
json manifest_base(const std::string& command, const RunConfig& cfg) {
    const std::string text = echo_config(cfg);
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["config_hash"] = config_hash(text);
    m["config"] = text;
    m["units"] = units_row();
    return m;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Common {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    bool check = false;
};

RunConfig load_or_default(const Common& c) {
    RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
    if (!c.out_dir.empty()) {
        cfg.output.dir = c.out_dir;
    }
    return cfg;
}

/// Rates of the setup with the wire attached, even when the config
/// disconnects the ions. The exchange time always refers to them.
std::array<double, 2> nominal_rates(const RunConfig& cfg) {
    RunConfig coupled = cfg;
    coupled.wire.coupled = true;
    const ExchangeSetup s = build_setup(coupled);
    return {s.g1, s.g2};
}

// ---- stability -----------------------------------------------------------------

int cmd_stability(const RunConfig& cfg, unsigned threads, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const SweepGrid grid = sweep_grid(cfg);
    const SweepResult res = run_sweep(grid, threads);
    const fs::path dir = prepare_dir(cfg.output.dir);
    {
        auto os = open_out(dir / "sweep.csv");
        write_sweep_csv(os, res);
    }

    json side = manifest_base("stability", cfg);
    side["grid"] = {{"eta_prime", {{"min", grid.eta.min}, {"max", grid.eta.max}, {"steps", grid.eta.steps}}},
                    {"ratio_e_d", {{"min", grid.ratio.min}, {"max", grid.ratio.max}, {"steps", grid.ratio.steps}}},
                    {"order", "row-major, eta_prime outer"}};
    side["k"] = grid.k;
    side["ion"] = cfg.traps.ion;
    side["mass_ratio"] = grid.mass_ratio;
    side["cells"] = res.cells.size();
    side["failed_cells"] = res.failed_cells();
    side["failed_cell_note"] = "cells on a band edge (integer mu) have an empty stable field";

    // The working point of the [drive] section, evaluated as one extra cell.
    try {
        const WorkingPoint wp =
            locate_working_point(cfg.drive.omega_d_ratio, cfg.drive.Q, 0, cfg.drive.tongue, grid.mass_ratio);
        const SweepCell cell = evaluate_cell(wp.eta_prime, wp.omega_e_over_omega_d, grid.k, grid.mass_ratio);
        json marker = {{"eta_prime", cell.eta_prime}, {"ratio_e_d", cell.ratio}, {"stable", cell.stable}};
        if (cell.R_k) {
            marker["mu"] = *cell.mu;
            marker["R_k"] = *cell.R_k;
            marker["ratio_e_i"] = *cell.freq_ratio;
        }
        side["working_point"] = marker;
    } catch (const Error& e) {
        side["working_point"] = {{"error", e.what()}};
    }

    if (grid.k == 1) {
        const NarrownessReport rep = k1_narrowness_check(res, cfg.sweep.narrowness_threshold);
        side["narrowness"] = {{"threshold", rep.threshold},
                              {"weak", {{"stable_cells", rep.weak.stable_cells},
                                        {"above_threshold", rep.weak.above_threshold},
                                        {"max_R", rep.weak.max_R}}},
                              {"strong", {{"stable_cells", rep.strong.stable_cells},
                                          {"above_threshold", rep.strong.above_threshold},
                                          {"max_R", rep.strong.max_R}}},
                              {"summary", rep.summary}};
        out << rep.summary << "\n";
    }
    side["wall_seconds"] = seconds_since(start);
    write_text(dir / "sweep.json", side.dump(2) + "\n");
    write_text(dir / "resolved_config.toml", echo_config(cfg));

    out << "wrote " << (dir / "sweep.csv").string() << " (" << res.cells.size() << " cells, " << res.failed_cells()
        << " failed)\n";
    // Cells exactly on a band edge fail legitimately; any other failure is a solver breakdown.
    long hard_failures = 0;
    for (const auto& c : res.cells) {
        if (!c.error.empty()) {
            const double A = 4.0 * c.ratio * c.ratio;
            hard_failures += monodromy_oracle({A, -A * c.eta_prime / 2.0}).marginal ? 0 : 1;
        }
    }
    if (hard_failures > 0) {
        throw NumericalError("stability: " + std::to_string(hard_failures) + " cells failed away from a band edge");
    }
    return exit_ok;
}

// ---- workpoint -----------------------------------------------------------------

struct WorkpointArgs {
    double omega_d_ratio = 25.0;
    double Q = -6.0;
    int k = 0;
    std::string tongue = "auto";
    std::string ion = "Ca40";
    bool check = false;
};

int cmd_workpoint(const WorkpointArgs& a, std::ostream& out, std::ostream& err) {
    int tongue = -1;
    if (a.tongue != "auto") {
        try {
            std::size_t used = 0;
            tongue = std::stoi(a.tongue, &used);
            if (used != a.tongue.size() || tongue < 0) {
                throw std::invalid_argument("");
            }
        } catch (const std::exception&) {
            throw ConfigError("--tongue expects \"auto\" or a non-negative integer, got '" + a.tongue + "'");
        }
    }
    const double mass = ion_mass_ratio(a.ion);
    const WorkingPoint wp = locate_working_point(a.omega_d_ratio, a.Q, a.k, tongue, mass);
    const double R0 = d_factor(wp.solution, 0) * std::sqrt(mass);
    json j = {{"omega_d_ratio", a.omega_d_ratio},
              {"k", a.k},
              {"ion", a.ion},
              {"mu", wp.mu},
              {"A", wp.A},
              {"Q", wp.Q},
              {"tongue", wp.tongue},
              {"eta_prime", wp.eta_prime},
              {"omega_e_over_omega_d", wp.omega_e_over_omega_d},
              {"omega_e_ratio", wp.omega_e_over_omega_i},
              {"D_k", wp.D_k},
              {"R_k", wp.R_k},
              {"R0", R0},
              {"sqrt_mass_ratio", std::sqrt(mass)}};

    if (!a.check) {
        out << j.dump(2) << "\n";
        return exit_ok;
    }
    // Round trip: the forward solve must land on the requested exponent.
    const FloquetSolution fwd = solve_floquet({wp.A, wp.Q});
    json checks = json::array();
    auto add = [&](const std::string& name, bool pass, double value) {
        checks.push_back({{"name", name}, {"pass", pass}, {"value", value}});
    };
    add("forward_mu", fwd.stable && std::abs(fwd.mu - wp.mu) < 1e-10, fwd.mu);
    const bool reference = a.omega_d_ratio == 25.0 && a.Q == -6.0 && a.k == 0 && a.ion == "Ca40";
    if (reference) {
        add("mu == 0.08", wp.mu == 0.08, wp.mu);
        add("A = 7.88 +/- 0.02", std::abs(wp.A - 7.88) <= 0.02, wp.A);
        add("eta' = 1.52 +/- 0.01", std::abs(wp.eta_prime - 1.52) <= 0.01, wp.eta_prime);
        add("omega_e'/omega_i' = 35 +/- 0.2", std::abs(wp.omega_e_over_omega_i - 35.0) <= 0.2, wp.omega_e_over_omega_i);
        add("R_0 = 111.5 +/- 1.5", std::abs(R0 - 111.5) <= 1.5, R0);
    }
    bool all = true;
    for (const auto& c : checks) {
        all = all && c["pass"].get<bool>();
    }
    j["checks"] = checks;
    out << j.dump(2) << "\n";
    if (!all) {
        err << "workpoint: check failed\n";
        return exit_check;
    }
    return exit_ok;
}

// ---- entangle ------------------------------------------------------------------

struct EntangleArgs {
    std::string g = "5.6 Hz";
    int m = 1;
    int n = 1;
    int samples = 201;
    bool numeric = false;
    std::string out_file;
};

int cmd_entangle(const EntangleArgs& a, std::ostream& out, std::ostream& err) {
    if (a.samples < 2) {
        throw ConfigError("--samples must be >= 2");
    }
    const double g = angular(parse_quantity(a.g, Quantity::frequency));
    const ExchangePlan plan = plan_exchange(g, a.m, a.n);
    const double t_end = plan.tau_swap ? *plan.tau_swap : plan.tau;
    std::vector<double> times(static_cast<std::size_t>(a.samples));
    for (int i = 0; i < a.samples; ++i) {
        times[static_cast<std::size_t>(i)] =
            i == a.samples - 1 ? t_end : t_end * static_cast<double>(i) / static_cast<double>(a.samples - 1);
    }
    std::vector<AmplitudeState> closed;
    closed.reserve(times.size());
    for (double t : times) {
        closed.push_back(amplitudes_at(g, plan.delta, t));
    }
    std::vector<AmplitudeState> numeric;
    if (a.numeric) {
        numeric = numeric_amplitudes({g, g, plan.delta, plan.delta}, times);
    }

    std::ofstream file;
    if (!a.out_file.empty()) {
        if (fs::path(a.out_file).has_parent_path()) {
            prepare_dir(fs::path(a.out_file).parent_path().string());
        }
        file = open_out(a.out_file);
    }
    std::ostream& os = a.out_file.empty() ? out : file;
    os << "t,re_c100,im_c100,re_c010,im_c010,re_c001,im_c001,norm" << (a.numeric ? ",deviation" : "") << "\n";
    double max_dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const AmplitudeState& s = a.numeric ? numeric[i] : closed[i];
        os << fmt(times[i]) << ',' << fmt(s.c100.real()) << ',' << fmt(s.c100.imag()) << ',' << fmt(s.c010.real())
           << ',' << fmt(s.c010.imag()) << ',' << fmt(s.c001.real()) << ',' << fmt(s.c001.imag()) << ','
           << fmt(s.norm());
        if (a.numeric) {
            const double dev = std::max({std::abs(s.c100 - closed[i].c100), std::abs(s.c010 - closed[i].c010),
                                         std::abs(s.c001 - closed[i].c001)});
            max_dev = std::max(max_dev, dev);
            os << ',' << fmt(dev);
        }
        os << '\n';
    }
    err << "plan: m=" << plan.m << " n=" << plan.n << " delta/2pi=" << fmt(ordinary(plan.delta))
        << " Hz tau=" << fmt(plan.tau) << " s kind=" << to_string(plan.kind);
    if (plan.tau_swap) {
        err << " tau_swap=" << fmt(*plan.tau_swap) << " s";
    }
    if (a.numeric) {
        err << " max_deviation=" << fmt(max_dev);
    }
    err << "\n";
    return exit_ok;
}

// ---- exchange ------------------------------------------------------------------

struct ExchangeRun {
    std::vector<MotionSample> samples;
    std::string method;
};

ExchangeRun run_exchange_motion(const RunConfig& cfg, const TriSystem& sys, const MotionState& init,
                                const std::vector<double>& times) {
    ExchangeRun r;
    if (cfg.integrator.propagation == Propagation::floquet) {
        r.samples = FloquetPropagator(sys).propagate(init, times);
        r.method = "floquet-map(" + IntegratorConfig::method() + ", double-double)";
    } else {
        const IntegratorConfig ic = integrator_config(cfg);
        r.samples = integrate_at(sys, init, times, ic).samples;
        r.method = IntegratorConfig::method() + ", " + to_string(ic.precision) + ", tol " + fmt(ic.abs_tol);
    }
    return r;
}

int cmd_exchange(const RunConfig& cfg, bool check, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const ExchangeSetup setup = build_setup(cfg);
    const auto rates = nominal_rates(cfg);
    const double t_ex = exchange_time(rates[0], rates[1]);
    const double t_end = t_ex + cfg.output.window;

    std::vector<double> times;
    const double dt = cfg.output.sample_interval;
    const auto steps = static_cast<long>(std::floor(t_end / dt + 1e-9));
    for (long i = 0; i <= steps; ++i) {
        times.push_back(static_cast<double>(i) * dt);
    }
    times.push_back(t_ex);
    if (times.back() < t_end) {
        times.push_back(t_end);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    const double T_Be0 = cfg.ensemble.T_Be0;
    const double T_P0 = cfg.ensemble.T_P0;
    const MotionState init = in_phase_initial_state(T_Be0, T_P0, setup.system);
    const ExchangeRun run = run_exchange_motion(cfg, setup.system, init, times);

    const fs::path dir = prepare_dir(cfg.output.dir);
    {
        auto os = open_out(dir / "trajectory.csv");
        write_trajectory_csv(os, run.samples);
    }
    double max_gap = 0.0;
    double gap_at_tex = 0.0;
    double T_P_tex = 0.0;
    {
        auto os = open_out(dir / "exchange_overlay.csv");
        os << "t,T_Be_numeric,T_Be_analytic,T_P_numeric,T_P_analytic,diff_TP\n";
        for (const auto& s : run.samples) {
            const TemperaturePair a = analytic_temperatures(setup.g1, setup.g2, T_Be0, T_P0, s.t);
            const double diff = s.T_P - a.T_P;
            os << fmt(s.t) << ',' << fmt(s.T_Be) << ',' << fmt(a.T_Be) << ',' << fmt(s.T_P) << ',' << fmt(a.T_P)
               << ',' << fmt(diff) << '\n';
            if (std::abs(s.t - t_ex) <= cfg.output.window + 1e-12) {
                max_gap = std::max(max_gap, std::abs(diff));
            }
            if (s.t == t_ex) {
                gap_at_tex = diff;
                T_P_tex = s.T_P;
            }
        }
    }

    const double threshold = 50e-9;
    json m = manifest_base("exchange", cfg);
    m["method"] = run.method;
    m["g1_hz"] = ordinary(setup.g1);
    m["g2_hz"] = ordinary(setup.g2);
    m["t_ex"] = t_ex;
    m["t_end"] = t_end;
    m["samples"] = run.samples.size();
    m["T_P_at_t_ex"] = T_P_tex;
    m["diff_TP_at_t_ex"] = gap_at_tex;
    m["max_abs_diff_TP_near_t_ex"] = max_gap;
    m["check_threshold_K"] = threshold;
    m["wall_seconds"] = seconds_since(start);
    write_text(dir / "manifest.json", m.dump(2) + "\n");
    write_text(dir / "resolved_config.toml", echo_config(cfg));

    out << "t_ex = " << fmt(t_ex) << " s, T_P(t_ex) = " << fmt(T_P_tex) << " K, max |numeric - analytic| within "
        << fmt(cfg.output.window) << " s of t_ex = " << fmt(max_gap) << " K\n";
    if (check && !(max_gap < threshold)) {
        err << "exchange: check failed, gap " << fmt(max_gap) << " K >= " << fmt(threshold) << " K\n";
        return exit_check;
    }
    return exit_ok;
}

// ---- ensemble ------------------------------------------------------------------

int cmd_ensemble(const RunConfig& cfg, unsigned threads, bool check, std::ostream& out, std::ostream& err) {
    const ExchangeSetup setup = build_setup(cfg);
    const auto rates = nominal_rates(cfg);
    const double t_ex = exchange_time(rates[0], rates[1]);

    EnsembleConfig ec;
    ec.n_traj = cfg.ensemble.n_traj;
    ec.detuning_mode = cfg.ensemble.detuning;
    ec.delta_omega_std = cfg.ensemble.detuning == DetuningMode::additive ? angular(cfg.ensemble.delta_omega)
                                                                         : cfg.ensemble.delta_omega;
    ec.master_seed = cfg.ensemble.seed;
    ec.T_Be0 = cfg.ensemble.T_Be0;
    ec.T_e0 = cfg.ensemble.T_e0;
    ec.T_P0 = cfg.ensemble.T_P0;
    ec.sample_times = uniform_sample_times(cfg.ensemble.t_end.value_or(t_ex), cfg.ensemble.sample_intervals);
    if (std::find(ec.sample_times.begin(), ec.sample_times.end(), t_ex) == ec.sample_times.end()) {
        ec.sample_times.push_back(t_ex);
        std::sort(ec.sample_times.begin(), ec.sample_times.end());
    }
    ec.integrator = integrator_config(cfg);
    ec.propagation = cfg.integrator.propagation;
    ec.threads = threads;

    const EnsembleResult res = run_ensemble(ec, setup.system, setup.floquet);

    const fs::path dir = prepare_dir(cfg.output.dir);
    {
        auto os = open_out(dir / "ensemble_summary.csv");
        write_summary_csv(os, res.stats);
    }
    if (cfg.ensemble.write_trajectories) {
        auto os = open_out(dir / "trajectories.csv");
        write_trajectories_csv(os, res);
    }
    const auto idx = static_cast<std::size_t>(
        std::find(res.stats.t.begin(), res.stats.t.end(), t_ex) - res.stats.t.begin());
    const double mean = idx < res.stats.t.size() ? res.stats.mean[idx] : std::nan("");
    const double reduction = 1.0 - mean / cfg.ensemble.T_P0;

    json m = manifest_base("ensemble", cfg);
    m["seed"] = cfg.ensemble.seed;
    m["delta_omega"] = cfg.ensemble.delta_omega;
    m["delta_omega_units"] = cfg.ensemble.detuning == DetuningMode::additive ? "Hz (applied as 2*pi*value rad/s)"
                                                                              : "relative";
    m["detuning"] = to_string(cfg.ensemble.detuning);
    m["n_traj"] = cfg.ensemble.n_traj;
    m["n_failed"] = res.n_failed;
    m["method"] = res.method;
    m["g1_hz"] = ordinary(setup.g1);
    m["g2_hz"] = ordinary(setup.g2);
    m["t_ex"] = t_ex;
    if (idx < res.stats.t.size()) {
        m["at_t_ex"] = {{"mean_TP", mean},
                        {"p5_TP", res.stats.p5[idx]},
                        {"p95_TP", res.stats.p95[idx]},
                        {"reduction", reduction}};
    }
    m["wall_seconds"] = res.wall_seconds;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
    write_text(dir / "resolved_config.toml", echo_config(cfg));

    out << "n_traj = " << cfg.ensemble.n_traj << ", failed = " << res.n_failed << ", mean T_P(t_ex) = " << fmt(mean)
        << " K, reduction = " << fmt(100.0 * reduction) << " %, wall " << fmt(res.wall_seconds) << " s\n";

    if (check) {
        // Bands for the reference detunings; any other run only has to cool.
        bool pass = res.n_failed == 0 && mean < cfg.ensemble.T_P0;
        const double d = cfg.ensemble.delta_omega;
        if (cfg.ensemble.detuning == DetuningMode::additive && std::abs(d - 0.1) < 1e-12) {
            pass = pass && mean >= 0.110 && mean <= 0.160;
        } else if (cfg.ensemble.detuning == DetuningMode::additive && std::abs(d - 0.5) < 1e-12) {
            pass = pass && mean >= 1.4 && mean <= 2.4 && reduction >= 0.75;
        }
        if (!pass) {
            err << "ensemble: check failed\n";
            return exit_check;
        }
    }
    return exit_ok;
}

// ---- replay --------------------------------------------------------------------

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, unsigned threads,
               std::ostream& out, std::ostream& err) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw ConfigError("cannot open manifest '" + manifest_path + "'");
    }
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(manifest_path + ": " + e.what());
    }
    if (!m.contains("command") || !m.contains("config") || !m["config"].is_string()) {
        throw ConfigError(manifest_path + ": manifest lacks 'command' or 'config'");
    }
    const std::string text = m["config"].get<std::string>();
    if (m.contains("config_hash") && m["config_hash"] != config_hash(text)) {
        throw ConfigError(manifest_path + ": config_hash does not match the embedded config");
    }
    RunConfig cfg = parse_config(text, manifest_path + "#config");
    if (!out_dir.empty()) {
        cfg.output.dir = out_dir;
    }
    const std::string cmd = m["command"].get<std::string>();
    if (cmd == "stability") return cmd_stability(cfg, threads, out);
    if (cmd == "exchange") return cmd_exchange(cfg, false, out, err);
    if (cmd == "ensemble") return cmd_ensemble(cfg, threads, false, out, err);
    throw ConfigError(manifest_path + ": cannot replay command '" + cmd + "'");
}

int classify(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr || dynamic_cast<const DomainError*>(&e) != nullptr ||
        dynamic_cast<const PreconditionError*>(&e) != nullptr) {
        return exit_config;
    }
    return exit_numerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wire-coupled electron/ion simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool with_threads, bool with_check) {
        sub->add_option("--config", common.config_path, "TOML configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", common.out_dir, "Output directory (overrides [output].dir)");
        if (with_threads) {
            sub->add_option("--threads", common.threads,
                            "Worker cap; 0 uses WIREBUS_THREADS or all cores");
        }
        if (with_check) {
            sub->add_flag("--check", common.check, "Exit 4 when the acceptance threshold is missed");
        }
    };

    auto* stability = app.add_subcommand("stability", "Stability and coupling-strength sweep over (eta', omega_e'/omega_d)");
    add_common(stability, true, false);
    std::optional<int> k_override;
    stability->add_option("--k", k_override, "Sideband index (overrides [sweep].k)");

    auto* workpoint = app.add_subcommand("workpoint", "Working point from the ion resonance, as JSON");
    WorkpointArgs wa;
    workpoint->add_option("--omega-d-ratio", wa.omega_d_ratio, "omega_d / omega_i'")->capture_default_str();
    workpoint->add_option("--Q", wa.Q, "Mathieu Q")->capture_default_str();
    workpoint->add_option("--k", wa.k, "Sideband index")->capture_default_str();
    workpoint->add_option("--tongue", wa.tongue, "Stability region index or 'auto'")->capture_default_str();
    workpoint->add_option("--ion", wa.ion, "Ion species for R_k: Ca40, Be9 or P")->capture_default_str();
    workpoint->add_flag("--check", wa.check, "Verify round trip (and reference values at the default point)");

    auto* entangle = app.add_subcommand("entangle", "Single-excitation amplitudes along an exchange plan, as CSV");
    EntangleArgs ea;
    entangle->add_option("--g", ea.g, "Coupling rate with unit, e.g. \"5.6 Hz\" (times 2 pi)")->capture_default_str();
    entangle->add_option("--m", ea.m, "Lattice index m")->capture_default_str();
    entangle->add_option("--n", ea.n, "Lattice index n")->capture_default_str();
    entangle->add_option("--samples", ea.samples, "Number of time samples")->capture_default_str();
    entangle->add_flag("--numeric", ea.numeric, "Integrate the amplitude equations and add a deviation column");
    entangle->add_option("--out", ea.out_file, "CSV file (default stdout)");

    auto* exchange = app.add_subcommand("exchange", "Single in-phase exchange trajectory with analytic overlay");
    add_common(exchange, false, true);

    auto* ensemble = app.add_subcommand("ensemble", "Monte-Carlo exchange-cooling ensemble");
    add_common(ensemble, true, true);
    std::optional<std::uint64_t> seed;
    std::optional<std::string> delta;
    std::optional<long> n_traj;
    ensemble->add_option("--seed", seed, "Master seed (overrides [ensemble].seed)");
    ensemble->add_option("--delta-omega", delta,
                         "Detuning std: \"100 mHz\" for additive, a plain number for relative detuning");
    ensemble->add_option("--n-traj", n_traj, "Number of trajectories")->check(CLI::PositiveNumber);

    auto* replay = app.add_subcommand("replay", "Rerun a stability, exchange or ensemble manifest");
    std::string manifest;
    replay->add_option("manifest", manifest, "manifest.json or sweep.json")->required()->check(CLI::ExistingFile);
    replay->add_option("--out", common.out_dir, "Output directory (default: the recorded one)");
    replay->add_option("--threads", common.threads, "Worker cap");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        for (auto* sub : app.get_subcommands()) {
            err << sub->help();
        }
        return exit_config;
    }

    try {
        if (*stability) {
            RunConfig cfg = load_or_default(common);
            if (k_override) {
                cfg.sweep.k = *k_override;
            }
            return cmd_stability(cfg, common.threads, out);
        }
        if (*workpoint) {
            return cmd_workpoint(wa, out, err);
        }
        if (*entangle) {
            return cmd_entangle(ea, out, err);
        }
        if (*exchange) {
            return cmd_exchange(load_or_default(common), common.check, out, err);
        }
        if (*ensemble) {
            RunConfig cfg = load_or_default(common);
            if (seed) cfg.ensemble.seed = *seed;
            if (n_traj) cfg.ensemble.n_traj = *n_traj;
            if (delta) {
                try {
                    cfg.ensemble.delta_omega = cfg.ensemble.detuning == DetuningMode::additive
                                                   ? parse_quantity(*delta, Quantity::frequency)
                                                   : std::stod(*delta);
                } catch (const std::invalid_argument&) {
                    throw ConfigError("--delta-omega: '" + *delta + "' is not a number");
                }
                if (!(cfg.ensemble.delta_omega >= 0.0)) {
                    throw ConfigError("--delta-omega must be >= 0");
                }
            }
            return cmd_ensemble(cfg, common.threads, common.check, out, err);
        }
        if (*replay) {
            return cmd_replay(manifest, common.out_dir, common.threads, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return classify(e);
    }
    return exit_config;
}

}  // namespace wirebus::cli
