#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wirebus/dynamics.hpp"
#include "wirebus/ensemble.hpp"
#include "wirebus/sweep.hpp"

namespace wirebus::cli {

enum class Quantity { frequency, length, capacitance, temperature, time };

/// Parses "354.25 kHz", "3.2 mm", "5.5 pF", "0.5 mK", "70 ms" into SI base
/// units. Frequencies come back in Hz (ordinary), never rad/s.
double parse_quantity(const std::string& text, Quantity q);
std::string format_quantity(double value, Quantity q);

struct TrapsSection {
    long be_count = 9;
    long electron_count = 1000;
    long proton_count = 1;
    double ion_frequency_hz = 354.25e3;  // effective, Be and proton
    double distance = 3.2e-3;            // m
    bool equalize_rates = false;         // rescale |D_{1,Be}| so that g1 = g2
    std::string ion = "Ca40";            // species for sweep / workpoint mass ratios
};

struct WireSection {
    double capacitance = 5.5e-12;  // F
    bool coupled = true;           // false zeroes the Be and proton charges
};

struct DriveSection {
    double omega_d_ratio = 25.0;  // omega_d / omega_i'
    double Q = -6.0;
    int tongue = -1;  // -1 = auto
    int k = 0;
};

struct SweepSection {
    double eta_min = 0.0;
    double eta_max = 2.0;
    int eta_steps = 400;
    double ratio_min = 0.2;
    double ratio_max = 2.0;
    int ratio_steps = 400;
    int k = 0;
    double narrowness_threshold = 50.0;
};

struct EnsembleSection {
    long n_traj = 500;
    double delta_omega = 0.1;  // Hz (additive) or dimensionless (relative)
    DetuningMode detuning = DetuningMode::additive;
    std::uint64_t seed = 0;
    double T_Be0 = 0.5e-3;
    double T_e0 = 10.0;
    double T_P0 = 10.0;
    int sample_intervals = 64;
    std::optional<double> t_end;  // s; empty = t_ex
    bool write_trajectories = false;
};

struct IntegratorSection {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    Precision precision = Precision::double_precision;
    Propagation propagation = Propagation::floquet;
};

struct OutputSection {
    std::string dir = ".";
    double sample_interval = 1e-4;  // s, exchange trajectory spacing
    double window = 1e-3;           // s, run continues this long past t_ex
};

struct RunConfig {
    TrapsSection traps;
    WireSection wire;
    DriveSection drive;
    SweepSection sweep;
    EnsembleSection ensemble;
    IntegratorSection integrator;
    OutputSection output;
};

/// Parses a TOML document. Unknown sections or keys, wrong types and bad
/// units raise ConfigError naming the line and field.
RunConfig parse_config(const std::string& text, const std::string& source_name = "config");
RunConfig load_config(const std::string& path);

/// Every field with its resolved value, in a form parse_config accepts.
std::string echo_config(const RunConfig& cfg);

/// FNV-1a 64-bit hash of the text, as 16 hex digits.
std::string config_hash(const std::string& text);

/// Ion mass over electron mass for "Ca40", "Be9" or "P".
double ion_mass_ratio(const std::string& ion);

ExchangeSetupParams setup_params(const RunConfig& cfg);
/// Exchange setup with the wire switch applied.
ExchangeSetup build_setup(const RunConfig& cfg);
SweepGrid sweep_grid(const RunConfig& cfg);
IntegratorConfig integrator_config(const RunConfig& cfg);

}  // namespace wirebus::cli
