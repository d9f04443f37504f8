#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wirebus/dynamics.hpp"
#include "wirebus/mathieu.hpp"

namespace wirebus {

/// How the normal detunings modify omega_e' and omega_P'.
enum class DetuningMode {
    additive,  // omega += d, with std in rad/s
    relative,  // omega *= 1 + d, with a dimensionless std
};

enum class Propagation {
    floquet,  // powers of the one-period map, double-double
    direct,   // step-by-step integration with the configured integrator
};

std::string to_string(DetuningMode m);
std::string to_string(Propagation p);

struct EnsembleConfig {
    long n_traj = 500;
    double delta_omega_std = 0.0;
    DetuningMode detuning_mode = DetuningMode::additive;
    std::uint64_t master_seed = 0;
    double T_Be0 = 0.5e-3;  // K
    double T_e0 = 10.0;     // K
    double T_P0 = 10.0;     // K
    std::vector<double> sample_times;  // s, ascending, non-negative
    IntegratorConfig integrator{1e-10, 1e-10, Precision::double_precision};
    Propagation propagation = Propagation::floquet;
    unsigned threads = 0;  // 0 resolves through resolve_thread_count
    void validate() const;
};

/// Random inputs of one trajectory, drawn in this order.
struct TrajectoryDraw {
    double phi_P = 0.0;
    double phi_e = 0.0;
    double d_omega_e = 0.0;
    double d_omega_P = 0.0;
};

/// SplitMix64: 64-bit state, one multiply-xorshift output per call.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    std::uint64_t next();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller (the second variate is discarded).
    double normal();

  private:
    std::uint64_t state_;
};

/// The stream of trajectory j is a pure function of (master_seed, j).
SplitMix64 trajectory_stream(std::uint64_t master_seed, std::uint64_t j);
TrajectoryDraw draw_trajectory(std::uint64_t master_seed, std::uint64_t j, double std_dev);

/// System with the drawn detunings applied to the electron and the proton.
TriSystem detuned_system(const TriSystem& nominal, const TrajectoryDraw& d, DetuningMode mode);

struct EnsembleStats {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> p5;
    std::vector<double> p95;
    std::vector<long> n_ok;
};

struct EnsembleResult {
    std::vector<double> sample_times;
    std::vector<TrajectoryDraw> draws;
    std::vector<std::vector<double>> T_P;  // per trajectory; empty when it failed
    std::vector<std::string> errors;       // per trajectory; empty when it succeeded
    long n_failed = 0;
    EnsembleStats stats;
    std::string method;
    double wall_seconds = 0.0;
};

/// t_ex = pi / sqrt(g1^2 + g2^2).
double exchange_time(double g1, double g2);

/// Nearest-rank percentile of an ascending list: element ceil(p N / 100).
double nearest_rank_percentile(const std::vector<double>& sorted, double p);

/// Mean and 5th/95th percentiles per sample time over the trajectories
/// whose series is non-empty.
EnsembleStats aggregate(const std::vector<double>& times, const std::vector<std::vector<double>>& series);

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const TriSystem& sys, const FloquetSolution& sol);

/// Uniform grid of `intervals` + 1 times on [0, t_end].
std::vector<double> uniform_sample_times(double t_end, int intervals);

void write_summary_csv(std::ostream& os, const EnsembleStats& stats);
void write_trajectories_csv(std::ostream& os, const EnsembleResult& result);

}  // namespace wirebus
