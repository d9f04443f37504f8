#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "wirebus/double_double.hpp"
#include "wirebus/mathieu.hpp"
#include "wirebus/model.hpp"
#include "wirebus/rkn1210.hpp"

namespace wirebus {

/// Be cloud, driven electron cloud and proton joined by two wires. All trap
/// frequencies are effective (wire-loaded) values. Index order everywhere is
/// (Be, e, P).
struct TriSystem {
    ParticleCloud be;  // effective_distance is D_{1,Be}
    ParticleCloud e;   // effective_distance is D_{1,e}
    double e_distance_wire2 = 0.0;  // D_{2,e}
    ParticleCloud p;   // effective_distance is D_{2,P}
    WireSpec wire1;
    WireSpec wire2;
    DriveParams drive;  // effective depth eta' and omega_d

    void validate() const;
    [[nodiscard]] double gamma_be_e() const;
    [[nodiscard]] double gamma_p_e() const;
    [[nodiscard]] ParticleCloud electron_on_wire2() const;
};

/// Parameters of the Be / electron / proton exchange setup.
struct ExchangeSetupParams {
    long n_be = 9;
    long n_e = 1000;
    long n_p = 1;
    double distance = 3.2e-3;       // m, magnitude for every electrode
    double capacitance = 5.5e-12;   // F, both wires
    double ion_frequency = angular(354.25e3);  // omega'_Be = omega'_P
    double drive_ratio = 25.0;      // omega_d / omega'_Be
    double Q = -6.0;
    int tongue = -1;                // -1 picks the lowest admissible region
    double be_distance_scale = 1.0; // scales |D_{1,Be}|, e.g. to equalise g1 and g2
};

struct ExchangeSetup {
    TriSystem system;
    FloquetSolution floquet;
    double g1 = 0.0;  // rad/s, Be-electron
    double g2 = 0.0;  // rad/s, proton-electron
};

ExchangeSetup make_exchange_setup(const ExchangeSetupParams& params = {});

/// |D_{1,Be}| scale that makes g1 = g2 for the given particle numbers.
double symmetric_be_distance_scale(const ExchangeSetupParams& params);

/// Signed sideband-0 rates of the Be-e and P-e couplings.
std::array<double, 2> tri_coupling_rates(const TriSystem& sys, const FloquetSolution& sol);

enum class Precision { double_precision, extended };
std::string to_string(Precision p);

struct IntegratorConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    Precision precision = Precision::extended;
    void validate() const;
    [[nodiscard]] static std::string method() { return "rkn12(10)"; }
};

/// Centre-of-mass positions (m), velocities (m/s) and time (s).
struct MotionState {
    DoubleDouble t;
    std::array<DoubleDouble, 3> x;
    std::array<DoubleDouble, 3> v;
};

struct MotionSample {
    double t = 0.0;
    std::array<double, 3> x{};
    std::array<double, 3> v{};
    double T_Be = 0.0;      // K, centre-of-mass energy / k_B
    double T_e_inst = 0.0;  // K, instantaneous electron energy incl. drive potential
    double T_P = 0.0;       // K
};

struct Trajectory {
    std::vector<MotionSample> samples;
    MotionState final_state;
    RknStats stats;
    std::string method;
};

/// Right-hand side of the classical equations of motion (SI).
std::array<double, 3> eom_rhs(const TriSystem& sys, double t, const std::array<double, 3>& x);

/// Integrates from init.t to t_end, sampling at init.t + i*sample_every
/// (and at t_end). Steps are clipped so every sample is hit exactly.
Trajectory integrate(const TriSystem& sys, const MotionState& init, double t_end, const IntegratorConfig& cfg,
                     double sample_every);

/// Integrates and samples at the given absolute times (ascending, >= init.t).
Trajectory integrate_at(const TriSystem& sys, const MotionState& init, const std::vector<double>& sample_times,
                        const IntegratorConfig& cfg);

/// Moves a state to t_end (either direction) without sampling.
MotionState propagate(const TriSystem& sys, const MotionState& init, double t_end, const IntegratorConfig& cfg);

MotionSample sample_of(const TriSystem& sys, const MotionState& s);

/// Be at phase 0 with energy k_B T_Be; proton at phase phi_P with k_B T_P;
/// electron on the Floquet orbit with time-averaged kinetic energy k_B T_e / 2.
MotionState initial_state_from_temperatures(double T_Be, double T_P, double T_e, double phi_P, double phi_e,
                                            const FloquetSolution& sol, const TriSystem& sys);

/// In-phase start used by the analytic comparison: every position zero,
/// electron at rest, Be and proton moving with energies k_B T.
MotionState in_phase_initial_state(double T_Be, double T_P, const TriSystem& sys);

/// omega_b = omega_d S / (2 W_xi).
double effective_electron_frequency(const FloquetSolution& sol, double omega_d);

/// Exact propagation of the linear periodic system by powers of the
/// one-drive-period state map, evaluated in double-double. Partial periods
/// are integrated directly.
class FloquetPropagator {
  public:
    explicit FloquetPropagator(const TriSystem& sys, double tolerance = 1e-26);
    ~FloquetPropagator();
    FloquetPropagator(FloquetPropagator&&) noexcept;
    FloquetPropagator& operator=(FloquetPropagator&&) noexcept;

    /// States at the given absolute times (ascending, >= init.t = 0).
    std::vector<MotionSample> propagate(const MotionState& init, const std::vector<double>& sample_times) const;

    /// Number of whole drive periods in t.
    [[nodiscard]] long periods_in(double t) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

void write_trajectory_csv(std::ostream& os, const std::vector<MotionSample>& samples);

}  // namespace wirebus
