#pragma once

#include <optional>

#include "wirebus/mathieu.hpp"
#include "wirebus/model.hpp"

namespace wirebus {

/// An ion cloud and a driven electron cloud sharing one wire.
struct CoupledPair {
    ParticleCloud ion;
    ParticleCloud electron;
    WireSpec wire;
    std::optional<DriveParams> drive;  // acts on the electron
};

struct CouplingReport {
    double alpha_a = 0.0;
    double alpha_b = 0.0;
    double gamma = 0.0;        // N/m
    double omega_a_eff = 0.0;  // rad/s
    double omega_b_eff = 0.0;  // rad/s
    double g_k = 0.0;          // rad/s, signed
    double g_ii_reference = 0.0;
    double R_k = 0.0;
};

/// alpha = N q^2 / (C_w m omega^2 D^2), with the bare trap frequency.
double alpha(const ParticleCloud& cloud, const WireSpec& wire);

/// Same quantity through the equivalent circuit: L = M D^2/Q_tot^2,
/// C = 1/(omega^2 L), alpha = C / C_w.
double alpha_circuit(const ParticleCloud& cloud, const WireSpec& wire);

/// Equivalent inductance of the cloud's centre-of-mass mode.
double equivalent_inductance(const ParticleCloud& cloud);

/// gamma = (N_a q_a)(N_b q_b) / (C_w D_a D_b), sign carried.
double gamma(const ParticleCloud& a, const ParticleCloud& b, const WireSpec& wire);

/// |gamma| from the circuit picture, sqrt(M_a M_b / (L_a L_b C_w^2)).
double gamma_circuit_magnitude(const ParticleCloud& a, const ParticleCloud& b, const WireSpec& wire);

/// omega' = omega sqrt(1 + alpha). Clouds whose frequency is already
/// effective are returned unchanged.
double effective_frequency(const ParticleCloud& cloud, const WireSpec& wire);

/// eta' = eta / (1 + alpha_e); an effective drive is returned unchanged.
DriveParams effective_drive(const DriveParams& drive, const ParticleCloud& electron, const WireSpec& wire);

/// Sideband coupling rate g_k = gamma c_k / (2 sqrt(M_i M_e omega_i' W)),
/// W = (omega_d/2) W_xi. Requires (mu + 2k) omega_d / 2 = omega_i' to
/// `resonance_tolerance` relative, else throws PreconditionError.
double g_rate(const CoupledPair& pair, const FloquetSolution& sol, int k, double resonance_tolerance = 1e-6);

/// Direct wire coupling between two undriven clouds,
/// g_ii = gamma / (2 sqrt(M_a M_b omega_a' omega_b')).
double g_ion_ion(const ParticleCloud& a, const ParticleCloud& b, const WireSpec& wire);

/// R_k = D_k sqrt(mass_ratio).
double relative_strength(const FloquetSolution& sol, int k, double mass_ratio);

/// gain = R_0 sqrt(1 / (2 (2n + 1))).
double coupling_gain(double R0, int n);

/// Gain of a two-sided exchange with rates g1, g2 over a direct reference
/// coupling g_ref: sqrt(g1^2 + g2^2) / (2 |g_ref| sqrt(2n + 1)). With
/// g1 = g2 = R_0 g_ref this reduces to coupling_gain(R_0, n).
double exchange_gain(double g1, double g2, double g_ref, int n);

CouplingReport coupling_report(const CoupledPair& pair, const FloquetSolution& sol, int k,
                               double resonance_tolerance = 1e-6);

}  // namespace wirebus
