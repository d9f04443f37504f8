#include "wirebus/coupling.hpp"

#include <cmath>
#include <sstream>

#include "wirebus/errors.hpp"

namespace wirebus {

double alpha(const ParticleCloud& cloud, const WireSpec& wire) {
    cloud.validate();
    wire.validate();
    const double q = cloud.charge_per_particle;
    const double w = cloud.trap_frequency;
    const double D = cloud.effective_distance;
    return static_cast<double>(cloud.count) * q * q /
           (wire.capacitance_to_ground * cloud.mass_per_particle * w * w * D * D);
}

double equivalent_inductance(const ParticleCloud& cloud) {
    cloud.validate();
    const double Q = cloud.total_charge();
    if (Q == 0.0) {
        throw DomainError("equivalent_inductance: neutral cloud has no circuit equivalent");
    }
    return cloud.total_mass() * cloud.effective_distance * cloud.effective_distance / (Q * Q);
}

double alpha_circuit(const ParticleCloud& cloud, const WireSpec& wire) {
    wire.validate();
    const double L = equivalent_inductance(cloud);
    const double C = 1.0 / (cloud.trap_frequency * cloud.trap_frequency * L);
    return C / wire.capacitance_to_ground;
}

double gamma(const ParticleCloud& a, const ParticleCloud& b, const WireSpec& wire) {
    a.validate();
    b.validate();
    wire.validate();
    return a.total_charge() * b.total_charge() /
           (wire.capacitance_to_ground * a.effective_distance * b.effective_distance);
}

double gamma_circuit_magnitude(const ParticleCloud& a, const ParticleCloud& b, const WireSpec& wire) {
    wire.validate();
    const double La = equivalent_inductance(a);
    const double Lb = equivalent_inductance(b);
    return std::sqrt(a.total_mass() * b.total_mass() / (La * Lb)) / wire.capacitance_to_ground;
}

double effective_frequency(const ParticleCloud& cloud, const WireSpec& wire) {
    if (cloud.frequency_form == Form::effective) {
        cloud.validate();
        return cloud.trap_frequency;
    }
    return cloud.trap_frequency * std::sqrt(1.0 + alpha(cloud, wire));
}

DriveParams effective_drive(const DriveParams& drive, const ParticleCloud& electron, const WireSpec& wire) {
    drive.validate();
    if (drive.form == Form::effective) {
        return drive;
    }
    ParticleCloud bare = electron;
    bare.frequency_form = Form::bare;
    return {drive.depth / (1.0 + alpha(bare, wire)), drive.frequency, Form::effective};
}

double g_rate(const CoupledPair& pair, const FloquetSolution& sol, int k, double resonance_tolerance) {
    if (!pair.drive) {
        throw PreconditionError("g_rate: the electron drive is required");
    }
    if (!sol.stable) {
        throw DomainError("g_rate: Floquet solution is unstable");
    }
    const double omega_d = pair.drive->frequency;
    const double omega_i = effective_frequency(pair.ion, pair.wire);
    const double w = sol.mu + 2.0 * k;
    const double sideband = w * omega_d / 2.0;
    if (!(std::abs(sideband - omega_i) <= resonance_tolerance * omega_i)) {
        std::ostringstream msg;
        msg << "g_rate: resonance (mu+2k) omega_d/2 = omega_i' violated: sideband " << ordinary(sideband)
            << " Hz vs ion " << ordinary(omega_i) << " Hz; required omega_d = (2pi) "
            << ordinary(2.0 * omega_i / w) << " Hz";
        throw PreconditionError(msg.str());
    }
    const double W = 0.5 * omega_d * sol.wronskian_xi;
    const double g = gamma(pair.ion, pair.electron, pair.wire);
    return g * sol.c(k) / (2.0 * std::sqrt(pair.ion.total_mass() * pair.electron.total_mass() * omega_i * W));
}

double g_ion_ion(const ParticleCloud& a, const ParticleCloud& b, const WireSpec& wire) {
    const double wa = effective_frequency(a, wire);
    const double wb = effective_frequency(b, wire);
    return gamma(a, b, wire) / (2.0 * std::sqrt(a.total_mass() * b.total_mass() * wa * wb));
}

double relative_strength(const FloquetSolution& sol, int k, double mass_ratio) {
    if (!(mass_ratio > 0.0)) {
        throw DomainError("relative_strength: mass ratio must be positive");
    }
    return d_factor(sol, k) * std::sqrt(mass_ratio);
}

double coupling_gain(double R0, int n) {
    if (n < 0) {
        throw DomainError("coupling_gain: n must be >= 0");
    }
    return R0 * std::sqrt(1.0 / (2.0 * (2.0 * n + 1.0)));
}

double exchange_gain(double g1, double g2, double g_ref, int n) {
    if (n < 0) {
        throw DomainError("exchange_gain: n must be >= 0");
    }
    if (g_ref == 0.0) {
        throw DomainError("exchange_gain: reference coupling is zero");
    }
    return std::sqrt(g1 * g1 + g2 * g2) / (2.0 * std::abs(g_ref) * std::sqrt(2.0 * n + 1.0));
}

CouplingReport coupling_report(const CoupledPair& pair, const FloquetSolution& sol, int k,
                               double resonance_tolerance) {
    CouplingReport r;
    r.alpha_a = alpha(pair.ion, pair.wire);
    r.alpha_b = alpha(pair.electron, pair.wire);
    r.gamma = gamma(pair.ion, pair.electron, pair.wire);
    r.omega_a_eff = effective_frequency(pair.ion, pair.wire);
    r.omega_b_eff = effective_frequency(pair.electron, pair.wire);
    r.g_k = g_rate(pair, sol, k, resonance_tolerance);
    // same-geometry ion-ion reference: the ion paired with a copy of itself
    ParticleCloud partner = pair.ion;
    r.g_ii_reference = g_ion_ion(pair.ion, partner, pair.wire);
    r.R_k = relative_strength(sol, k, pair.ion.mass_per_particle / pair.electron.mass_per_particle);
    return r;
}

}  // namespace wirebus
