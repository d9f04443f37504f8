#include "wirebus/model.hpp"

#include <cmath>
#include <string>

#include "wirebus/errors.hpp"

namespace wirebus {

void ParticleCloud::validate() const {
    if (count < 1) {
        throw DomainError("particle cloud: count must be >= 1, got " + std::to_string(count));
    }
    if (!(mass_per_particle > 0.0) || !std::isfinite(mass_per_particle)) {
        throw DomainError("particle cloud: mass must be positive");
    }
    if (!(trap_frequency > 0.0) || !std::isfinite(trap_frequency)) {
        throw DomainError("particle cloud: trap frequency must be positive");
    }
    if (effective_distance == 0.0 || !std::isfinite(effective_distance)) {
        throw DomainError("particle cloud: effective distance must be finite and non-zero");
    }
    if (!std::isfinite(charge_per_particle)) {
        throw DomainError("particle cloud: charge must be finite");
    }
}

void WireSpec::validate() const {
    if (!(capacitance_to_ground > 0.0) || !std::isfinite(capacitance_to_ground)) {
        throw DomainError("wire: capacitance to ground must be positive");
    }
}

void DriveParams::validate() const {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw DomainError("drive: frequency must be positive");
    }
    if (!(depth >= 0.0) || !std::isfinite(depth)) {
        throw DomainError("drive: depth must be >= 0");
    }
}

MathieuParams to_mathieu_params(const DriveParams& drive, double omega_e_eff) {
    drive.validate();
    if (drive.form != Form::effective) {
        throw DomainError("to_mathieu_params: drive depth must be the effective depth eta'");
    }
    if (!(omega_e_eff > 0.0) || !std::isfinite(omega_e_eff)) {
        throw DomainError("to_mathieu_params: effective electron frequency must be positive");
    }
    const double r = omega_e_eff / drive.frequency;
    const double A = 4.0 * r * r;
    return {A, -A * drive.depth / 2.0};
}

EffectiveDrive from_mathieu_params(const MathieuParams& params, double omega_d) {
    if (!(params.A > 0.0) || !std::isfinite(params.Q)) {
        throw DomainError("from_mathieu_params: A must be positive and Q finite");
    }
    if (!(omega_d > 0.0)) {
        throw DomainError("from_mathieu_params: drive frequency must be positive");
    }
    return {-2.0 * params.Q / params.A, omega_d * std::sqrt(params.A) / 2.0};
}

namespace {
ParticleCloud make_cloud(double q, double m, long count, double omega, double distance) {
    ParticleCloud c;
    c.charge_per_particle = q;
    c.mass_per_particle = m;
    c.count = count;
    c.trap_frequency = omega;
    c.effective_distance = distance;
    c.validate();
    return c;
}
}  // namespace

ParticleCloud make_electrons(long count, double trap_frequency, double distance, const PhysicalConstants& pc) {
    return make_cloud(-pc.q_e, pc.m_e, count, trap_frequency, distance);
}
ParticleCloud make_ca40(long count, double trap_frequency, double distance, const PhysicalConstants& pc) {
    return make_cloud(pc.q_e, pc.m_Ca40, count, trap_frequency, distance);
}
ParticleCloud make_be9(long count, double trap_frequency, double distance, const PhysicalConstants& pc) {
    return make_cloud(pc.q_e, pc.m_Be9, count, trap_frequency, distance);
}
ParticleCloud make_protons(long count, double trap_frequency, double distance, const PhysicalConstants& pc) {
    return make_cloud(pc.q_e, pc.m_P, count, trap_frequency, distance);
}

}  // namespace wirebus
