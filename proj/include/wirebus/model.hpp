#pragma once

#include <numbers>

namespace wirebus {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Converts an ordinary frequency in Hz to angular frequency in rad/s.
constexpr double angular(double hertz) { return kTwoPi * hertz; }
/// Converts an angular frequency in rad/s to an ordinary frequency in Hz.
constexpr double ordinary(double rad_per_s) { return rad_per_s / kTwoPi; }

// CODATA 2018 values. Ion masses are atomic masses minus one electron mass.
struct PhysicalConstants {
    double hbar;
    double k_B;
    double q_e;
    double m_e;
    double m_Ca40;
    double m_Be9;
    double m_P;
};

inline constexpr double kAtomicMassUnit = 1.66053906660e-27;
inline constexpr double kElectronMass = 9.1093837015e-31;

inline constexpr PhysicalConstants kCodata2018{
    1.054571817e-34,
    1.380649e-23,
    1.602176634e-19,
    kElectronMass,
    39.962590863 * kAtomicMassUnit - kElectronMass,
    9.0121831 * kAtomicMassUnit - kElectronMass,
    1.67262192369e-27,
};

/// Whether a stored frequency or depth already includes the wire loading.
enum class Form { bare, effective };

/// A cloud of identical charges whose centre-of-mass mode couples to one
/// wire. The coupling sees the cloud as a single particle with charge N*q
/// and mass N*m.
struct ParticleCloud {
    double charge_per_particle = 0.0;  // C, signed
    double mass_per_particle = 0.0;    // kg
    long count = 1;
    double trap_frequency = 0.0;       // rad/s
    double effective_distance = 0.0;   // m, signed
    Form frequency_form = Form::bare;

    [[nodiscard]] double total_charge() const { return static_cast<double>(count) * charge_per_particle; }
    [[nodiscard]] double total_mass() const { return static_cast<double>(count) * mass_per_particle; }
    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

struct WireSpec {
    double capacitance_to_ground = 0.0;  // F
    void validate() const;
};

struct DriveParams {
    double depth = 0.0;      // eta, or eta' when form == effective
    double frequency = 0.0;  // omega_d, rad/s
    Form form = Form::effective;
    void validate() const;
};

/// Standard form x'' + [A - 2Q cos 2xi] x = 0.
struct MathieuParams {
    double A = 0.0;
    double Q = 0.0;
};

/// Physical drive (eta', omega_e') recovered from a standard-form point.
struct EffectiveDrive {
    double eta_prime = 0.0;
    double omega_e_eff = 0.0;  // rad/s
};

/// A = 4 omega_e'^2/omega_d^2, Q = -A eta'/2. The drive must be in effective form.
MathieuParams to_mathieu_params(const DriveParams& drive, double omega_e_eff);

/// Inverse of to_mathieu_params: eta' = -2Q/A, omega_e' = omega_d sqrt(A)/2. Requires A > 0.
EffectiveDrive from_mathieu_params(const MathieuParams& params, double omega_d);

ParticleCloud make_electrons(long count, double trap_frequency, double distance,
                             const PhysicalConstants& pc = kCodata2018);
ParticleCloud make_ca40(long count, double trap_frequency, double distance,
                        const PhysicalConstants& pc = kCodata2018);
ParticleCloud make_be9(long count, double trap_frequency, double distance,
                       const PhysicalConstants& pc = kCodata2018);
ParticleCloud make_protons(long count, double trap_frequency, double distance,
                           const PhysicalConstants& pc = kCodata2018);

}  // namespace wirebus
