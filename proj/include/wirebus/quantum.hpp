#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace wirebus {

using Complex = std::complex<double>;

/// Ion-electron-ion couplings and detunings (rad/s).
struct TripartiteCoupling {
    double g1 = 0.0;
    double g2 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
};

/// Single-excitation amplitudes of |1,0,0>, |0,1,0> (ions) and |0,0,1>
/// (electron), in the frame where the electron rotates at delta1.
struct AmplitudeState {
    Complex c100;
    Complex c010;
    Complex c001;
    [[nodiscard]] double norm() const { return std::norm(c100) + std::norm(c010) + std::norm(c001); }
};

enum class ExchangeKind { noon_at_half_tau, full_exchange, identity };
std::string to_string(ExchangeKind kind);

/// A point of the (m, n) lattice where the electron returns to vacuum.
/// delta is the positive root; -delta works equally. For odd n the state at
/// tau is a NOON state and the full swap happens at tau_swap = 2 tau.
struct ExchangePlan {
    int m = 0;
    int n = 0;
    double delta = 0.0;  // rad/s
    double tau = 0.0;    // s
    std::optional<double> tau_swap;  // s, absent when the ions return to their initial state
    ExchangeKind kind = ExchangeKind::identity;
};

/// Closed-form amplitudes for symmetric coupling, starting from |1,0,0>.
AmplitudeState amplitudes_at(double g, double delta, double t);

struct NumericAmplitudeOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-14;
};

/// Integrates the three-level amplitude equations from |1,0,0> and returns
/// the state at each requested time (times must be non-decreasing).
std::vector<AmplitudeState> numeric_amplitudes(const TripartiteCoupling& coupling, const std::vector<double>& times,
                                               const NumericAmplitudeOptions& options = {});
AmplitudeState numeric_amplitudes(const TripartiteCoupling& coupling, double t,
                                  const NumericAmplitudeOptions& options = {});

/// delta = g sqrt(8 n^2 / ((2m)^2 - n^2)), tau = (pi / 2|g|) sqrt(((2m)^2 - n^2) / 2).
/// (m, n) are replaced by their absolute values; requires |2m| > |n|.
ExchangePlan plan_exchange(double g, int m, int n);

/// The 2m = n + 1 family for odd n: delta = g sqrt(8 n^2 / (2n + 1)),
/// tau_swap = (pi/|g|) sqrt((2n + 1)/2).
ExchangePlan plan_swap_family(double g, int n);

struct ModeAmplitudes {
    Complex alpha1;
    Complex alpha2;
    Complex beta;
};

/// Resonant (delta = 0) linear maps of the coherent amplitudes, with g = sqrt(g1^2 + g2^2).
ModeAmplitudes heisenberg_exchange(double g1, double g2, Complex alpha1_0, Complex alpha2_0, Complex beta_0, double t);

struct TemperaturePair {
    double T_Be = 0.0;  // K
    double T_P = 0.0;   // K
};

/// Energies of the two ions for in-phase real initial amplitudes and an
/// electron at rest, expressed as temperatures E / k_B.
TemperaturePair analytic_temperatures(double g1, double g2, double T_Be0, double T_P0, double t);

}  // namespace wirebus
