#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wirebus/mathieu.hpp"

namespace wirebus {

struct AxisRange {
    double min = 0.0;
    double max = 1.0;
    int steps = 2;
    [[nodiscard]] double at(int i) const;
};

/// Grid over the effective drive depth eta' and omega_e'/omega_d.
struct SweepGrid {
    AxisRange eta{0.0, 2.0, 400};
    AxisRange ratio{0.2, 2.0, 400};
    int k = 0;
    double mass_ratio = 1.0;  // m_ion / m_e for R_k
    void validate() const;
};

struct SweepCell {
    double eta_prime = 0.0;
    double ratio = 0.0;  // omega_e' / omega_d
    bool stable = false;
    std::optional<double> mu;          // present for stable cells
    std::optional<double> R_k;         // present for stable cells
    std::optional<double> freq_ratio;  // omega_e' / omega_i', present for stable cells
    std::string error;                 // non-empty when the solver failed
};

/// Cells in row-major order: eta outer, ratio inner.
struct SweepResult {
    SweepGrid grid;
    std::vector<SweepCell> cells;
    [[nodiscard]] const SweepCell& at(int i_eta, int i_ratio) const;
    [[nodiscard]] long failed_cells() const;
};

/// Solves one (eta', omega_e'/omega_d) point; solver failures are recorded in the cell.
SweepCell evaluate_cell(double eta_prime, double ratio, int k, double mass_ratio);

SweepResult run_sweep(const SweepGrid& grid, unsigned threads = 0);

/// Header `eta_prime,ratio_e_d,stable,mu,R_k,ratio_e_i`; absent values are empty fields.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

struct NarrownessHalf {
    long stable_cells = 0;
    long above_threshold = 0;
    double max_R = 0.0;
    [[nodiscard]] double fraction_above() const;
};

struct NarrownessReport {
    double threshold = 0.0;
    NarrownessHalf weak;    // eta' <= 1
    NarrownessHalf strong;  // eta' > 1
    std::string summary;
};

/// Compares R_1 between eta' <= 1 and eta' > 1. Requires a k = 1 sweep.
NarrownessReport k1_narrowness_check(const SweepResult& result, double threshold);

struct WorkingPoint {
    double mu = 0.0;
    double A = 0.0;
    double Q = 0.0;
    int tongue = 0;
    double eta_prime = 0.0;
    double omega_e_over_omega_d = 0.0;
    double omega_e_over_omega_i = 0.0;
    double D_k = 0.0;
    double R_k = 0.0;
    FloquetSolution solution;
};

/// Reverse construction from the ion resonance: mu = 2 omega_i'/omega_d - 2k,
/// A from the inverse solve, eta' = -2Q/A, omega_e' = omega_d sqrt(A)/2.
/// tongue < 0 picks the lowest admissible region.
WorkingPoint locate_working_point(double omega_d_over_omega_i, double Q, int k, int tongue, double mass_ratio);

/// One comparison of R_0 at fixed (eta', mu) between a stability region and
/// the next one of the same parity (larger omega_e'/omega_d).
struct TrendSample {
    double eta_prime = 0.0;
    double mu = 0.0;
    int tongue = 0;
    double ratio_low = 0.0;
    double ratio_high = 0.0;
    double R0_low = 0.0;
    double R0_high = 0.0;
    [[nodiscard]] bool ordered() const { return R0_high <= R0_low; }
};

struct TrendReport {
    std::vector<TrendSample> samples;
    long ordered = 0;
    [[nodiscard]] double fraction_ordered() const;
};

/// Point on the ray Q = -eta' A / 2 inside `tongue` with exponent mu, if any.
std::optional<MathieuParams> point_on_ray(double eta_prime, double mu, int tongue);

/// Samples eta' uniformly in [eta_min, eta_max] and mu uniformly away from
/// the band edges, and compares R_0 between consecutive regions of the same
/// parity.
TrendReport trend_probe(int samples, unsigned long long seed, double eta_min = 0.1, double eta_max = 2.0,
                        int max_tongue = 6);

}  // namespace wirebus
