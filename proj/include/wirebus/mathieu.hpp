#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wirebus/model.hpp"

namespace wirebus {

/// Floquet solution f(xi) = exp(i mu xi) sum_k c_k exp(2 i k xi) of the
/// standard Mathieu equation, with Re(mu) in [0, 2) and sum c_k^2 = 1.
struct FloquetSolution {
    MathieuParams params;
    bool stable = false;
    bool marginal = false;     // within the instability tolerance of a band edge
    double mu = 0.0;
    double mu_imag = 0.0;      // zero for stable solutions
    int truncation_order = 0;  // K, coefficients span k = -K..K
    std::vector<double> coefficients;  // c_k stored at index k + K
    double wronskian_xi = 0.0;
    int tongue = -1;  // stability region index by increasing A, -1 when unstable

    [[nodiscard]] double c(int k) const;
    [[nodiscard]] int k_min() const { return -truncation_order; }
    [[nodiscard]] int k_max() const { return truncation_order; }
};

struct FloquetOptions {
    int initial_truncation = 32;
    int max_truncation = 512;
    double tail_tolerance = 1e-14;
    double instability_tolerance = 1e-9;
};

FloquetSolution solve_floquet(const MathieuParams& params, std::optional<int> trunc = std::nullopt,
                              const FloquetOptions& options = {});

/// W_xi = sum_{k,k'} c_k c_k' (mu + k + k'). Throws DomainError for unstable input.
double wronskian_xi(const FloquetSolution& sol);

/// S = sum_k ((mu + 2k) c_k)^2, the Parseval sum of the velocity series.
double parseval_sum(const FloquetSolution& sol);

/// D_k = |c_k| sqrt((mu + 2k)/W_xi).
double d_factor(const FloquetSolution& sol, int k);

/// Finds A with solve_floquet(A, Q).mu == mu_target inside stability region
/// `tongue` (counted from 0 by increasing A at fixed Q). Even regions carry
/// mu in (0, 1) and odd regions mu in (1, 2).
MathieuParams inverse_solve_A(double mu_target, double Q, int tongue);

/// Lowest stability region with the parity required by mu_target whose A is positive.
int default_tongue(double mu_target, double Q);

struct MonodromyResult {
    bool stable = false;
    bool marginal = false;
    double mu = 0.0;
    double mu_imag = 0.0;
    double trace = 0.0;
    std::array<double, 4> matrix{};  // row-major [x1 x2; x1' x2'] at xi = pi
};

/// Independent check: integrates the equation over one period in double-double.
MonodromyResult monodromy_oracle(const MathieuParams& params);

/// Band-edge values of A bounding stability region `tongue` at fixed Q.
struct TongueEdges {
    double lower = 0.0;
    double upper = 0.0;
};
TongueEdges tongue_edges(double Q, int tongue);

/// j-th (0-based) eigenvalue of the k-space operator with diagonal (nu + 2k)^2
/// and off-diagonal Q, truncated to |k| <= K.
double band_eigenvalue(double nu, double Q, int j, int K = 32);

}  // namespace wirebus
