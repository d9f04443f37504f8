#include "wirebus/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wirebus/double_double.hpp"
#include "wirebus/errors.hpp"
#include "wirebus/rkn1210.hpp"

namespace wirebus {

namespace {

constexpr double kPi = std::numbers::pi;

// The truncated operator H(nu): diagonal (nu + 2k)^2 for k = -K..K, constant
// off-diagonal Q. Indices run i = k + K.
std::vector<double> band_diagonal(double nu, int K) {
    std::vector<double> d(static_cast<std::size_t>(2 * K + 1));
    for (int k = -K; k <= K; ++k) {
        const double s = nu + 2.0 * k;
        d[static_cast<std::size_t>(k + K)] = s * s;
    }
    return d;
}

// Number of eigenvalues strictly below x (Sturm sequence via LDL^T pivots).
int sturm_count(const std::vector<double>& d, double Q, double x) {
    const double q2 = Q * Q;
    int count = 0;
    double pivot = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        pivot = (d[i] - x) - (i == 0 ? 0.0 : q2 / pivot);
        if (pivot == 0.0) {
            pivot = -1e-300;
        }
        if (pivot < 0.0) {
            ++count;
        }
    }
    return count;
}

double bisect_eigenvalue(const std::vector<double>& d, double Q, int j) {
    std::vector<double> sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + j, sorted.end());
    // Weyl: lambda_j lies within 2|Q| of the j-th diagonal entry
    double hi = sorted[static_cast<std::size_t>(j)] + 2.0 * std::abs(Q) + 1e-12;
    double lo = *std::min_element(d.begin(), d.end()) - 2.0 * std::abs(Q) - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (sturm_count(d, Q, mid) > j) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Solves (T) x = b in place for tridiagonal T with diagonal `diag` and
// constant off-diagonal q, using Gaussian elimination with partial pivoting.
void solve_tridiagonal(std::vector<double> diag, double q, std::vector<double>& b) {
    const std::size_t n = diag.size();
    std::vector<double> dl(n, q);
    std::vector<double> du(n, q);
    std::vector<double> du2(n, 0.0);
    std::vector<bool> swapped(n, false);
    double scale = 0.0;
    for (double v : diag) {
        scale = std::max(scale, std::abs(v));
    }
    // an exact zero pivot only occurs when the shift is an exact eigenvalue
    const double tiny = std::max(scale, std::abs(q)) * 1e-18 + 1e-300;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(dl[i])) {
            if (diag[i] == 0.0) {
                diag[i] = tiny;
            }
            const double fact = dl[i] / diag[i];
            dl[i] = fact;
            diag[i + 1] -= fact * du[i];
        } else {
            const double fact = diag[i] / dl[i];
            diag[i] = dl[i];
            dl[i] = fact;
            const double temp = du[i];
            du[i] = diag[i + 1];
            diag[i + 1] = temp - fact * diag[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if (diag[n - 1] == 0.0) {
        diag[n - 1] = tiny;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!swapped[i]) {
            b[i + 1] -= dl[i] * b[i];
        } else {
            const double temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl[i] * b[i];
        }
    }
    b[n - 1] /= diag[n - 1];
    if (n > 1) {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / diag[n - 2];
    }
    for (std::size_t ii = n; ii-- > 2;) {
        const std::size_t i = ii - 2;
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / diag[i];
    }
}

void normalize(std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    s = std::sqrt(s);
    for (double& v : x) {
        v /= s;
    }
}

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector;
};

// j-th eigenpair of H(nu): bisection for the value, inverse iteration for the
// vector, Rayleigh quotient for the final value.
EigenPair band_eigenpair(double nu, double Q, int j, int K) {
    const std::vector<double> d = band_diagonal(nu, K);
    const double shift = bisect_eigenvalue(d, Q, j);
    EigenPair ep;
    ep.vector.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        // deliberately asymmetric so no parity class is missed
        ep.vector[i] = 1.0 + 0.25 * std::sin(1.3 * static_cast<double>(i) + 0.7);
    }
    std::vector<double> shifted = d;
    for (double& v : shifted) {
        v -= shift;
    }
    for (int it = 0; it < 3; ++it) {
        solve_tridiagonal(shifted, Q, ep.vector);
        normalize(ep.vector);
    }
    double rq = 0.0;
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        double hx = d[i] * ep.vector[i];
        if (i > 0) {
            hx += Q * ep.vector[i - 1];
        }
        if (i + 1 < n) {
            hx += Q * ep.vector[i + 1];
        }
        rq += ep.vector[i] * hx;
    }
    ep.lambda = rq;
    return ep;
}

double nu_slope(double nu, const std::vector<double>& x, int K) {
    double s = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double c = x[static_cast<std::size_t>(k + K)];
        s += (nu + 2.0 * k) * c * c;
    }
    return 2.0 * s;
}

// Solves lambda_j(nu) = A for nu in [0, 1] by safeguarded Newton. The band
// function is monotone on [0, 1]; increasing for even j, decreasing for odd j.
EigenPair solve_nu(double A, double Q, int j, int K, double& nu_out) {
    const EigenPair e0 = band_eigenpair(0.0, Q, j, K);
    const EigenPair e1 = band_eigenpair(1.0, Q, j, K);
    const double dir = (j % 2 == 0) ? 1.0 : -1.0;
    double lo = 0.0;
    double hi = 1.0;
    // a cosine-shaped band is a good first guess even near the edges
    const double span = e0.lambda - e1.lambda;
    double nu = 0.5;
    if (span != 0.0) {
        const double cs = std::clamp((2.0 * A - e0.lambda - e1.lambda) / span, -1.0, 1.0);
        nu = std::acos(cs) / kPi;
    }
    nu = std::clamp(nu, 1e-3, 1.0 - 1e-3);
    EigenPair ep;
    for (int it = 0; it < 200; ++it) {
        ep = band_eigenpair(nu, Q, j, K);
        const double g = dir * (ep.lambda - A);  // increasing in nu
        if (std::abs(g) <= 1e-15 * std::max(1.0, std::abs(A))) {
            break;
        }
        if (g < 0.0) {
            lo = nu;
        } else {
            hi = nu;
        }
        const double slope = dir * nu_slope(nu, ep.vector, K);
        double next = slope > 0.0 ? nu - g / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - nu);
        nu = next;
        if (step < 1e-16 || hi - lo < 4e-16) {
            break;
        }
    }
    ep = band_eigenpair(nu, Q, j, K);
    nu_out = nu;
    return ep;
}

template <class Real>
MonodromyResult integrate_monodromy(const MathieuParams& p, double tol) {
    using std::cos;
    RknOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    Rkn1210<Real, 2> rkn(opts);
    const Real A(p.A);
    const Real twoQ(2.0 * p.Q);
    auto accel = [&](const Real& xi, const std::array<Real, 2>& y, std::array<Real, 2>& a) {
        const Real w = A - twoQ * cos(xi * 2.0);
        a[0] = -(w * y[0]);
        a[1] = -(w * y[1]);
    };
    Real t(0.0);
    std::array<Real, 2> y{Real(1.0), Real(0.0)};
    std::array<Real, 2> v{Real(0.0), Real(1.0)};
    Real period;
    if constexpr (std::is_same_v<Real, DoubleDouble>) {
        period = dd_constants::pi;
    } else {
        period = kPi;
    }
    rkn.advance(accel, t, y, v, period);

    MonodromyResult r;
    r.matrix = {to_double(y[0]), to_double(y[1]), to_double(v[0]), to_double(v[1])};
    const Real tr = y[0] + v[1];
    r.trace = to_double(tr);
    const double half_excess_plus = to_double(Real(1.0) - tr * 0.5);   // 1 - tr/2
    const double half_excess_minus = to_double(Real(1.0) + tr * 0.5);  // 1 + tr/2
    if (std::abs(r.trace) <= 2.0) {
        r.stable = true;
        double nu = 0.0;
        if (r.trace >= 0.0) {
            nu = (2.0 / kPi) * std::asin(std::sqrt(std::max(0.0, half_excess_plus) / 2.0));
        } else {
            nu = 1.0 - (2.0 / kPi) * std::asin(std::sqrt(std::max(0.0, half_excess_minus) / 2.0));
        }
        r.mu = (r.matrix[1] * std::sin(kPi * nu) > 0.0 || nu == 0.0) ? nu : 2.0 - nu;
        if (r.mu >= 2.0) {
            r.mu -= 2.0;
        }
    } else {
        r.stable = false;
        r.mu = r.trace > 0.0 ? 0.0 : 1.0;
        r.mu_imag = std::acosh(std::abs(r.trace) / 2.0) / kPi;
    }
    r.marginal = std::abs(std::abs(r.trace) - 2.0) < 1e-9;
    return r;
}

FloquetSolution solve_undriven(const MathieuParams& p, int K) {
    FloquetSolution sol;
    sol.params = p;
    if (p.A <= 0.0) {
        sol.stable = false;
        sol.marginal = p.A == 0.0;
        sol.mu = 0.0;
        sol.mu_imag = std::sqrt(-p.A);
        sol.truncation_order = K;
        return sol;
    }
    const double s = std::sqrt(p.A);
    const int k = static_cast<int>(std::floor(s / 2.0));
    double mu = s - 2.0 * k;
    if (mu >= 2.0) {
        mu -= 2.0;
    }
    K = std::max(K, k + 1);
    sol.stable = true;
    sol.mu = mu;
    sol.truncation_order = K;
    sol.coefficients.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
    sol.coefficients[static_cast<std::size_t>(k + K)] = 1.0;
    sol.wronskian_xi = s;
    const double nu = mu <= 1.0 ? mu : 2.0 - mu;
    int below = 0;
    for (int kk = -K; kk <= K; ++kk) {
        if (std::abs(nu + 2.0 * kk) < s) {
            ++below;
        }
    }
    sol.tongue = below;
    sol.marginal = (mu == 0.0 || mu == 1.0);
    return sol;
}

}  // namespace

double FloquetSolution::c(int k) const {
    if (k < -truncation_order || k > truncation_order || coefficients.empty()) {
        return 0.0;
    }
    return coefficients[static_cast<std::size_t>(k + truncation_order)];
}

double band_eigenvalue(double nu, double Q, int j, int K) {
    if (j < 0 || j >= 2 * K + 1) {
        throw DomainError("band_eigenvalue: index out of range");
    }
    return band_eigenpair(nu, Q, j, K).lambda;
}

MonodromyResult monodromy_oracle(const MathieuParams& params) {
    if (!std::isfinite(params.A) || !std::isfinite(params.Q)) {
        throw DomainError("monodromy_oracle: non-finite parameters");
    }
    return integrate_monodromy<DoubleDouble>(params, 1e-24);
}

FloquetSolution solve_floquet(const MathieuParams& params, std::optional<int> trunc, const FloquetOptions& options) {
    if (!std::isfinite(params.A) || !std::isfinite(params.Q)) {
        throw DomainError("solve_floquet: non-finite parameters");
    }
    int K = trunc.value_or(options.initial_truncation);
    if (K < 2) {
        throw DomainError("solve_floquet: truncation order must be >= 2");
    }
    if (params.Q == 0.0) {
        return solve_undriven(params, K);
    }
    double last_tail = 0.0;
    while (K <= options.max_truncation) {
        const int count0 = sturm_count(band_diagonal(0.0, K), params.Q, params.A);
        const int count1 = sturm_count(band_diagonal(1.0, K), params.Q, params.A);
        FloquetSolution sol;
        sol.params = params;
        sol.truncation_order = K;
        if (count0 == count1) {
            const MonodromyResult m = integrate_monodromy<double>(params, 1e-13);
            sol.stable = false;
            sol.mu = m.mu;
            sol.mu_imag = m.mu_imag;
            sol.marginal = sol.mu_imag < options.instability_tolerance;
            return sol;
        }
        const int j = std::min(count0, count1);
        double nu = 0.0;
        const EigenPair ep = solve_nu(params.A, params.Q, j, K, nu);

        const std::size_t n = ep.vector.size();
        std::vector<double> c(n, 0.0);
        if (nu_slope(nu, ep.vector, K) >= 0.0) {
            sol.mu = nu;
            c = ep.vector;
        } else {
            // other branch: mu = 2 - nu, c'_k = c_{-k-1}
            sol.mu = 2.0 - nu;
            for (int k = -K; k <= K; ++k) {
                const int src = -k - 1;
                if (src >= -K) {
                    c[static_cast<std::size_t>(k + K)] = ep.vector[static_cast<std::size_t>(src + K)];
                }
            }
        }
        if (sol.mu >= 2.0) {
            sol.mu -= 2.0;
        }
        normalize(c);
        double cmax = 0.0;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(c[i]) > cmax) {
                cmax = std::abs(c[i]);
                imax = i;
            }
        }
        const double c0 = c[static_cast<std::size_t>(K)];
        const double sign_ref = std::abs(c0) > 1e-12 * cmax ? c0 : c[imax];
        if (sign_ref < 0.0) {
            for (double& v : c) {
                v = -v;
            }
        }
        last_tail = std::max(std::abs(c.front()), std::abs(c.back())) / cmax;
        if (last_tail >= options.tail_tolerance) {
            K *= 2;
            continue;
        }
        sol.coefficients = std::move(c);
        sol.stable = true;
        sol.tongue = j;
        sol.wronskian_xi = wronskian_xi(sol);
        sol.marginal = 2.0 - 2.0 * std::abs(std::cos(kPi * sol.mu)) < options.instability_tolerance;
        return sol;
    }
    std::ostringstream msg;
    msg << "solve_floquet: coefficient tail did not decay below " << options.tail_tolerance
        << " up to truncation order " << options.max_truncation << " (A=" << params.A << ", Q=" << params.Q << ")";
    throw ConvergenceError(msg.str(), last_tail);
}

double wronskian_xi(const FloquetSolution& sol) {
    if (!sol.stable) {
        throw DomainError("wronskian_xi: solution is unstable");
    }
    // sum_{k,k'} c_k c_k' (mu + k + k') = (sum c_k) * (sum (mu + 2k) c_k)
    double sum_c = 0.0;
    double sum_wc = 0.0;
    for (int k = sol.k_min(); k <= sol.k_max(); ++k) {
        sum_c += sol.c(k);
        sum_wc += (sol.mu + 2.0 * k) * sol.c(k);
    }
    return sum_c * sum_wc;
}

double parseval_sum(const FloquetSolution& sol) {
    if (!sol.stable) {
        throw DomainError("parseval_sum: solution is unstable");
    }
    double s = 0.0;
    for (int k = sol.k_min(); k <= sol.k_max(); ++k) {
        const double v = (sol.mu + 2.0 * k) * sol.c(k);
        s += v * v;
    }
    return s;
}

double d_factor(const FloquetSolution& sol, int k) {
    if (!sol.stable) {
        throw DomainError("d_factor: solution is unstable");
    }
    const double w = sol.mu + 2.0 * k;
    if (!(w > 0.0)) {
        std::ostringstream msg;
        msg << "d_factor: mu + 2k = " << w << " is not positive for k = " << k;
        throw DomainError(msg.str());
    }
    return std::abs(sol.c(k)) * std::sqrt(w / sol.wronskian_xi);
}

TongueEdges tongue_edges(double Q, int tongue) {
    if (tongue < 0) {
        throw DomainError("tongue_edges: tongue index must be >= 0");
    }
    const double a0 = band_eigenvalue(0.0, Q, tongue);
    const double a1 = band_eigenvalue(1.0, Q, tongue);
    return {std::min(a0, a1), std::max(a0, a1)};
}

int default_tongue(double mu_target, double Q) {
    if (!(mu_target > 0.0 && mu_target < 2.0) || mu_target == 1.0) {
        throw DomainError("default_tongue: mu must lie in (0, 1) or (1, 2)");
    }
    const double nu = mu_target < 1.0 ? mu_target : 2.0 - mu_target;
    for (int j = mu_target < 1.0 ? 0 : 1; j < 40; j += 2) {
        if (band_eigenvalue(nu, Q, j) > 0.0) {
            return j;
        }
    }
    throw NotFoundError("default_tongue: no region with A > 0 among the first 40");
}

MathieuParams inverse_solve_A(double mu_target, double Q, int tongue) {
    if (!(mu_target > 0.0 && mu_target < 2.0) || !std::isfinite(Q)) {
        throw DomainError("inverse_solve_A: mu must lie in (0, 2) and Q must be finite");
    }
    if (tongue < 0) {
        throw DomainError("inverse_solve_A: tongue index must be >= 0");
    }
    const bool lower_half = mu_target < 1.0;
    const TongueEdges edges = tongue_edges(Q, tongue);
    if (mu_target == 1.0 || lower_half != (tongue % 2 == 0)) {
        std::ostringstream msg;
        msg << "inverse_solve_A: no root for mu=" << mu_target << " in region " << tongue << " (A in ["
            << edges.lower << ", " << edges.upper << "]); even regions carry mu in (0,1), odd regions mu in (1,2)";
        throw NotFoundError(msg.str());
    }
    const double nu = lower_half ? mu_target : 2.0 - mu_target;
    MathieuParams p{band_eigenvalue(nu, Q, tongue), Q};
    const FloquetSolution check = solve_floquet(p);
    if (!check.stable || check.tongue != tongue || std::abs(check.mu - mu_target) > 1e-10) {
        std::ostringstream msg;
        msg << "inverse_solve_A: forward check failed for mu=" << mu_target << " in region " << tongue
            << " (A in [" << edges.lower << ", " << edges.upper << "], got mu=" << check.mu << ")";
        throw NotFoundError(msg.str());
    }
    return p;
}

}  // namespace wirebus
