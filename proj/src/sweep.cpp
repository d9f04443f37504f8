#include "wirebus/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "wirebus/errors.hpp"
#include "wirebus/parallel.hpp"

namespace wirebus {

double AxisRange::at(int i) const {
    if (i == steps - 1) {
        return max;
    }
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

void SweepGrid::validate() const {
    for (const AxisRange* r : {&eta, &ratio}) {
        if (r->steps < 2 || !std::isfinite(r->min) || !std::isfinite(r->max) || !(r->min < r->max)) {
            throw ConfigError("sweep grid: each axis needs steps >= 2 and finite min < max");
        }
    }
    if (eta.min < 0.0) {
        throw ConfigError("sweep grid: eta' must be non-negative");
    }
    if (!(ratio.min > 0.0)) {
        throw ConfigError("sweep grid: omega_e'/omega_d must be positive");
    }
    if (!(mass_ratio > 0.0) || !std::isfinite(mass_ratio)) {
        throw ConfigError("sweep grid: mass ratio must be positive");
    }
}

const SweepCell& SweepResult::at(int i_eta, int i_ratio) const {
    return cells.at(static_cast<std::size_t>(i_eta) * static_cast<std::size_t>(grid.ratio.steps) +
                    static_cast<std::size_t>(i_ratio));
}

long SweepResult::failed_cells() const {
    long n = 0;
    for (const auto& c : cells) {
        n += c.error.empty() ? 0 : 1;
    }
    return n;
}

SweepCell evaluate_cell(double eta_prime, double ratio, int k, double mass_ratio) {
    SweepCell cell;
    cell.eta_prime = eta_prime;
    cell.ratio = ratio;
    try {
        const double A = 4.0 * ratio * ratio;
        const FloquetSolution sol = solve_floquet({A, -A * eta_prime / 2.0});
        cell.stable = sol.stable;
        if (sol.stable) {
            const double R = d_factor(sol, k) * std::sqrt(mass_ratio);
            cell.mu = sol.mu;
            cell.R_k = R;
            cell.freq_ratio = ratio * 2.0 / (sol.mu + 2.0 * k);
        }
    } catch (const Error& e) {
        cell.stable = false;
        cell.mu.reset();
        cell.R_k.reset();
        cell.freq_ratio.reset();
        cell.error = e.what();
    }
    return cell;
}

SweepResult run_sweep(const SweepGrid& grid, unsigned threads) {
    grid.validate();
    SweepResult res;
    res.grid = grid;
    const auto n_ratio = static_cast<std::size_t>(grid.ratio.steps);
    const std::size_t n = static_cast<std::size_t>(grid.eta.steps) * n_ratio;
    res.cells.resize(n);
    parallel_for(n, resolve_thread_count(threads), [&](std::size_t idx) {
        const int i = static_cast<int>(idx / n_ratio);
        const int j = static_cast<int>(idx % n_ratio);
        res.cells[idx] = evaluate_cell(grid.eta.at(i), grid.ratio.at(j), grid.k, grid.mass_ratio);
    });
    return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "eta_prime,ratio_e_d,stable,mu,R_k,ratio_e_i\n";
    char buf[256];
    auto opt = [](const std::optional<double>& v) {
        if (!v) {
            return std::string();
        }
        char b[40];
        std::snprintf(b, sizeof b, "%.17g", *v);
        return std::string(b);
    };
    for (const auto& c : result.cells) {
        const char* stable = !c.error.empty() ? "" : (c.stable ? "1" : "0");
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,", c.eta_prime, c.ratio, stable);
        os << buf << opt(c.mu) << ',' << opt(c.R_k) << ',' << opt(c.freq_ratio) << '\n';
    }
}

double NarrownessHalf::fraction_above() const {
    return stable_cells > 0 ? static_cast<double>(above_threshold) / static_cast<double>(stable_cells) : 0.0;
}

NarrownessReport k1_narrowness_check(const SweepResult& result, double threshold) {
    if (result.grid.k != 1) {
        throw PreconditionError("k1_narrowness_check: the sweep must use k = 1");
    }
    NarrownessReport rep;
    rep.threshold = threshold;
    for (const auto& c : result.cells) {
        if (!c.stable || !c.R_k) {
            continue;
        }
        NarrownessHalf& h = c.eta_prime <= 1.0 ? rep.weak : rep.strong;
        ++h.stable_cells;
        if (*c.R_k > threshold) {
            ++h.above_threshold;
        }
        h.max_R = std::max(h.max_R, *c.R_k);
    }
    std::ostringstream s;
    auto describe = [&](const char* name, const NarrownessHalf& h) {
        s << name << ": ";
        if (h.stable_cells == 0) {
            s << "no stable cells";
        } else {
            s << h.stable_cells << " stable cells, " << h.above_threshold << " with R_1 > " << threshold
              << " (fraction " << h.fraction_above() << "), max R_1 = " << h.max_R;
        }
    };
    describe("eta' <= 1", rep.weak);
    s << "; ";
    describe("eta' > 1", rep.strong);
    rep.summary = s.str();
    return rep;
}

WorkingPoint locate_working_point(double omega_d_over_omega_i, double Q, int k, int tongue, double mass_ratio) {
    if (!(omega_d_over_omega_i > 0.0) || !std::isfinite(omega_d_over_omega_i) || !std::isfinite(Q)) {
        throw DomainError("locate_working_point: omega_d/omega_i' must be positive and Q finite");
    }
    if (!(mass_ratio > 0.0)) {
        throw DomainError("locate_working_point: mass ratio must be positive");
    }
    // For an integer ratio n this is the correctly rounded 2/n, e.g. exactly 0.08 for 25.
    const double mu = 2.0 / omega_d_over_omega_i - 2.0 * k;
    if (!(mu > 0.0 && mu < 2.0)) {
        std::ostringstream msg;
        msg << "locate_working_point: mu = " << mu << " for k = " << k << " lies outside (0, 2)";
        throw DomainError(msg.str());
    }
    if (mu == 1.0) {
        throw DomainError("locate_working_point: mu = 1 is a band edge (omega_d = 2 omega_i'), no stable interior point");
    }
    WorkingPoint wp;
    wp.mu = mu;
    wp.tongue = tongue >= 0 ? tongue : default_tongue(mu, Q);
    const MathieuParams p = inverse_solve_A(mu, Q, wp.tongue);
    wp.A = p.A;
    wp.Q = p.Q;
    if (!(p.A > 0.0)) {
        throw DomainError("locate_working_point: region has A <= 0, no physical electron frequency");
    }
    wp.solution = solve_floquet(p);
    wp.eta_prime = -2.0 * p.Q / p.A;
    wp.omega_e_over_omega_d = std::sqrt(p.A) / 2.0;
    wp.omega_e_over_omega_i = omega_d_over_omega_i * wp.omega_e_over_omega_d;
    wp.D_k = d_factor(wp.solution, k);
    wp.R_k = wp.D_k * std::sqrt(mass_ratio);
    return wp;
}

double TrendReport::fraction_ordered() const {
    return samples.empty() ? 0.0 : static_cast<double>(ordered) / static_cast<double>(samples.size());
}

std::optional<MathieuParams> point_on_ray(double eta_prime, double mu, int tongue) {
    if (!(eta_prime > 0.0) || !(mu > 0.0 && mu < 2.0) || mu == 1.0 || tongue < 0) {
        return std::nullopt;
    }
    if ((mu < 1.0) != (tongue % 2 == 0)) {
        return std::nullopt;
    }
    const double nu = mu < 1.0 ? mu : 2.0 - mu;
    // Root of h(Q) = Q + eta' A(Q) / 2 with A(Q) the band value at this nu.
    auto h = [&](double Q) { return Q + eta_prime * band_eigenvalue(nu, Q, tongue) / 2.0; };
    double hi = 0.0;
    if (!(h(hi) > 0.0)) {
        return std::nullopt;
    }
    double lo = -1.0;
    while (h(lo) > 0.0) {
        lo *= 2.0;
        if (lo < -1e4) {
            return std::nullopt;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? hi : lo) = mid;
    }
    const double Q = 0.5 * (lo + hi);
    const MathieuParams p{-2.0 * Q / eta_prime, Q};
    if (!(p.A > 0.0)) {
        return std::nullopt;
    }
    try {
        const FloquetSolution sol = solve_floquet(p);
        if (!sol.stable || sol.tongue != tongue || std::abs(sol.mu - mu) > 1e-8) {
            return std::nullopt;
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    return p;
}

TrendReport trend_probe(int samples, unsigned long long seed, double eta_min, double eta_max, int max_tongue) {
    if (!(eta_min > 0.0) || !(eta_max > eta_min)) {
        throw DomainError("trend_probe: need 0 < eta_min < eta_max");
    }
    TrendReport rep;
    // A small LCG is enough to spread the probe points reproducibly.
    unsigned long long state = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    auto uniform = [&state]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int s = 0; s < samples; ++s) {
        const double eta = eta_min + (eta_max - eta_min) * uniform();
        const bool upper = uniform() < 0.5;
        const double mu = upper ? 1.05 + 0.9 * uniform() : 0.05 + 0.9 * uniform();
        for (int j = upper ? 1 : 0; j + 2 <= max_tongue; j += 2) {
            const auto low = point_on_ray(eta, mu, j);
            const auto high = point_on_ray(eta, mu, j + 2);
            if (!low || !high) {
                continue;
            }
            TrendSample t;
            t.eta_prime = eta;
            t.mu = mu;
            t.tongue = j;
            t.ratio_low = std::sqrt(low->A) / 2.0;
            t.ratio_high = std::sqrt(high->A) / 2.0;
            t.R0_low = d_factor(solve_floquet(*low), 0);
            t.R0_high = d_factor(solve_floquet(*high), 0);
            rep.ordered += t.ordered() ? 1 : 0;
            rep.samples.push_back(t);
        }
    }
    return rep;
}

}  // namespace wirebus
