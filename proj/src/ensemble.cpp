#include "wirebus/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "wirebus/errors.hpp"
#include "wirebus/parallel.hpp"

namespace wirebus {

std::string to_string(DetuningMode m) { return m == DetuningMode::additive ? "additive" : "relative"; }
std::string to_string(Propagation p) { return p == Propagation::floquet ? "floquet" : "direct"; }

void EnsembleConfig::validate() const {
    if (n_traj < 1) {
        throw ConfigError("ensemble: n_traj must be >= 1");
    }
    if (!(delta_omega_std >= 0.0) || !std::isfinite(delta_omega_std)) {
        throw ConfigError("ensemble: detuning standard deviation must be finite and >= 0");
    }
    for (double T : {T_Be0, T_e0, T_P0}) {
        if (!(T >= 0.0) || !std::isfinite(T)) {
            throw ConfigError("ensemble: initial temperatures must be finite and >= 0");
        }
    }
    if (sample_times.empty()) {
        throw ConfigError("ensemble: at least one sample time is required");
    }
    double prev = 0.0;
    for (double t : sample_times) {
        if (!(t >= prev) || !std::isfinite(t)) {
            throw ConfigError("ensemble: sample times must be finite, non-negative and ascending");
        }
        prev = t;
    }
    integrator.validate();
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

SplitMix64 trajectory_stream(std::uint64_t master_seed, std::uint64_t j) {
    // Run the index through one mixing round first so that neighbouring
    // seeds do not share streams at shifted indices.
    SplitMix64 mix(j);
    return SplitMix64(master_seed ^ mix.next());
}

TrajectoryDraw draw_trajectory(std::uint64_t master_seed, std::uint64_t j, double std_dev) {
    SplitMix64 rng = trajectory_stream(master_seed, j);
    auto phase = [&rng]() {
        const double phi = kTwoPi * rng.uniform();
        return phi < kTwoPi ? phi : 0.0;
    };
    TrajectoryDraw d;
    d.phi_P = phase();
    d.phi_e = phase();
    d.d_omega_e = std_dev * rng.normal();
    d.d_omega_P = std_dev * rng.normal();
    return d;
}

TriSystem detuned_system(const TriSystem& nominal, const TrajectoryDraw& d, DetuningMode mode) {
    TriSystem s = nominal;
    if (mode == DetuningMode::additive) {
        s.e.trap_frequency += d.d_omega_e;
        s.p.trap_frequency += d.d_omega_P;
    } else {
        s.e.trap_frequency *= 1.0 + d.d_omega_e;
        s.p.trap_frequency *= 1.0 + d.d_omega_P;
    }
    s.validate();
    return s;
}

double exchange_time(double g1, double g2) {
    const double g = std::hypot(g1, g2);
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw DomainError("exchange_time: g1^2 + g2^2 must be positive and finite");
    }
    return std::acos(-1.0) / g;
}

double nearest_rank_percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw DomainError("percentile of an empty list");
    }
    if (!(p >= 0.0 && p <= 100.0)) {
        throw DomainError("percentile must lie in [0, 100]");
    }
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

EnsembleStats aggregate(const std::vector<double>& times, const std::vector<std::vector<double>>& series) {
    EnsembleStats st;
    st.t = times;
    std::vector<double> column;
    for (std::size_t i = 0; i < times.size(); ++i) {
        column.clear();
        for (const auto& s : series) {
            if (s.empty()) {
                continue;
            }
            if (s.size() != times.size()) {
                throw DomainError("aggregate: series length differs from the number of sample times");
            }
            column.push_back(s[i]);
        }
        if (column.empty()) {
            throw DomainError("aggregate: no surviving trajectories");
        }
        // Summation in trajectory order keeps the mean independent of scheduling.
        double sum = 0.0;
        for (double v : column) {
            sum += v;
        }
        st.mean.push_back(sum / static_cast<double>(column.size()));
        std::sort(column.begin(), column.end());
        st.p5.push_back(nearest_rank_percentile(column, 5.0));
        st.p95.push_back(nearest_rank_percentile(column, 95.0));
        st.n_ok.push_back(static_cast<long>(column.size()));
    }
    return st;
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const TriSystem& sys, const FloquetSolution& sol) {
    cfg.validate();
    sys.validate();
    if (!sol.stable) {
        throw PreconditionError("run_ensemble: the nominal electron Floquet solution is unstable");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto n = static_cast<std::size_t>(cfg.n_traj);
    EnsembleResult res;
    res.sample_times = cfg.sample_times;
    res.draws.resize(n);
    res.T_P.resize(n);
    res.errors.resize(n);
    res.method = cfg.propagation == Propagation::floquet
                     ? "one-period map powers, double-double, " + IntegratorConfig::method()
                     : IntegratorConfig::method() + " / " + to_string(cfg.integrator.precision);

    parallel_for(n, resolve_thread_count(cfg.threads), [&](std::size_t j) {
        const TrajectoryDraw d = draw_trajectory(cfg.master_seed, j, cfg.delta_omega_std);
        res.draws[j] = d;
        try {
            // Initial conditions use the nominal frequencies; the motion uses the detuned ones.
            const MotionState init =
                initial_state_from_temperatures(cfg.T_Be0, cfg.T_P0, cfg.T_e0, d.phi_P, d.phi_e, sol, sys);
            const TriSystem actual = detuned_system(sys, d, cfg.detuning_mode);
            std::vector<double> tp;
            tp.reserve(cfg.sample_times.size());
            if (cfg.propagation == Propagation::floquet) {
                const FloquetPropagator prop(actual);
                for (const auto& s : prop.propagate(init, cfg.sample_times)) {
                    tp.push_back(s.T_P);
                }
            } else {
                for (const auto& s : integrate_at(actual, init, cfg.sample_times, cfg.integrator).samples) {
                    tp.push_back(s.T_P);
                }
            }
            for (double v : tp) {
                if (!std::isfinite(v)) {
                    throw NumericalError("non-finite proton temperature");
                }
            }
            res.T_P[j] = std::move(tp);
        } catch (const Error& e) {
            res.errors[j] = e.what();
            res.T_P[j].clear();
        }
    });

    for (const auto& e : res.errors) {
        if (!e.empty()) {
            ++res.n_failed;
        }
    }
    if (static_cast<double>(res.n_failed) > 0.01 * static_cast<double>(n)) {
        std::string first;
        for (const auto& e : res.errors) {
            if (!e.empty()) {
                first = e;
                break;
            }
        }
        throw NumericalError("run_ensemble: " + std::to_string(res.n_failed) + " of " + std::to_string(n) +
                             " trajectories failed (first: " + first + ")");
    }
    res.stats = aggregate(res.sample_times, res.T_P);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::vector<double> uniform_sample_times(double t_end, int intervals) {
    if (!(t_end > 0.0) || intervals < 1) {
        throw DomainError("uniform_sample_times: need t_end > 0 and at least one interval");
    }
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i < intervals; ++i) {
        t.push_back(t_end * static_cast<double>(i) / static_cast<double>(intervals));
    }
    t.push_back(t_end);
    return t;
}

void write_summary_csv(std::ostream& os, const EnsembleStats& st) {
    os << "t,mean_TP,p5_TP,p95_TP,n_ok\n";
    char buf[256];
    for (std::size_t i = 0; i < st.t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%ld\n", st.t[i], st.mean[i], st.p5[i], st.p95[i],
                      st.n_ok[i]);
        os << buf;
    }
}

void write_trajectories_csv(std::ostream& os, const EnsembleResult& r) {
    os << "traj,t,TP\n";
    char buf[128];
    for (std::size_t j = 0; j < r.T_P.size(); ++j) {
        for (std::size_t i = 0; i < r.T_P[j].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j, r.sample_times[i], r.T_P[j][i]);
            os << buf;
        }
    }
}

}  // namespace wirebus
