#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "wirebus/coupling.hpp"
#include "wirebus/dynamics.hpp"
#include "wirebus/ensemble.hpp"
#include "wirebus/mathieu.hpp"
#include "wirebus/model.hpp"
#include "wirebus/quantum.hpp"
#include "wirebus/rkn1210.hpp"
#include "wirebus/sweep.hpp"

namespace wirebus::checks {

namespace {

using std::numbers::pi;

std::vector<FloquetSolution> random_stable_solutions(int draws) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ua(0.0, 16.0);
    std::uniform_real_distribution<double> uq(-8.0, 8.0);
    std::vector<FloquetSolution> out;
    for (int i = 0; i < draws; ++i) {
        const FloquetSolution s = solve_floquet({ua(rng), uq(rng)});
        if (s.stable) {
            out.push_back(s);
        }
    }
    return out;
}

double recurrence_residual(const FloquetSolution& s) {
    double worst = 0.0;
    for (int k = s.k_min() + 1; k < s.k_max(); ++k) {
        const double w = s.mu + 2.0 * k;
        worst = std::max(worst, std::abs((s.params.A - w * w) * s.c(k) - s.params.Q * (s.c(k + 1) + s.c(k - 1))));
    }
    return worst;
}

/// Im(conj f) f' at n points of one period, with f integrated from its series initial data.
std::vector<double> integrated_wronskian(const FloquetSolution& s, int n) {
    std::array<double, 2> y{0.0, 0.0};
    std::array<double, 2> v{0.0, 0.0};
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        y[0] += s.c(k);
        v[1] += (s.mu + 2.0 * k) * s.c(k);
    }
    RknOptions opts;
    opts.abs_tol = 1e-14;
    opts.rel_tol = 1e-14;
    Rkn1210<double, 2> rkn(opts);
    const double A = s.params.A;
    const double Q = s.params.Q;
    auto accel = [&](double xi, const std::array<double, 2>& x, std::array<double, 2>& a) {
        const double w = A - 2.0 * Q * std::cos(2.0 * xi);
        a[0] = -w * x[0];
        a[1] = -w * x[1];
    };
    double t = 0.0;
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        rkn.advance(accel, t, y, v, pi * i / (n - 1));
        out.push_back(std::imag(std::conj(std::complex<double>(y[0], y[1])) * std::complex<double>(v[0], v[1])));
    }
    return out;
}

TriSystem uncoupled_undriven() {
    TriSystem sys = make_exchange_setup().system;
    sys.be.charge_per_particle = 0.0;
    sys.p.charge_per_particle = 0.0;
    sys.drive.depth = 0.0;
    return sys;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---- core suites -------------------------------------------------------------------

bool normalization(Reporter& rep, const std::vector<FloquetSolution>& sols) {
    double worst = 0.0;
    for (const auto& s : sols) {
        double n = 0.0;
        for (double c : s.coefficients) {
            n += c * c;
        }
        worst = std::max(worst, std::abs(n - 1.0));
    }
    return rep.record("normalization", worst < 1e-12 && !sols.empty(),
                      format("max |sum c_k^2 - 1| = %.2e over %zu stable (A, Q) (limit 1e-12)", worst, sols.size()));
}

bool recurrence(Reporter& rep, const std::vector<FloquetSolution>& sols) {
    double worst = 0.0;
    for (const auto& s : sols) {
        worst = std::max(worst, recurrence_residual(s));
    }
    return rep.record("recurrence residual", worst < 1e-10,
                      format("max residual per k = %.2e (limit 1e-10)", worst));
}

bool wronskian(Reporter& rep, const std::vector<FloquetSolution>& sols) {
    double worst = 0.0;
    bool positive = true;
    const std::size_t n = std::min<std::size_t>(sols.size(), 20);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = sols[i];
        positive = positive && s.wronskian_xi > 0.0;
        const auto w = integrated_wronskian(s, 40);
        const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
        worst = std::max(worst, (*hi - *lo) / s.wronskian_xi);
        worst = std::max(worst, std::abs(w.front() - s.wronskian_xi) / s.wronskian_xi);
    }
    return rep.record("Wronskian constancy", positive && worst < 1e-8,
                      format("W_xi > 0 for all; max relative spread along integrated f = %.2e over %zu solutions "
                             "(limit 1e-8)",
                             worst, n));
}

bool energy_conservation(Reporter& rep, const PropertyOptions& opt) {
    Stopwatch sw;
    const ExchangeSetup nominal = make_exchange_setup();
    const double horizon = opt.energy_horizon > 0.0 ? opt.energy_horizon : exchange_time(nominal.g1, nominal.g2);
    const TriSystem sys = uncoupled_undriven();
    const double A = 4.0 * std::pow(sys.e.trap_frequency / sys.drive.frequency, 2);
    const MotionState init =
        initial_state_from_temperatures(0.5e-3, 10.0, 10.0, 1.0, 2.0, solve_floquet({A, 0.0}), sys);
    const IntegratorConfig cfg{1e-14, 1e-14, Precision::extended};
    const Trajectory tr = integrate(sys, init, horizon, cfg, horizon / 8.0);
    const MotionSample& s0 = tr.samples.front();
    double worst = 0.0;
    for (const auto& s : tr.samples) {
        worst = std::max({worst, rel(s.T_Be, s0.T_Be), rel(s.T_P, s0.T_P), rel(s.T_e_inst, s0.T_e_inst)});
    }
    return rep.record("energy conservation (gamma = 0)", worst < 1e-10,
                      format("max relative drift of Be, e, P energies over %.4g s = %.2e (limit 1e-10, %s)",
                             horizon, worst, tr.method.c_str()),
                      sw.seconds());
}

bool time_reversal(Reporter& rep) {
    Stopwatch sw;
    const ExchangeSetup s = make_exchange_setup();
    const MotionState init = initial_state_from_temperatures(0.5e-3, 10.0, 10.0, 1.1, 2.5, s.floquet, s.system);
    const IntegratorConfig cfg{1e-16, 1e-16, Precision::extended};
    const double t_end = 1e-3;
    const MotionState fwd = propagate(s.system, init, t_end, cfg);
    const MotionState back = propagate(s.system, fwd, 0.0, cfg);
    // Compare each oscillator in phase-space units, x scaled by its frequency.
    const std::array<double, 3> w{s.system.be.trap_frequency, s.system.e.trap_frequency, s.system.p.trap_frequency};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double dx = static_cast<double>(back.x[i] - init.x[i]) * w[i];
        const double dv = static_cast<double>(back.v[i] - init.v[i]);
        const double x = static_cast<double>(init.x[i]) * w[i];
        const double v = static_cast<double>(init.v[i]);
        worst = std::max(worst, std::hypot(dx, dv) / std::hypot(x, v));
    }
    return rep.record("time reversal", worst < 1e-9,
                      format("forward %.3g s then back, max relative phase-space error = %.2e (limit 1e-9)", t_end,
                             worst),
                      sw.seconds());
}

bool heisenberg_unitarity(Reporter& rep) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Complex a1(n(rng), n(rng));
        const Complex a2(n(rng), n(rng));
        const Complex b(n(rng), n(rng));
        const double g1 = std::abs(n(rng)) + 0.05;
        const double g2 = std::abs(n(rng)) + 0.05;
        const double t = 20.0 * std::abs(n(rng));
        const auto m = heisenberg_exchange(g1, g2, a1, a2, b, t);
        const double before = std::norm(a1) + std::norm(a2) + std::norm(b);
        const double after = std::norm(m.alpha1) + std::norm(m.alpha2) + std::norm(m.beta);
        worst = std::max(worst, std::abs(after - before) / before);
    }
    return rep.record("Heisenberg-map unitarity", worst < 1e-12,
                      format("max relative change of |a1|^2 + |a2|^2 + |b|^2 = %.2e over 200 draws (limit 1e-12)",
                             worst));
}

bool electron_independence(Reporter& rep) {
    std::mt19937_64 rng(47);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const double g = std::abs(n(rng)) + 0.1;
        const double t_ex = exchange_time(g, g);
        const Complex a1(n(rng), n(rng));
        const Complex a2(n(rng), n(rng));
        const auto ref = heisenberg_exchange(g, g, a1, a2, Complex(0.0), t_ex);
        for (int i = 0; i < 20; ++i) {
            const auto m = heisenberg_exchange(g, g, a1, a2, Complex(n(rng), n(rng)), t_ex);
            worst = std::max({worst, std::abs(m.alpha1 - ref.alpha1), std::abs(m.alpha2 - ref.alpha2)});
        }
    }
    return rep.record("electron independence at t_ex", worst < 1e-12,
                      format("max |alpha(t_ex; beta_0) - alpha(t_ex; 0)| = %.2e over 5 x 20 random beta_0 "
                             "(limit 1e-12)",
                             worst));
}

// ---- extended ------------------------------------------------------------------------

bool standard_form_round_trip(Reporter& rep) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    double worst = 0.0;
    bool opposite = true;
    for (int i = 0; i < 200; ++i) {
        const DriveParams d{u(rng), u(rng) * 1e7, Form::effective};
        const double we = u(rng) * 1e7;
        const MathieuParams p = to_mathieu_params(d, we);
        const EffectiveDrive back = from_mathieu_params(p, d.frequency);
        worst = std::max({worst, rel(back.eta_prime, d.depth), rel(back.omega_e_eff, we)});
        opposite = opposite && p.Q < 0.0;
    }
    return rep.record("standard-form round trip", worst < 1e-14 && opposite,
                      format("max relative error = %.2e (limit 1e-14); Q < 0 for every eta' > 0", worst));
}

bool undriven_solutions(Reporter& rep) {
    bool ok = true;
    for (double A : {0.04, 0.25, 0.81, 2.25, 6.25, 12.96}) {
        const FloquetSolution s = solve_floquet({A, 0.0});
        int nonzero = 0;
        for (double c : s.coefficients) {
            nonzero += c != 0.0 ? 1 : 0;
        }
        const double expect = std::fmod(std::sqrt(A), 2.0);
        ok = ok && nonzero == 1 && std::abs(s.mu - expect) < 1e-12;
    }
    return rep.record("Q = 0 solutions", ok, "one nonzero coefficient and mu = sqrt(A) mod 2 for six A values");
}

bool boundary_integer_mu(Reporter& rep) {
    double worst = 0.0;
    for (double Q : {-6.0, -2.0, 0.5, 3.0}) {
        for (int j = 0; j < 3; ++j) {
            const TongueEdges e = tongue_edges(Q, j);
            for (int side = 0; side < 2; ++side) {
                // Start outside in the middle of the neighbouring gap; gaps can be far narrower than the bands.
                double in = 0.5 * (e.lower + e.upper);
                double out = 0.0;
                if (side == 0) {
                    out = j == 0 ? e.lower - 1.0 : 0.5 * (tongue_edges(Q, j - 1).upper + e.lower);
                } else {
                    out = 0.5 * (e.upper + tongue_edges(Q, j + 1).lower);
                }
                while (std::abs(in - out) > 1e-6) {
                    const double mid = 0.5 * (in + out);
                    (solve_floquet({mid, Q}).stable ? in : out) = mid;
                }
                const double mu = solve_floquet({in, Q}).mu;
                worst = std::max(worst, std::min({std::abs(mu), std::abs(mu - 1.0), std::abs(mu - 2.0)}));
            }
        }
    }
    return rep.record("band edges carry integer mu", worst < 1e-2,
                      format("after bisection to width 1e-6, max distance of mu from an integer = %.2e", worst));
}

bool amplitude_identities(Reporter& rep) {
    double norm_err = 0.0;
    double c001 = 0.0;
    for (int m = -5; m <= 5; ++m) {
        for (int n = -5; n <= 5; ++n) {
            if (std::abs(2 * m) <= std::abs(n)) {
                continue;
            }
            const ExchangePlan p = plan_exchange(1.7, m, n);
            for (double d : {p.delta, -p.delta}) {
                const AmplitudeState s = amplitudes_at(1.7, d, p.tau);
                c001 = std::max(c001, std::abs(s.c001));
                norm_err = std::max(norm_err, std::abs(s.norm() - 1.0));
            }
        }
    }
    double noon = 0.0;
    for (int n : {1, 3, 5, 7, 9}) {
        const ExchangePlan p = plan_swap_family(0.9, n);
        const AmplitudeState s = amplitudes_at(0.9, p.delta, *p.tau_swap / 2.0);
        noon = std::max({noon, std::abs(std::norm(s.c100) - 0.5), std::abs(std::norm(s.c010) - 0.5), std::abs(s.c001),
                         std::abs(std::abs(std::arg(s.c010 / s.c100)) - pi / 2.0)});
    }
    return rep.record("closed-form amplitude identities", norm_err < 1e-12 && c001 < 1e-10 && noon < 1e-10,
                      format("lattice |c001(tau)| max %.2e, norm error %.2e; NOON deviation at tau_swap/2 %.2e",
                             c001, norm_err, noon));
}

bool circuit_identities(Reporter& rep) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ParticleCloud a = make_ca40(static_cast<long>(1 + 10 * u(rng)), 2 * pi * 3e5 * u(rng), 3e-3 * u(rng));
        const ParticleCloud b =
            make_electrons(static_cast<long>(100 * u(rng)), 2 * pi * 1e7 * u(rng), -2e-3 * u(rng));
        const WireSpec w{5e-12 * u(rng)};
        worst = std::max({worst, rel(alpha(a, w), alpha_circuit(a, w)), rel(alpha(b, w), alpha_circuit(b, w)),
                          rel(std::abs(gamma(a, b, w)), gamma_circuit_magnitude(a, b, w))});
    }
    return rep.record("equivalent-circuit identities", worst < 1e-12,
                      format("alpha and |gamma| against the LC picture, max relative error %.2e (limit 1e-12)",
                             worst));
}

bool sweep_determinism(Reporter& rep, unsigned threads) {
    SweepGrid g;
    g.eta = {0.0, 2.0, 25};
    g.ratio = {0.2, 2.0, 25};
    g.mass_ratio = kCodata2018.m_Ca40 / kCodata2018.m_e;
    const SweepResult a = run_sweep(g, 1);
    const SweepResult b = run_sweep(g, std::max(2U, threads));
    std::ostringstream sa;
    std::ostringstream sb;
    write_sweep_csv(sa, a);
    write_sweep_csv(sb, b);
    double identity = 0.0;
    for (const auto& c : a.cells) {
        if (c.stable) {
            identity = std::max(identity, std::abs(*c.freq_ratio * (*c.mu + 2.0 * g.k) / 2.0 - c.ratio));
        }
    }
    return rep.record("sweep determinism", sa.str() == sb.str() && identity < 1e-12,
                      format("25 x 25 grid identical at 1 and %u workers; frequency identity error %.2e",
                             std::max(2U, threads), identity));
}

bool ensemble_reproducibility(Reporter& rep, unsigned threads) {
    Stopwatch sw;
    const ExchangeSetup s = make_exchange_setup();
    EnsembleConfig cfg;
    cfg.n_traj = 6;
    cfg.delta_omega_std = 2 * pi * 0.3;
    cfg.master_seed = 99;
    cfg.sample_times = uniform_sample_times(exchange_time(s.g1, s.g2), 4);
    cfg.threads = 1;
    const EnsembleResult r1 = run_ensemble(cfg, s.system, s.floquet);
    cfg.threads = std::max(2U, threads);
    const EnsembleResult r2 = run_ensemble(cfg, s.system, s.floquet);
    return rep.record("ensemble reproducibility", r1.T_P == r2.T_P && r1.stats.mean == r2.stats.mean,
                      format("6 trajectories bit-identical at 1 and %u workers", cfg.threads), sw.seconds());
}

bool phase_independence(Reporter& rep, unsigned threads) {
    Stopwatch sw;
    ExchangeSetupParams p;
    p.be_distance_scale = symmetric_be_distance_scale(p);
    const ExchangeSetup s = make_exchange_setup(p);
    EnsembleConfig cfg;
    cfg.n_traj = 100;
    cfg.delta_omega_std = 0.0;
    cfg.sample_times = {exchange_time(s.g1, s.g2)};
    cfg.threads = threads;
    const EnsembleResult r = run_ensemble(cfg, s.system, s.floquet);
    double lo = 1e300;
    double hi = -1e300;
    for (const auto& tp : r.T_P) {
        lo = std::min(lo, tp[0]);
        hi = std::max(hi, tp[0]);
    }
    const double spread = (hi - lo) / (0.5 * (hi + lo));
    return rep.record("phase independence at exact resonance", spread < 1e-6,
                      format("delta_omega = 0, g1 = g2: T_P(t_ex) in [%.6g, %.6g] K, relative spread %.2e over 100 "
                             "phase pairs (limit 1e-6)",
                             lo, hi, spread),
                      sw.seconds());
}

bool analytic_overlay(Reporter& rep) {
    Stopwatch sw;
    const ExchangeSetup s = make_exchange_setup();
    const double t_ex = exchange_time(s.g1, s.g2);
    const MotionState init = in_phase_initial_state(0.5e-3, 10.0, s.system);
    const std::vector<double> times{t_ex};
    auto gap = [&](const MotionSample& m) {
        return m.T_P - analytic_temperatures(s.g1, s.g2, 0.5e-3, 10.0, m.t).T_P;
    };
    const double g_ext = gap(FloquetPropagator(s.system).propagate(init, times).front());
    const auto run = [&](double tol) {
        return integrate_at(s.system, init, times, {tol, tol, Precision::double_precision}).samples.front();
    };
    const MotionSample d1 = run(1e-10);
    const MotionSample d2 = run(5e-11);
    const double g_dbl = gap(d1);
    const double halving = std::abs(d2.T_P - d1.T_P);
    const bool pass = std::abs(g_dbl) < 1e-6 && std::abs(g_ext) < 10e-9 && halving < std::abs(g_dbl);
    return rep.record("numeric vs analytic at t_ex", pass,
                      format("double (tol 1e-10) gap %.2e K (limit 1e-6); double-double gap %.2e K (limit 1e-8); "
                             "halving the tolerance moves T_P by %.2e K (< gap)",
                             g_dbl, g_ext, halving),
                      sw.seconds());
}

bool trend(Reporter& rep) {
    Stopwatch sw;
    const TrendReport full = trend_probe(200, 1, 0.1, 2.0);
    const TrendReport weak = trend_probe(100, 1, 0.1, 1.0);
    const double f = full.fraction_ordered();
    rep.record("R_0 trend across regions", f >= 0.9,
               format("R_0 ordered on %ld of %zu sampled region pairs (%.1f%%, required 90%%) for eta' in [0.1, 2]",
                      full.ordered, full.samples.size(), 100.0 * f),
               sw.seconds());
    rep.note(format("eta' in [0.1, 1]: ordered on %ld of %zu pairs", weak.ordered, weak.samples.size()));
    int listed = 0;
    for (const auto& t : full.samples) {
        if (!t.ordered() && listed < 5) {
            rep.note(format("unordered: eta' = %.4f, mu = %.4f, regions %d/%d, D_0 = %.4g -> %.4g", t.eta_prime,
                            t.mu, t.tongue, t.tongue + 2, t.R0_low, t.R0_high));
            ++listed;
        }
    }
    return f >= 0.9;
}

}  // namespace

bool run_core_properties(Reporter& rep, const PropertyOptions& opt) {
    const auto sols = random_stable_solutions(400);
    bool ok = true;
    ok = normalization(rep, sols) && ok;
    ok = recurrence(rep, sols) && ok;
    ok = wronskian(rep, sols) && ok;
    ok = energy_conservation(rep, opt) && ok;
    ok = time_reversal(rep) && ok;
    ok = heisenberg_unitarity(rep) && ok;
    ok = electron_independence(rep) && ok;
    return ok;
}

bool run_extended_properties(Reporter& rep, const PropertyOptions& opt) {
    bool ok = true;
    ok = standard_form_round_trip(rep) && ok;
    ok = undriven_solutions(rep) && ok;
    ok = boundary_integer_mu(rep) && ok;
    ok = amplitude_identities(rep) && ok;
    ok = circuit_identities(rep) && ok;
    ok = sweep_determinism(rep, opt.threads) && ok;
    ok = ensemble_reproducibility(rep, opt.threads) && ok;
    ok = analytic_overlay(rep) && ok;
    ok = phase_independence(rep, opt.threads) && ok;
    ok = trend(rep) && ok;
    return ok;
}

}  // namespace wirebus::checks
