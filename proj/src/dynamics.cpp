#include "wirebus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "wirebus/coupling.hpp"
#include "wirebus/errors.hpp"

namespace wirebus {

namespace {

void require_effective(const ParticleCloud& c, const char* name) {
    if (c.frequency_form != Form::effective) {
        throw DomainError(std::string("TriSystem: ") + name + " trap frequency must be in effective form");
    }
}

DoubleDouble to_dd(double x) { return DoubleDouble(x); }
DoubleDouble to_dd(const DoubleDouble& x) { return x; }

template <class Real>
Real from_dd(const DoubleDouble& x);
template <>
double from_dd<double>(const DoubleDouble& x) {
    return static_cast<double>(x);
}
template <>
DoubleDouble from_dd<DoubleDouble>(const DoubleDouble& x) {
    return x;
}

// Equations of motion in scaled units: tau = omega_ref t and y_s = x_s / l_s
// with l_s = sqrt(k_B * 1 K / (M_s omega_ref^2)). In these units the energy
// of mode s in kelvin is (y_s'^2 + w2_s y_s^2) / 2 and the couplings become
// symmetric.
template <class Real>
struct ScaledModel {
    std::array<Real, 3> w2;
    Real kappa_be;
    Real kappa_p;
    Real nu_d;
    Real eta;
    double omega_ref = 0.0;
    std::array<double, 3> ell{};

    explicit ScaledModel(const TriSystem& sys) {
        sys.validate();
        const double k_B = kCodata2018.k_B;
        omega_ref = sys.be.trap_frequency;
        const std::array<double, 3> omega{sys.be.trap_frequency, sys.e.trap_frequency, sys.p.trap_frequency};
        const std::array<double, 3> mass{sys.be.total_mass(), sys.e.total_mass(), sys.p.total_mass()};
        const Real wr = Real(omega_ref);
        for (std::size_t s = 0; s < 3; ++s) {
            const Real r = Real(omega[s]) / wr;
            w2[s] = r * r;
            ell[s] = std::sqrt(k_B / (mass[s] * omega_ref * omega_ref));
        }
        const Real wr2 = wr * wr;
        kappa_be = Real(sys.gamma_be_e()) / (wr2 * Real(std::sqrt(mass[0] * mass[1])));
        kappa_p = Real(sys.gamma_p_e()) / (wr2 * Real(std::sqrt(mass[2] * mass[1])));
        nu_d = Real(sys.drive.frequency) / wr;
        eta = Real(sys.drive.depth);
    }

    [[nodiscard]] Real modulation(const Real& tau) const {
        using std::cos;
        return Real(1.0) + eta * cos(nu_d * tau);
    }

    void operator()(const Real& tau, const std::array<Real, 3>& y, std::array<Real, 3>& a) const {
        const Real m = modulation(tau);
        a[0] = -(w2[0] * y[0]) - kappa_be * y[1];
        a[1] = -(w2[1] * m * y[1]) - kappa_be * y[0] - kappa_p * y[2];
        a[2] = -(w2[2] * y[2]) - kappa_p * y[1];
    }

    void to_scaled(const MotionState& s, Real& tau, std::array<Real, 3>& y, std::array<Real, 3>& yp) const {
        tau = from_dd<Real>(s.t * DoubleDouble(omega_ref));
        for (std::size_t i = 0; i < 3; ++i) {
            y[i] = from_dd<Real>(s.x[i] / DoubleDouble(ell[i]));
            yp[i] = from_dd<Real>(s.v[i] / (DoubleDouble(ell[i]) * DoubleDouble(omega_ref)));
        }
    }

    [[nodiscard]] MotionState to_si(const Real& tau, const std::array<Real, 3>& y,
                                    const std::array<Real, 3>& yp) const {
        MotionState s;
        s.t = to_dd(tau) / DoubleDouble(omega_ref);
        for (std::size_t i = 0; i < 3; ++i) {
            s.x[i] = to_dd(y[i]) * DoubleDouble(ell[i]);
            s.v[i] = to_dd(yp[i]) * (DoubleDouble(ell[i]) * DoubleDouble(omega_ref));
        }
        return s;
    }

    [[nodiscard]] MotionSample sample(double t, const Real& tau, const std::array<Real, 3>& y,
                                      const std::array<Real, 3>& yp) const {
        MotionSample out;
        out.t = t;
        for (std::size_t i = 0; i < 3; ++i) {
            out.x[i] = to_double(y[i]) * ell[i];
            out.v[i] = to_double(yp[i]) * ell[i] * omega_ref;
        }
        const Real half = Real(0.5);
        out.T_Be = to_double(half * (yp[0] * yp[0] + w2[0] * y[0] * y[0]));
        out.T_e_inst = to_double(half * (yp[1] * yp[1] + w2[1] * modulation(tau) * y[1] * y[1]));
        out.T_P = to_double(half * (yp[2] * yp[2] + w2[2] * y[2] * y[2]));
        return out;
    }
};

template <class Real>
Trajectory run_scaled(const TriSystem& sys, const MotionState& init, const std::vector<DoubleDouble>& times,
                      const DoubleDouble& t_final, const IntegratorConfig& cfg) {
    const ScaledModel<Real> model(sys);
    Real tau;
    std::array<Real, 3> y;
    std::array<Real, 3> yp;
    model.to_scaled(init, tau, y, yp);
    RknOptions opts;
    opts.abs_tol = cfg.abs_tol;
    opts.rel_tol = cfg.rel_tol;
    Rkn1210<Real, 3> rkn(opts);
    Trajectory traj;
    traj.method = IntegratorConfig::method() + " / " + ScalarTraits<Real>::name;
    traj.samples.reserve(times.size());
    const DoubleDouble w = DoubleDouble(model.omega_ref);
    for (const DoubleDouble& t : times) {
        rkn.advance(model, tau, y, yp, from_dd<Real>(t * w));
        traj.samples.push_back(model.sample(static_cast<double>(t), tau, y, yp));
    }
    rkn.advance(model, tau, y, yp, from_dd<Real>(t_final * w));
    traj.final_state = model.to_si(tau, y, yp);
    traj.final_state.t = t_final;
    traj.stats = rkn.stats();
    return traj;
}

Trajectory dispatch(const TriSystem& sys, const MotionState& init, const std::vector<DoubleDouble>& times,
                    const DoubleDouble& t_final, const IntegratorConfig& cfg) {
    cfg.validate();
    if (cfg.precision == Precision::extended) {
        return run_scaled<DoubleDouble>(sys, init, times, t_final, cfg);
    }
    return run_scaled<double>(sys, init, times, t_final, cfg);
}

}  // namespace

// --- TriSystem ---------------------------------------------------------------

void TriSystem::validate() const {
    be.validate();
    e.validate();
    p.validate();
    wire1.validate();
    wire2.validate();
    drive.validate();
    require_effective(be, "Be");
    require_effective(e, "electron");
    require_effective(p, "proton");
    if (drive.form != Form::effective) {
        throw DomainError("TriSystem: drive depth must be in effective form");
    }
    if (!std::isfinite(e_distance_wire2) || e_distance_wire2 == 0.0) {
        throw DomainError("TriSystem: electron distance on the second wire must be finite and non-zero");
    }
}

double TriSystem::gamma_be_e() const { return gamma(be, e, wire1); }

double TriSystem::gamma_p_e() const { return gamma(p, electron_on_wire2(), wire2); }

ParticleCloud TriSystem::electron_on_wire2() const {
    ParticleCloud c = e;
    c.effective_distance = e_distance_wire2;
    return c;
}

std::array<double, 2> tri_coupling_rates(const TriSystem& sys, const FloquetSolution& sol) {
    sys.validate();
    const CoupledPair first{sys.be, sys.e, sys.wire1, sys.drive};
    const CoupledPair second{sys.p, sys.electron_on_wire2(), sys.wire2, sys.drive};
    return {g_rate(first, sol, 0), g_rate(second, sol, 0)};
}

double symmetric_be_distance_scale(const ExchangeSetupParams& p) {
    const PhysicalConstants& pc = kCodata2018;
    return std::sqrt((static_cast<double>(p.n_be) / pc.m_Be9) / (static_cast<double>(p.n_p) / pc.m_P));
}

ExchangeSetup make_exchange_setup(const ExchangeSetupParams& p) {
    if (!(p.drive_ratio > 0.0) || !(p.ion_frequency > 0.0) || !(p.distance > 0.0) || !(p.be_distance_scale > 0.0)) {
        throw DomainError("exchange setup: frequencies, distances and scales must be positive");
    }
    const double mu = 2.0 / p.drive_ratio;
    if (!(mu < 2.0)) {
        throw DomainError("exchange setup: drive_ratio must exceed 1");
    }
    const int tongue = p.tongue >= 0 ? p.tongue : default_tongue(mu, p.Q);
    const MathieuParams mp = inverse_solve_A(mu, p.Q, tongue);
    ExchangeSetup out;
    out.floquet = solve_floquet(mp);
    const double omega_d = p.drive_ratio * p.ion_frequency;
    const EffectiveDrive ed = from_mathieu_params(mp, omega_d);

    TriSystem& s = out.system;
    s.be = make_be9(p.n_be, p.ion_frequency, -p.distance * p.be_distance_scale);
    s.e = make_electrons(p.n_e, ed.omega_e_eff, p.distance);
    s.e_distance_wire2 = -p.distance;
    s.p = make_protons(p.n_p, p.ion_frequency, p.distance);
    s.be.frequency_form = Form::effective;
    s.e.frequency_form = Form::effective;
    s.p.frequency_form = Form::effective;
    s.wire1.capacitance_to_ground = p.capacitance;
    s.wire2.capacitance_to_ground = p.capacitance;
    s.drive = DriveParams{ed.eta_prime, omega_d, Form::effective};
    const auto g = tri_coupling_rates(s, out.floquet);
    out.g1 = g[0];
    out.g2 = g[1];
    return out;
}

// --- integration ---------------------------------------------------------------

std::string to_string(Precision p) { return p == Precision::extended ? "double-double" : "double"; }

void IntegratorConfig::validate() const {
    auto ok = [](double x) { return std::isfinite(x) && x > 0.0 && x <= 1e-6; };
    if (!ok(abs_tol) || !ok(rel_tol)) {
        throw ConfigError("integrator tolerances must lie in (0, 1e-6]");
    }
}

std::array<double, 3> eom_rhs(const TriSystem& sys, double t, const std::array<double, 3>& x) {
    const double g1 = sys.gamma_be_e();
    const double g2 = sys.gamma_p_e();
    const double wb = sys.be.trap_frequency;
    const double we = sys.e.trap_frequency;
    const double wp = sys.p.trap_frequency;
    const double mod = 1.0 + sys.drive.depth * std::cos(sys.drive.frequency * t);
    return {
        -wb * wb * x[0] - g1 * x[1] / sys.be.total_mass(),
        -we * we * mod * x[1] - (g1 * x[0] + g2 * x[2]) / sys.e.total_mass(),
        -wp * wp * x[2] - g2 * x[1] / sys.p.total_mass(),
    };
}

Trajectory integrate(const TriSystem& sys, const MotionState& init, double t_end, const IntegratorConfig& cfg,
                     double sample_every) {
    if (!(sample_every > 0.0) || !std::isfinite(t_end)) {
        throw DomainError("integrate: sample interval must be positive and t_end finite");
    }
    const DoubleDouble end(t_end);
    if (end < init.t) {
        throw DomainError("integrate: t_end precedes the initial time");
    }
    std::vector<DoubleDouble> times;
    const DoubleDouble dt(sample_every);
    for (long i = 0;; ++i) {
        const DoubleDouble t = init.t + DoubleDouble(static_cast<double>(i)) * dt;
        // A grid point that only misses t_end by rounding is t_end itself.
        if (t >= end || static_cast<double>(end - t) < 1e-9 * sample_every) {
            break;
        }
        times.push_back(t);
    }
    times.push_back(end);
    return dispatch(sys, init, times, end, cfg);
}

Trajectory integrate_at(const TriSystem& sys, const MotionState& init, const std::vector<double>& sample_times,
                        const IntegratorConfig& cfg) {
    std::vector<DoubleDouble> times;
    times.reserve(sample_times.size());
    for (double t : sample_times) {
        const DoubleDouble td(t);
        if (td < init.t || (!times.empty() && td < times.back())) {
            throw DomainError("integrate_at: sample times must be ascending and not precede the initial time");
        }
        times.emplace_back(td);
    }
    const DoubleDouble last = times.empty() ? init.t : times.back();
    return dispatch(sys, init, times, last, cfg);
}

MotionState propagate(const TriSystem& sys, const MotionState& init, double t_end, const IntegratorConfig& cfg) {
    return dispatch(sys, init, {}, DoubleDouble(t_end), cfg).final_state;
}

MotionSample sample_of(const TriSystem& sys, const MotionState& s) {
    const ScaledModel<DoubleDouble> model(sys);
    DoubleDouble tau;
    std::array<DoubleDouble, 3> y;
    std::array<DoubleDouble, 3> yp;
    model.to_scaled(s, tau, y, yp);
    return model.sample(static_cast<double>(s.t), tau, y, yp);
}

// --- initial conditions ----------------------------------------------------------

MotionState initial_state_from_temperatures(double T_Be, double T_P, double T_e, double phi_P, double phi_e,
                                            const FloquetSolution& sol, const TriSystem& sys) {
    sys.validate();
    for (double T : {T_Be, T_P, T_e}) {
        if (!(T >= 0.0) || !std::isfinite(T)) {
            throw DomainError("initial state: temperatures must be finite and non-negative");
        }
    }
    for (double phi : {phi_P, phi_e}) {
        if (!(phi >= 0.0 && phi < kTwoPi)) {
            throw DomainError("initial state: phases must lie in [0, 2 pi)");
        }
    }
    if (!sol.stable) {
        throw PreconditionError("initial state: the electron Floquet solution is unstable");
    }
    const double k_B = kCodata2018.k_B;
    MotionState s;
    s.t = DoubleDouble(0.0);

    const double m_be = sys.be.total_mass();
    s.x[0] = DoubleDouble(0.0);
    s.v[0] = DoubleDouble(std::sqrt(2.0 * k_B * T_Be / m_be));

    const double m_p = sys.p.total_mass();
    const double w_p = sys.p.trap_frequency;
    s.x[2] = DoubleDouble(std::sqrt(2.0 * k_B * T_P / (m_p * w_p * w_p)) * std::sin(phi_P));
    s.v[2] = DoubleDouble(std::sqrt(2.0 * k_B * T_P / m_p) * std::cos(phi_P));

    double sum_c = 0.0;
    double sum_mc = 0.0;
    for (int k = sol.k_min(); k <= sol.k_max(); ++k) {
        sum_c += sol.c(k);
        sum_mc += (sol.mu + 2.0 * k) * sol.c(k);
    }
    const double S = parseval_sum(sol);
    const double m_e = sys.e.total_mass();
    const double w_d = sys.drive.frequency;
    const double amp = std::sqrt(8.0 * k_B * T_e / (m_e * w_d * w_d * S));
    s.x[1] = DoubleDouble(amp * std::sin(phi_e) * sum_c);
    s.v[1] = DoubleDouble(0.5 * amp * w_d * std::cos(phi_e) * sum_mc);
    return s;
}

MotionState in_phase_initial_state(double T_Be, double T_P, const TriSystem& sys) {
    sys.validate();
    if (!(T_Be >= 0.0) || !(T_P >= 0.0) || !std::isfinite(T_Be) || !std::isfinite(T_P)) {
        throw DomainError("initial state: temperatures must be finite and non-negative");
    }
    const double k_B = kCodata2018.k_B;
    MotionState s;
    s.t = DoubleDouble(0.0);
    for (auto& x : s.x) {
        x = DoubleDouble(0.0);
    }
    s.v[0] = DoubleDouble(std::sqrt(2.0 * k_B * T_Be / sys.be.total_mass()));
    s.v[1] = DoubleDouble(0.0);
    s.v[2] = DoubleDouble(std::sqrt(2.0 * k_B * T_P / sys.p.total_mass()));
    return s;
}

double effective_electron_frequency(const FloquetSolution& sol, double omega_d) {
    if (!sol.stable) {
        throw PreconditionError("effective electron frequency needs a stable solution");
    }
    return omega_d * parseval_sum(sol) / (2.0 * sol.wronskian_xi);
}

// --- one-period propagator -------------------------------------------------------

namespace {

using DD = DoubleDouble;
using Vec6 = std::array<DD, 6>;
using Mat6 = std::array<std::array<DD, 6>, 6>;

Mat6 multiply(const Mat6& a, const Mat6& b) {
    Mat6 r{};
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            DD s(0.0);
            for (std::size_t k = 0; k < 6; ++k) {
                s += a[i][k] * b[k][j];
            }
            r[i][j] = s;
        }
    }
    return r;
}

Vec6 mat_vec(const Mat6& m, const Vec6& v) {
    Vec6 r{};
    for (std::size_t i = 0; i < 6; ++i) {
        DD s(0.0);
        for (std::size_t k = 0; k < 6; ++k) {
            s += m[i][k] * v[k];
        }
        r[i] = s;
    }
    return r;
}

}  // namespace

struct FloquetPropagator::Impl {
    ScaledModel<DD> model;
    DD period;  // one drive period in scaled time
    double tolerance;
    Mat6 monodromy{};

    Impl(const TriSystem& sys, double tol) : model(sys), period(dd_constants::two_pi / model.nu_d), tolerance(tol) {
        // All six basis states are carried through one period together.
        std::array<DD, 18> y{};
        std::array<DD, 18> yp{};
        for (std::size_t c = 0; c < 6; ++c) {
            if (c < 3) {
                y[3 * c + c] = DD(1.0);
            } else {
                yp[3 * c + (c - 3)] = DD(1.0);
            }
        }
        auto accel = [this](const DD& tau, const std::array<DD, 18>& q, std::array<DD, 18>& a) {
            const DD m = model.modulation(tau);
            for (std::size_t c = 0; c < 6; ++c) {
                const DD* yc = &q[3 * c];
                DD* ac = &a[3 * c];
                ac[0] = -(model.w2[0] * yc[0]) - model.kappa_be * yc[1];
                ac[1] = -(model.w2[1] * m * yc[1]) - model.kappa_be * yc[0] - model.kappa_p * yc[2];
                ac[2] = -(model.w2[2] * yc[2]) - model.kappa_p * yc[1];
            }
        };
        RknOptions opts;
        opts.abs_tol = tolerance;
        opts.rel_tol = tolerance;
        Rkn1210<DD, 18> rkn(opts);
        DD tau(0.0);
        rkn.advance(accel, tau, y, yp, period);
        for (std::size_t c = 0; c < 6; ++c) {
            for (std::size_t i = 0; i < 3; ++i) {
                monodromy[i][c] = y[3 * c + i];
                monodromy[3 + i][c] = yp[3 * c + i];
            }
        }
    }
};

namespace {
double checked_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw DomainError("FloquetPropagator: tolerance must be positive");
    }
    return tol;
}
}  // namespace

FloquetPropagator::FloquetPropagator(const TriSystem& sys, double tolerance)
    : impl_(std::make_unique<Impl>(sys, checked_tolerance(tolerance))) {}

FloquetPropagator::~FloquetPropagator() = default;
FloquetPropagator::FloquetPropagator(FloquetPropagator&&) noexcept = default;
FloquetPropagator& FloquetPropagator::operator=(FloquetPropagator&&) noexcept = default;

long FloquetPropagator::periods_in(double t) const {
    const DD tau = DD(t) * DD(impl_->model.omega_ref);
    return static_cast<long>(std::floor(static_cast<double>(tau / impl_->period)));
}

std::vector<MotionSample> FloquetPropagator::propagate(const MotionState& init,
                                                       const std::vector<double>& sample_times) const {
    if (init.t != DD(0.0)) {
        throw PreconditionError("FloquetPropagator: the initial state must be given at t = 0");
    }
    const Impl& im = *impl_;
    std::array<DD, 3> y0;
    std::array<DD, 3> yp0;
    DD tau0;
    im.model.to_scaled(init, tau0, y0, yp0);
    Vec6 s0{y0[0], y0[1], y0[2], yp0[0], yp0[1], yp0[2]};

    std::vector<MotionSample> out;
    out.reserve(sample_times.size());
    std::vector<Mat6> powers{im.monodromy};
    RknOptions opts;
    opts.abs_tol = im.tolerance;
    opts.rel_tol = im.tolerance;
    double previous = 0.0;
    for (double t : sample_times) {
        if (!(t >= previous) || !std::isfinite(t)) {
            throw DomainError("FloquetPropagator: sample times must be finite, ascending and non-negative");
        }
        previous = t;
        const DD tau = DD(t) * DD(im.model.omega_ref);
        long n = static_cast<long>(std::floor(static_cast<double>(tau / im.period)));
        DD rem = tau - DD(static_cast<double>(n)) * im.period;
        if (rem < DD(0.0)) {
            --n;
            rem += im.period;
        } else if (rem >= im.period) {
            ++n;
            rem -= im.period;
        }
        Vec6 s = s0;
        std::size_t bit = 0;
        for (long k = n; k > 0; k >>= 1, ++bit) {
            while (powers.size() <= bit) {
                powers.push_back(multiply(powers.back(), powers.back()));
            }
            if (k & 1L) {
                s = mat_vec(powers[bit], s);
            }
        }
        std::array<DD, 3> y{s[0], s[1], s[2]};
        std::array<DD, 3> yp{s[3], s[4], s[5]};
        DD local(0.0);
        if (rem > DD(0.0)) {
            Rkn1210<DD, 3> rkn(opts);
            rkn.advance(im.model, local, y, yp, rem);
        }
        // The drive phase at local time equals that at tau, whole periods dropped.
        out.push_back(im.model.sample(t, local, y, yp));
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<MotionSample>& samples) {
    os << "t,x_Be,v_Be,x_e,v_e,x_P,v_P,T_Be,T_e_inst,T_P\n";
    char buf[512];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.x[0],
                      s.v[0], s.x[1], s.v[1], s.x[2], s.v[2], s.T_Be, s.T_e_inst, s.T_P);
        os << buf;
    }
}

}  // namespace wirebus
