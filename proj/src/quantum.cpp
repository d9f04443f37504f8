#include "wirebus/quantum.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "wirebus/errors.hpp"

namespace wirebus {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);
}  // namespace

std::string to_string(ExchangeKind kind) {
    switch (kind) {
        case ExchangeKind::noon_at_half_tau: return "noon_at_half_tau";
        case ExchangeKind::full_exchange: return "full_exchange";
        case ExchangeKind::identity: return "identity";
    }
    return "unknown";
}

AmplitudeState amplitudes_at(double g, double delta, double t) {
    if (g == 0.0) {
        return {Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0)};
    }
    const double dr = delta / g;
    const double root = std::sqrt(8.0 + dr * dr);
    const double arg = 0.5 * g * t * root;
    const Complex phase = std::exp(-0.5 * kI * g * t * dr);
    const Complex osc = 0.5 * phase * std::cos(arg) + kI * dr * phase / (2.0 * root) * std::sin(arg);
    AmplitudeState s;
    s.c100 = 0.5 + osc;
    s.c010 = -0.5 + osc;
    s.c001 = -2.0 * kI * phase / root * std::sin(arg);
    return s;
}

std::vector<AmplitudeState> numeric_amplitudes(const TripartiteCoupling& c, const std::vector<double>& times,
                                               const NumericAmplitudeOptions& options) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<Complex>;
    const double mismatch = c.delta1 - c.delta2;
    // electron amplitude taken in the frame rotating at delta1
    auto rhs = [&](const State& y, State& dy, double t) {
        const Complex rot = std::exp(kI * mismatch * t);
        dy[0] = -kI * (c.g1 * y[2]);
        dy[1] = -kI * (c.g2 * rot * y[2]);
        dy[2] = -kI * (c.delta1 * y[2] + c.g1 * y[0] + c.g2 * std::conj(rot) * y[1]);
    };
    State y{Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0)};
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_fehlberg78<State>());
    const double scale = std::abs(c.g1) + std::abs(c.g2) + std::abs(c.delta1) + std::abs(c.delta2);
    const double dt0 = scale > 0.0 ? 0.01 / scale : 1e-3;
    std::vector<AmplitudeState> out;
    out.reserve(times.size());
    double t = 0.0;
    for (double target : times) {
        if (target < t) {
            throw DomainError("numeric_amplitudes: sample times must be non-decreasing and >= 0");
        }
        if (target > t) {
            try {
                odeint::integrate_adaptive(stepper, rhs, y, t, target, dt0);
            } catch (const std::exception& ex) {
                throw NumericalError(std::string("numeric_amplitudes: integration failed: ") + ex.what());
            }
            t = target;
        }
        if (!std::isfinite(std::abs(y[0]) + std::abs(y[1]) + std::abs(y[2]))) {
            throw NumericalError("numeric_amplitudes: non-finite amplitudes");
        }
        out.push_back({y[0], y[1], y[2]});
    }
    return out;
}

AmplitudeState numeric_amplitudes(const TripartiteCoupling& coupling, double t, const NumericAmplitudeOptions& options) {
    return numeric_amplitudes(coupling, std::vector<double>{t}, options).front();
}

ExchangePlan plan_exchange(double g, int m, int n) {
    m = std::abs(m);
    n = std::abs(n);
    if (2 * m <= n) {
        throw DomainError("plan_exchange: requires |2m| > |n|");
    }
    if (g == 0.0 || !std::isfinite(g)) {
        throw DomainError("plan_exchange: coupling must be finite and non-zero");
    }
    const double d = 4.0 * m * m - static_cast<double>(n) * n;
    ExchangePlan plan;
    plan.m = m;
    plan.n = n;
    plan.delta = std::abs(g) * std::sqrt(8.0 * n * n / d);
    plan.tau = kPi / (2.0 * std::abs(g)) * std::sqrt(d / 2.0);
    if (n % 2 == 1) {
        plan.kind = ExchangeKind::noon_at_half_tau;
        plan.tau_swap = 2.0 * plan.tau;
    } else if ((m + n / 2) % 2 == 1) {
        plan.kind = ExchangeKind::full_exchange;
        plan.tau_swap = plan.tau;
    } else {
        plan.kind = ExchangeKind::identity;
    }
    return plan;
}

ExchangePlan plan_swap_family(double g, int n) {
    n = std::abs(n);
    if (n % 2 == 0) {
        throw DomainError("plan_swap_family: n must be odd");
    }
    return plan_exchange(g, (n + 1) / 2, n);
}

ModeAmplitudes heisenberg_exchange(double g1, double g2, Complex a1, Complex a2, Complex b, double t) {
    const double g2sum = g1 * g1 + g2 * g2;
    if (g2sum == 0.0) {
        return {a1, a2, b};
    }
    const double g = std::sqrt(g2sum);
    const double c = std::cos(g * t);
    const double s = std::sin(g * t);
    ModeAmplitudes out;
    out.alpha1 = a1 * (g1 * g1 * c + g2 * g2) / g2sum + a2 * (g1 * g2 / g2sum) * (c - 1.0) - kI * b * (g1 / g) * s;
    out.alpha2 = a2 * (g2 * g2 * c + g1 * g1) / g2sum + a1 * (g1 * g2 / g2sum) * (c - 1.0) - kI * b * (g2 / g) * s;
    out.beta = b * c - kI * (a1 * g1 + a2 * g2) / g * s;
    return out;
}

TemperaturePair analytic_temperatures(double g1, double g2, double T_Be0, double T_P0, double t) {
    if (T_Be0 < 0.0 || T_P0 < 0.0) {
        throw DomainError("analytic_temperatures: temperatures must be >= 0");
    }
    const ModeAmplitudes m = heisenberg_exchange(g1, g2, Complex(std::sqrt(T_Be0)), Complex(std::sqrt(T_P0)),
                                                 Complex(0.0), t);
    return {std::norm(m.alpha1), std::norm(m.alpha2)};
}

}  // namespace wirebus
