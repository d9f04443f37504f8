#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "wirebus/errors.hpp"
#include "wirebus/quantum.hpp"

using namespace wirebus;
using std::numbers::pi;

namespace {
double dist(const AmplitudeState& a, const AmplitudeState& b) {
    return std::max({std::abs(a.c100 - b.c100), std::abs(a.c010 - b.c010), std::abs(a.c001 - b.c001)});
}
}  // namespace

TEST_CASE("closed form at t = 0 and the resonant swap") {
    const auto s0 = amplitudes_at(3.0, 1.0, 0.0);
    CHECK(std::abs(s0.c100 - 1.0) < 1e-15);
    CHECK(std::abs(s0.c010) < 1e-15);
    CHECK(std::abs(s0.c001) < 1e-15);
    const double g = 2.0 * pi * 5.6;
    const auto sw = amplitudes_at(g, 0.0, pi / (std::sqrt(2.0) * g));
    CHECK(std::abs(sw.c100) < 1e-12);
    CHECK(std::abs(sw.c010 + 1.0) < 1e-12);
    CHECK(std::abs(sw.c001) < 1e-12);
    const auto none = amplitudes_at(0.0, 5.0, 1.0);
    CHECK(none.c100 == Complex(1.0));
}

TEST_CASE("n = 1 NOON state at half the swap time") {
    const double g = 1.7;
    const auto plan = plan_swap_family(g, 1);
    CHECK(plan.delta == doctest::Approx(g * std::sqrt(8.0 / 3.0)));
    REQUIRE(plan.tau_swap.has_value());
    CHECK(*plan.tau_swap == doctest::Approx(pi / g * std::sqrt(1.5)));
    CHECK(plan.kind == ExchangeKind::noon_at_half_tau);
    for (double delta : {plan.delta, -plan.delta}) {
        const auto s = amplitudes_at(g, delta, *plan.tau_swap / 2.0);
        CHECK(std::norm(s.c100) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(std::norm(s.c010) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(std::abs(s.c001) < 1e-10);
        const double rel_phase = std::arg(s.c010 / s.c100);
        CHECK(std::abs(std::abs(rel_phase) - pi / 2.0) < 1e-10);
        // full swap at tau_swap
        const auto f = amplitudes_at(g, delta, *plan.tau_swap);
        CHECK(std::norm(f.c010) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("plan classification") {
    const double g = 0.8;
    const auto p01 = plan_exchange(g, 1, 0);
    CHECK(p01.delta == 0.0);
    CHECK(p01.tau == doctest::Approx(pi / (std::sqrt(2.0) * g)));
    CHECK(p01.kind == ExchangeKind::full_exchange);
    const auto p22 = plan_exchange(g, 2, 2);
    CHECK(p22.kind == ExchangeKind::full_exchange);
    const auto num = numeric_amplitudes({g, g, p22.delta, p22.delta}, p22.tau);
    CHECK(std::abs(std::abs(num.c010) - 1.0) < 1e-10);
    const auto p20 = plan_exchange(g, 2, 0);
    CHECK(p20.kind == ExchangeKind::identity);
    CHECK_FALSE(p20.tau_swap.has_value());
    CHECK(std::norm(amplitudes_at(g, p20.delta, p20.tau).c100) == doctest::Approx(1.0));
    CHECK_THROWS_AS(plan_exchange(g, 1, 2), DomainError);
    CHECK_THROWS_AS(plan_swap_family(g, 2), DomainError);
    // canonicalised to positive representatives
    CHECK(plan_exchange(g, -3, -1).m == 3);
}

TEST_CASE("c001 vanishes at every lattice point") {
    for (int m = -5; m <= 5; ++m) {
        for (int n = -5; n <= 5; ++n) {
            if (std::abs(2 * m) <= std::abs(n)) {
                continue;
            }
            const auto p = plan_exchange(1.3, m, n);
            CHECK(std::abs(amplitudes_at(1.3, p.delta, p.tau).c001) < 1e-10);
            CHECK(std::abs(amplitudes_at(1.3, -p.delta, p.tau).c001) < 1e-10);
        }
    }
}

TEST_CASE("NOON check for odd-n plans") {
    for (int n : {1, 3, 5, 7, 9}) {
        const auto p = plan_swap_family(2.1, n);
        const auto s = amplitudes_at(2.1, p.delta, *p.tau_swap / 2.0);
        CHECK(std::abs(std::norm(s.c100) - 0.5) < 1e-10);
        CHECK(std::abs(std::norm(s.c010) - 0.5) < 1e-10);
        CHECK(std::abs(s.c001) < 1e-10);
        CHECK(std::abs(std::abs(std::arg(s.c010 / s.c100)) - pi / 2.0) < 1e-10);
    }
}

TEST_CASE("numeric amplitudes agree with the closed form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    std::uniform_real_distribution<double> ud(-6.0, 6.0);
    for (int i = 0; i < 10; ++i) {
        const double g = u(rng);
        const double delta = ud(rng);
        const double tau_swap = pi / g * std::sqrt(1.5);
        std::vector<double> ts;
        for (int k = 0; k <= 200; ++k) {
            ts.push_back(tau_swap * k / 200.0);
        }
        const auto num = numeric_amplitudes({g, g, delta, delta}, ts);
        double worst = 0.0;
        double norm_err = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            worst = std::max(worst, dist(num[k], amplitudes_at(g, delta, ts[k])));
            norm_err = std::max(norm_err, std::abs(num[k].norm() - 1.0));
            CHECK(std::abs(amplitudes_at(g, delta, ts[k]).norm() - 1.0) < 1e-12);
        }
        CHECK(worst < 1e-10);
        CHECK(norm_err < 1e-12);
    }
}

TEST_CASE("decoupled second ion") {
    const auto s = numeric_amplitudes({1.0, 0.0, 0.3, -0.7}, std::vector<double>{0.5, 1.0, 3.0});
    for (const auto& a : s) {
        CHECK(std::abs(a.c010) == 0.0);
        CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("Heisenberg maps") {
    const Complex a1(0.3, -0.2);
    const Complex a2(-1.1, 0.4);
    const auto id = heisenberg_exchange(1.0, 1.0, a1, a2, Complex(0.5, 0.5), 0.0);
    CHECK(std::abs(id.alpha1 - a1) < 1e-15);
    CHECK(std::abs(id.alpha2 - a2) < 1e-15);

    const double g = 2.0;
    const double t_ex = pi / std::hypot(g, g);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto ref = heisenberg_exchange(g, g, a1, a2, Complex(0.0), t_ex);
    CHECK(std::abs(ref.alpha1 + a2) < 1e-12);
    CHECK(std::abs(ref.alpha2 + a1) < 1e-12);
    for (int i = 0; i < 20; ++i) {
        const Complex b(n(rng), n(rng));
        const auto m = heisenberg_exchange(g, g, a1, a2, b, t_ex);
        CHECK(std::abs(m.alpha1 - ref.alpha1) < 1e-12);
        CHECK(std::abs(m.alpha2 - ref.alpha2) < 1e-12);
    }
    for (int i = 0; i < 50; ++i) {
        const Complex b(n(rng), n(rng));
        const double g1 = std::abs(n(rng)) + 0.1;
        const double g2 = std::abs(n(rng)) + 0.1;
        const double t = 10.0 * std::abs(n(rng));
        const auto m = heisenberg_exchange(g1, g2, a1, a2, b, t);
        const double before = std::norm(a1) + std::norm(a2) + std::norm(b);
        const double after = std::norm(m.alpha1) + std::norm(m.alpha2) + std::norm(m.beta);
        CHECK(std::abs(after - before) < 1e-12 * before);
    }
}

TEST_CASE("analytic temperatures") {
    const auto t0 = analytic_temperatures(1.0, 1.2, 5e-4, 10.0, 0.0);
    CHECK(t0.T_Be == doctest::Approx(5e-4));
    CHECK(t0.T_P == doctest::Approx(10.0));
    const double g = 3.0;
    const auto sw = analytic_temperatures(g, g, 5e-4, 10.0, pi / std::hypot(g, g));
    CHECK(sw.T_Be == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(sw.T_P == doctest::Approx(5e-4).epsilon(1e-10));
}
