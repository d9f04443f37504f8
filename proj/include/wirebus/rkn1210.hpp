#pragma once

// Adaptive explicit Runge-Kutta-Nystrom integrator for special second-order
// systems y'' = f(t, y), using the 12(10) embedded pair of Dormand,
// El-Mikkawy and Prince. The 12th-order solution is propagated and the
// 10th-order one is used for the error estimate. Works for double and
// DoubleDouble scalars.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "wirebus/double_double.hpp"
#include "wirebus/errors.hpp"

namespace wirebus {

inline constexpr std::size_t kRknStages = 17;

template <class Real>
struct RknTableau {
    std::array<Real, kRknStages> c;
    std::array<std::array<Real, kRknStages>, kRknStages> a;
    std::array<Real, kRknStages> b_high;   // position weights, order 12
    std::array<Real, kRknStages> bp_high;  // velocity weights, order 12
    std::array<Real, kRknStages> b_low;    // position weights, order 10
    std::array<Real, kRknStages> bp_low;   // velocity weights, order 10
};

template <class Real>
const RknTableau<Real>& rkn1210_tableau();

template <class Real>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr double epsilon = std::numeric_limits<double>::epsilon();
    static constexpr const char* name = "double";
};

template <>
struct ScalarTraits<DoubleDouble> {
    static constexpr double epsilon = 4.93038065763132e-32;  // 2^-104
    static constexpr const char* name = "double-double";
};

struct RknOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 0.0;  // 0 selects automatically
    std::size_t max_steps = 4'000'000'000ULL;
};

struct RknStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

template <class Real, std::size_t N>
class Rkn1210 {
  public:
    using Vec = std::array<Real, N>;

    explicit Rkn1210(RknOptions options) : options_(options), tab_(rkn1210_tableau<Real>()) {
        for (std::size_t i = 0; i < kRknStages; ++i) {
            db_[i] = tab_.b_high[i] - tab_.b_low[i];
            dbp_[i] = tab_.bp_high[i] - tab_.bp_low[i];
        }
    }

    [[nodiscard]] const RknStats& stats() const { return stats_; }
    [[nodiscard]] double proposed_step() const { return h_; }

    /// Advances (t, y, v) to exactly t_end, in either time direction.
    /// The step-size proposal carries over between calls, so repeated calls
    /// with nearby end points cost little more than one long call.
    template <class Accel>
    void advance(Accel&& accel, Real& t, Vec& y, Vec& v, const Real& t_end) {
        const double span = to_double(t_end - t);
        if (span == 0.0) {
            return;
        }
        const double direction = span > 0.0 ? 1.0 : -1.0;
        if (h_ == 0.0 || h_ * direction < 0.0) {
            h_ = direction * (options_.initial_step > 0.0 ? options_.initial_step
                                                          : initial_step(accel, t, y, v, std::abs(span)));
        }
        Vec g0;
        accel(t, y, g0);
        ++stats_.evaluations;
        bool rejected_last = false;
        std::size_t steps = 0;
        while (true) {
            const Real remaining = t_end - t;
            const double remaining_d = to_double(remaining);
            if (remaining_d * direction <= 0.0) {
                break;
            }
            bool last = false;
            Real h = Real(h_);
            if (std::abs(h_) >= std::abs(remaining_d)) {
                h = remaining;
                last = true;
            }
            const double h_d = to_double(h);
            const double t_scale = std::max(std::abs(to_double(t)), std::abs(to_double(t_end)));
            if (std::abs(h_d) < 8.0 * ScalarTraits<Real>::epsilon * t_scale || !std::isfinite(h_d)) {
                std::ostringstream msg;
                msg << "RKN12(10): step size underflow (h=" << h_d << ") at t=" << to_double(t);
                throw NumericalError(msg.str());
            }
            if (++steps > options_.max_steps) {
                throw NumericalError("RKN12(10): maximum number of steps exceeded");
            }

            Vec y_new;
            Vec v_new;
            const double err = attempt(accel, t, y, v, g0, h, y_new, v_new);
            if (!(err <= 1.0)) {
                ++stats_.rejected;
                const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -1.0 / 11.0)) : 0.2;
                h_ = h_d * std::min(fac, 0.9);
                rejected_last = true;
                continue;
            }
            ++stats_.accepted;
            t = last ? t_end : t + h;
            y = y_new;
            v = v_new;
            accel(t, y, g0);
            ++stats_.evaluations;
            double fac = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 11.0) : 5.0;
            fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 5.0);
            rejected_last = false;
            // A step clipped to hit t_end says nothing about the preferred size.
            const double next = h_d * fac;
            if (!last || std::abs(next) > std::abs(h_)) {
                h_ = next;
            }
        }
    }

  private:
    template <class Accel>
    double attempt(Accel& accel, const Real& t, const Vec& y, const Vec& v, const Vec& g0, const Real& h,
                   Vec& y_new, Vec& v_new) {
        std::array<Vec, kRknStages> g;
        g[0] = g0;
        const Real h2 = h * h;
        for (std::size_t i = 1; i < kRknStages; ++i) {
            Vec stage_y;
            for (std::size_t n = 0; n < N; ++n) {
                Real s = Real(0.0);
                for (std::size_t j = 0; j < i; ++j) {
                    if (is_nonzero(tab_.a[i][j])) {
                        s += tab_.a[i][j] * g[j][n];
                    }
                }
                stage_y[n] = y[n] + tab_.c[i] * h * v[n] + h2 * s;
            }
            accel(t + tab_.c[i] * h, stage_y, g[i]);
        }
        stats_.evaluations += kRknStages - 1;

        double sum_sq = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            Real sy = Real(0.0);
            Real sv = Real(0.0);
            Real ey = Real(0.0);
            Real ev = Real(0.0);
            for (std::size_t i = 0; i < kRknStages; ++i) {
                if (is_nonzero(tab_.b_high[i])) {
                    sy += tab_.b_high[i] * g[i][n];
                }
                if (is_nonzero(tab_.bp_high[i])) {
                    sv += tab_.bp_high[i] * g[i][n];
                }
                if (is_nonzero(db_[i])) {
                    ey += db_[i] * g[i][n];
                }
                if (is_nonzero(dbp_[i])) {
                    ev += dbp_[i] * g[i][n];
                }
            }
            y_new[n] = y[n] + h * v[n] + h2 * sy;
            v_new[n] = v[n] + h * sv;
            const double err_y = to_double(h2 * ey);
            const double err_v = to_double(h * ev);
            const double scale_y = options_.abs_tol +
                                   options_.rel_tol * std::max(std::abs(to_double(y[n])), std::abs(to_double(y_new[n])));
            const double scale_v = options_.abs_tol +
                                   options_.rel_tol * std::max(std::abs(to_double(v[n])), std::abs(to_double(v_new[n])));
            sum_sq += (err_y / scale_y) * (err_y / scale_y) + (err_v / scale_v) * (err_v / scale_v);
        }
        return std::sqrt(sum_sq / static_cast<double>(2 * N));
    }

    template <class Accel>
    double initial_step(Accel& accel, const Real& t, const Vec& y, const Vec& v, double span) {
        Vec a;
        accel(t, y, a);
        ++stats_.evaluations;
        double d0 = 0.0;
        double d1 = 0.0;
        double d2 = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double yd = to_double(y[n]);
            const double vd = to_double(v[n]);
            const double ad = to_double(a[n]);
            const double sy = options_.abs_tol + options_.rel_tol * std::abs(yd);
            const double sv = options_.abs_tol + options_.rel_tol * std::abs(vd);
            d0 += (yd / sy) * (yd / sy) + (vd / sv) * (vd / sv);
            d1 += (vd / sy) * (vd / sy) + (ad / sv) * (ad / sv);
            d2 += (ad / sy) * (ad / sy);
        }
        d0 = std::sqrt(d0);
        d1 = std::sqrt(d1);
        d2 = std::sqrt(d2);
        double h = 1e-6 * span;
        if (d0 > 1e-5 && d1 > 1e-5) {
            h = 0.01 * d0 / d1;
            if (d2 > 1e-5) {
                h = std::min(h, 0.01 * std::sqrt(d0 / d2));
            }
        }
        return std::min(h, span);
    }

    static bool is_nonzero(const double x) { return x != 0.0; }
    static bool is_nonzero(const DoubleDouble& x) { return x.hi() != 0.0; }

    RknOptions options_;
    const RknTableau<Real>& tab_;
    std::array<Real, kRknStages> db_{};
    std::array<Real, kRknStages> dbp_{};
    double h_ = 0.0;
    RknStats stats_;
};

}  // namespace wirebus
