#pragma once

// Double-double arithmetic: a value is the unevaluated sum hi + lo of two
// doubles with |lo| <= ulp(hi)/2, giving a 106-bit significand.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace wirebus {

class DoubleDouble {
  public:
    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double x) : hi_(x) {}  // NOLINT(google-explicit-constructor)
    constexpr DoubleDouble(int x) : hi_(static_cast<double>(x)) {}  // NOLINT

    static constexpr DoubleDouble from_parts(double hi, double lo) {
        DoubleDouble r;
        r.hi_ = hi;
        r.lo_ = lo;
        return r;
    }

    /// Parses a decimal literal such as "-1.97418679932682303358307954886e-1".
    static DoubleDouble parse(std::string_view text);

    [[nodiscard]] constexpr double hi() const { return hi_; }
    [[nodiscard]] constexpr double lo() const { return lo_; }
    explicit constexpr operator double() const { return hi_ + lo_; }

    DoubleDouble& operator+=(const DoubleDouble& b);
    DoubleDouble& operator-=(const DoubleDouble& b);
    DoubleDouble& operator*=(const DoubleDouble& b);
    DoubleDouble& operator/=(const DoubleDouble& b);

    [[nodiscard]] std::string to_string(int digits = 32) const;

  private:
    double hi_ = 0.0;
    double lo_ = 0.0;
};

namespace dd_detail {

inline DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return DoubleDouble::from_parts(s, b - (s - a));
}

inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return DoubleDouble::from_parts(s, (a - (s - bb)) + (b - bb));
}

inline DoubleDouble two_prod(double a, double b) {
    const double p = a * b;
    return DoubleDouble::from_parts(p, std::fma(a, b, -p));
}

}  // namespace dd_detail

inline DoubleDouble operator-(const DoubleDouble& a) {
    return DoubleDouble::from_parts(-a.hi(), -a.lo());
}

inline DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) {
    using namespace dd_detail;
    DoubleDouble s = two_sum(a.hi(), b.hi());
    const DoubleDouble t = two_sum(a.lo(), b.lo());
    double s2 = s.lo() + t.hi();
    s = quick_two_sum(s.hi(), s2);
    s2 = s.lo() + t.lo();
    return quick_two_sum(s.hi(), s2);
}

inline DoubleDouble operator+(const DoubleDouble& a, double b) {
    using namespace dd_detail;
    const DoubleDouble s = two_sum(a.hi(), b);
    return quick_two_sum(s.hi(), s.lo() + a.lo());
}

inline DoubleDouble operator+(double a, const DoubleDouble& b) { return b + a; }

inline DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) { return a + (-b); }
inline DoubleDouble operator-(const DoubleDouble& a, double b) { return a + (-b); }
inline DoubleDouble operator-(double a, const DoubleDouble& b) { return (-b) + a; }

inline DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) {
    using namespace dd_detail;
    const DoubleDouble p = two_prod(a.hi(), b.hi());
    const double lo = p.lo() + (a.hi() * b.lo() + a.lo() * b.hi());
    return quick_two_sum(p.hi(), lo);
}

inline DoubleDouble operator*(const DoubleDouble& a, double b) {
    using namespace dd_detail;
    const DoubleDouble p = two_prod(a.hi(), b);
    return quick_two_sum(p.hi(), p.lo() + a.lo() * b);
}

inline DoubleDouble operator*(double a, const DoubleDouble& b) { return b * a; }

inline DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) {
    using namespace dd_detail;
    const double q1 = a.hi() / b.hi();
    DoubleDouble r = a - b * q1;
    const double q2 = r.hi() / b.hi();
    r = r - b * q2;
    const double q3 = r.hi() / b.hi();
    return quick_two_sum(q1, q2) + q3;
}

inline DoubleDouble operator/(const DoubleDouble& a, double b) { return a / DoubleDouble(b); }
inline DoubleDouble operator/(double a, const DoubleDouble& b) { return DoubleDouble(a) / b; }

inline DoubleDouble& DoubleDouble::operator+=(const DoubleDouble& b) { return *this = *this + b; }
inline DoubleDouble& DoubleDouble::operator-=(const DoubleDouble& b) { return *this = *this - b; }
inline DoubleDouble& DoubleDouble::operator*=(const DoubleDouble& b) { return *this = *this * b; }
inline DoubleDouble& DoubleDouble::operator/=(const DoubleDouble& b) { return *this = *this / b; }

inline bool operator==(const DoubleDouble& a, const DoubleDouble& b) {
    return a.hi() == b.hi() && a.lo() == b.lo();
}
inline bool operator!=(const DoubleDouble& a, const DoubleDouble& b) { return !(a == b); }
inline bool operator<(const DoubleDouble& a, const DoubleDouble& b) {
    return a.hi() < b.hi() || (a.hi() == b.hi() && a.lo() < b.lo());
}
inline bool operator>(const DoubleDouble& a, const DoubleDouble& b) { return b < a; }
inline bool operator<=(const DoubleDouble& a, const DoubleDouble& b) { return !(b < a); }
inline bool operator>=(const DoubleDouble& a, const DoubleDouble& b) { return !(a < b); }

inline DoubleDouble abs(const DoubleDouble& a) { return a.hi() < 0.0 ? -a : a; }

inline DoubleDouble sqrt(const DoubleDouble& a) {
    if (a.hi() <= 0.0) {
        return DoubleDouble(a.hi() == 0.0 ? 0.0 : std::nan(""));
    }
    const double x = 1.0 / std::sqrt(a.hi());
    const double ax = a.hi() * x;
    const DoubleDouble residual = a - dd_detail::two_prod(ax, ax);
    return dd_detail::two_sum(ax, residual.hi() * (x * 0.5));
}

/// Nearest integer (ties away from zero), exact in double-double.
DoubleDouble nint(const DoubleDouble& a);

DoubleDouble sin(const DoubleDouble& a);
DoubleDouble cos(const DoubleDouble& a);
void sincos(const DoubleDouble& a, DoubleDouble& s, DoubleDouble& c);

std::ostream& operator<<(std::ostream& os, const DoubleDouble& a);

namespace dd_constants {
inline constexpr DoubleDouble pi = DoubleDouble::from_parts(3.141592653589793116e+00, 1.224646799147353207e-16);
inline constexpr DoubleDouble two_pi = DoubleDouble::from_parts(6.283185307179586232e+00, 2.449293598294706414e-16);
inline constexpr DoubleDouble half_pi = DoubleDouble::from_parts(1.570796326794896558e+00, 6.123233995736766036e-17);
}  // namespace dd_constants

inline double to_double(double x) { return x; }
inline double to_double(const DoubleDouble& x) { return static_cast<double>(x); }

}  // namespace wirebus
