#include "wirebus/double_double.hpp"

#include <array>
#include <cctype>
#include <ostream>
#include <stdexcept>

namespace wirebus {

namespace {

constexpr int kTaylorTerms = 30;

// inv_factorial[n] = 1/n!
const std::array<DoubleDouble, kTaylorTerms + 1>& inverse_factorials() {
    static const auto table = [] {
        std::array<DoubleDouble, kTaylorTerms + 1> t{};
        t[0] = DoubleDouble(1.0);
        for (int n = 1; n <= kTaylorTerms; ++n) {
            t[n] = t[n - 1] / DoubleDouble(static_cast<double>(n));
        }
        return t;
    }();
    return table;
}

// Taylor series on |x| <= pi/4; terms below 1e-33 relative are dropped.
DoubleDouble sin_taylor(const DoubleDouble& x) {
    const auto& inv = inverse_factorials();
    const DoubleDouble x2 = x * x;
    DoubleDouble term = x;
    DoubleDouble sum = x;
    for (int n = 3; n <= kTaylorTerms; n += 2) {
        term = term * x2;
        const DoubleDouble t = term * inv[n];
        if (std::abs(t.hi()) < 1e-33 * std::abs(sum.hi())) {
            break;
        }
        sum = ((n / 2) % 2 == 1) ? sum - t : sum + t;
    }
    return sum;
}

DoubleDouble cos_taylor(const DoubleDouble& x) {
    const auto& inv = inverse_factorials();
    const DoubleDouble x2 = x * x;
    DoubleDouble term(1.0);
    DoubleDouble sum(1.0);
    for (int n = 2; n <= kTaylorTerms; n += 2) {
        term = term * x2;
        const DoubleDouble t = term * inv[n];
        if (std::abs(t.hi()) < 1e-33) {
            break;
        }
        sum = ((n / 2) % 2 == 1) ? sum - t : sum + t;
    }
    return sum;
}

// Reduces a to r in [-pi/4, pi/4] with a = r + quadrant * pi/2 (mod 2pi).
DoubleDouble reduce_quarter(const DoubleDouble& a, int& quadrant) {
    const DoubleDouble turns = nint(a / dd_constants::two_pi);
    const DoubleDouble r = a - dd_constants::two_pi * turns;
    const DoubleDouble q = nint(r / dd_constants::half_pi);
    quadrant = static_cast<int>(q.hi());
    return r - dd_constants::half_pi * q;
}

}  // namespace

DoubleDouble nint(const DoubleDouble& a) {
    const double hi = std::round(a.hi());
    if (hi == a.hi()) {
        // hi already integral; round the low word and renormalise
        const double lo = std::round(a.lo());
        return dd_detail::quick_two_sum(hi, lo);
    }
    if (std::abs(hi - a.hi()) == 0.5 && a.lo() != 0.0) {
        // exact half in hi, lo decides the direction
        if (a.lo() < 0.0 && hi > a.hi()) {
            return DoubleDouble(hi - 1.0);
        }
        if (a.lo() > 0.0 && hi < a.hi()) {
            return DoubleDouble(hi + 1.0);
        }
    }
    return DoubleDouble(hi);
}

void sincos(const DoubleDouble& a, DoubleDouble& s, DoubleDouble& c) {
    int quadrant = 0;
    const DoubleDouble r = reduce_quarter(a, quadrant);
    const DoubleDouble sr = sin_taylor(r);
    const DoubleDouble cr = cos_taylor(r);
    switch (((quadrant % 4) + 4) % 4) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
}

DoubleDouble sin(const DoubleDouble& a) {
    int quadrant = 0;
    const DoubleDouble r = reduce_quarter(a, quadrant);
    switch (((quadrant % 4) + 4) % 4) {
        case 0: return sin_taylor(r);
        case 1: return cos_taylor(r);
        case 2: return -sin_taylor(r);
        default: return -cos_taylor(r);
    }
}

DoubleDouble cos(const DoubleDouble& a) {
    int quadrant = 0;
    const DoubleDouble r = reduce_quarter(a, quadrant);
    switch (((quadrant % 4) + 4) % 4) {
        case 0: return cos_taylor(r);
        case 1: return -sin_taylor(r);
        case 2: return -cos_taylor(r);
        default: return sin_taylor(r);
    }
}

DoubleDouble DoubleDouble::parse(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    DoubleDouble mantissa(0.0);
    int exponent = 0;
    bool seen_digit = false;
    bool after_point = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            mantissa = mantissa * 10.0 + static_cast<double>(ch - '0');
            if (after_point) {
                --exponent;
            }
            seen_digit = true;
        } else if (ch == '.' && !after_point) {
            after_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) {
        throw std::invalid_argument("DoubleDouble::parse: no digits in '" + std::string(text) + "'");
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        std::size_t used = 0;
        exponent += std::stoi(std::string(text.substr(i)), &used);
        i += used;
    }
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    if (i != text.size()) {
        throw std::invalid_argument("DoubleDouble::parse: trailing characters in '" + std::string(text) + "'");
    }
    DoubleDouble scale(1.0);
    for (int e = 0; e < std::abs(exponent); ++e) {
        scale = scale * 10.0;
    }
    DoubleDouble value = exponent < 0 ? mantissa / scale : mantissa * scale;
    return negative ? -value : value;
}

std::string DoubleDouble::to_string(int digits) const {
    if (std::isnan(hi_)) {
        return "nan";
    }
    if (hi_ == 0.0) {
        return "0";
    }
    DoubleDouble x = abs(*this);
    int exponent = static_cast<int>(std::floor(std::log10(x.hi())));
    DoubleDouble scale(1.0);
    for (int e = 0; e < std::abs(exponent); ++e) {
        scale = scale * 10.0;
    }
    x = exponent < 0 ? x * scale : x / scale;
    if (x.hi() >= 10.0) {
        x = x / 10.0;
        ++exponent;
    } else if (x.hi() < 1.0) {
        x = x * 10.0;
        --exponent;
    }
    std::string out = hi_ < 0.0 ? "-" : "";
    for (int d = 0; d < digits; ++d) {
        int digit = static_cast<int>(std::floor(x.hi()));
        if (digit > 9) {
            digit = 9;
        }
        if (digit < 0) {
            digit = 0;
        }
        out.push_back(static_cast<char>('0' + digit));
        if (d == 0) {
            out.push_back('.');
        }
        x = (x - static_cast<double>(digit)) * 10.0;
    }
    out += "e" + std::to_string(exponent);
    return out;
}

std::ostream& operator<<(std::ostream& os, const DoubleDouble& a) { return os << a.to_string(); }

}  // namespace wirebus
