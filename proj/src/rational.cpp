#include "cwave/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace cwave {

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const long long n = std::stoll(text.substr(0, slash));
        const long long d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
        const std::string head = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        if (frac.size() > 15)
            throw std::invalid_argument("parse_rational: too many decimal digits");
        for (char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw std::invalid_argument("parse_rational: bad decimal");
        long long den = 1;
        for (size_t i = 0; i < frac.size(); ++i) den *= 10;
        const long long whole = head.empty() || head == "-" || head == "+"
                                    ? 0
                                    : std::stoll(head);
        const bool neg = !head.empty() && head[0] == '-';
        const long long fpart = frac.empty() ? 0 : std::stoll(frac);
        const long long num = whole * den + (neg ? -fpart : fpart);
        return Rational(num, den);
    }
    return Rational(std::stoll(text));
}

bool rational_from_double(double x, Rational& out, long long max_den) {
    if (!std::isfinite(x)) return false;
    for (long long den = 1; den <= max_den; den *= 2) {
        const double scaled = x * static_cast<double>(den);
        if (std::abs(scaled) > 9.0e15) return false;
        const double rounded = std::nearbyint(scaled);
        if (scaled == rounded) {
            out = Rational(static_cast<long long>(rounded), den);
            return true;
        }
    }
    // Small non-dyadic denominators (3, 5, 6, ...) still show up from
    // fractions like 1/3 only approximately in binary; those are rejected.
    return false;
}

}  // namespace cwave
