#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cwave {

/// Exact rational arithmetic on 128-bit integers, used for the bit-exact
/// identity checks on the iteration sequences. Overflow throws instead of
/// wrapping; the ranges exercised (pq in {3/2, 2, 3, 4}, j <= 40) stay far
/// inside the 128-bit budget once fractions are kept reduced.
class Rational {
  public:
    using Int = __int128;

    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    static Rational from_parts(Int n, Int d) {
        Rational r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }

    Int num() const { return num_; }
    Int den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const Int g = gcd_int(a.den_, b.den_);
        const Int db = b.den_ / g;
        return from_parts(checked_add(checked_mul(a.num_, db),
                                      checked_mul(b.num_, a.den_ / g)),
                          checked_mul(a.den_, db));
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return a + Rational::from_parts(-b.num_, b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        const Int g1 = gcd_int(a.num_, b.den_);
        const Int g2 = gcd_int(b.num_, a.den_);
        return from_parts(checked_mul(a.num_ / g1, b.num_ / g2),
                          checked_mul(a.den_ / g2, b.den_ / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return a * Rational::from_parts(b.den_, b.num_);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    Rational pow(int e) const {
        if (e < 0) return Rational(1) / pow(-e);
        Rational out(1), base = *this;
        while (e > 0) {
            if (e & 1) out = out * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return out;
    }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string str() const {
        std::string s = int_to_string(num_);
        if (den_ != 1) s += "/" + int_to_string(den_);
        return s;
    }

  private:
    Int num_, den_;

    static Int gcd_int(Int a, Int b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const Int t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    static Int checked_mul(Int a, Int b) {
        Int out;
        if (__builtin_mul_overflow(a, b, &out))
            throw std::overflow_error("Rational: multiplication overflow");
        return out;
    }
    static Int checked_add(Int a, Int b) {
        Int out;
        if (__builtin_add_overflow(a, b, &out))
            throw std::overflow_error("Rational: addition overflow");
        return out;
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const Int g = gcd_int(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    static std::string int_to_string(Int v) {
        if (v == 0) return "0";
        const bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                                  : static_cast<unsigned __int128>(v);
        std::string digits;
        while (u > 0) {
            digits += static_cast<char>('0' + static_cast<int>(u % 10));
            u /= 10;
        }
        if (neg) digits += '-';
        return {digits.rbegin(), digits.rend()};
    }
};

/// Parse "a/b", an integer, or a terminating decimal ("1.5") exactly.
Rational parse_rational(const std::string& text);

/// True when the double is exactly a ratio of small integers (denominator
/// up to `max_den`), in which case `out` receives it.
bool rational_from_double(double x, Rational& out, long long max_den = 1048576);

}  // namespace cwave
