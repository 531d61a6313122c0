#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace pabisim {

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator. All arithmetic is exact; nothing in this class ever
/// rounds. Conversion to binary64 happens only at the metric layer.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long num, long den);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Accepts "n", "n/m" and terminating decimals such as "0.25" (converted
    /// exactly). Returns nullopt on malformed input.
    static std::optional<Rational> parse(std::string_view text);

    /// Exact conversion; every finite double is a dyadic rational.
    static Rational from_double_exact(double x);

    const mpq_class& raw() const { return v_; }
    std::string numerator_str() const { return v_.get_num().get_str(); }
    std::string denominator_str() const { return v_.get_den().get_str(); }
    bool is_integer() const { return v_.get_den() == 1; }

    double to_double() const { return v_.get_d(); }
    /// "n" when integral, otherwise "n/m".
    std::string str() const;

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_negative() const { return sgn(v_) < 0; }
    bool is_positive() const { return sgn(v_) > 0; }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    mpq_class v_;
};

Rational abs(const Rational& r);

}  // namespace pabisim
