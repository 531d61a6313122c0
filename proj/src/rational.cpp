#include "pabisim/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace pabisim {

Rational::Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("rational division by zero");
    v_ /= o.v_;
    return *this;
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::string s(text);
    bool neg = false;
    std::size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        pos = 1;
    }
    if (pos >= s.size()) return std::nullopt;

    auto all_digits = [](std::string_view t) {
        if (t.empty()) return false;
        for (char c : t)
            if (c < '0' || c > '9') return false;
        return true;
    };

    std::string body = s.substr(pos);
    mpq_class value;
    if (auto slash = body.find('/'); slash != std::string::npos) {
        std::string num = body.substr(0, slash);
        std::string den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        mpz_class d(den);
        if (d == 0) return std::nullopt;
        value = mpq_class(mpz_class(num), d);
    } else if (auto dot = body.find('.'); dot != std::string::npos) {
        std::string whole = body.substr(0, dot);
        std::string frac = body.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
        mpz_class scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        value = mpq_class(mpz_class(whole) * scale + mpz_class(frac.empty() ? "0" : frac), scale);
    } else {
        if (!all_digits(body)) return std::nullopt;
        value = mpq_class(mpz_class(body));
    }
    value.canonicalize();
    if (neg) value = -value;
    return Rational(value);
}

Rational Rational::from_double_exact(double x) {
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), x);
    return Rational(q);
}

std::string Rational::str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.is_negative() ? -r : r; }

}  // namespace pabisim
