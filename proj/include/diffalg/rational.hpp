#ifndef DIFFALG_RATIONAL_HPP
#define DIFFALG_RATIONAL_HPP

#include <gmpxx.h>

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace diffalg {

// Arbitrary-precision rational scalar over GMP.  Values are kept canonical at
// all times: lowest terms, positive denominator.  This is the exact ground
// field used everywhere unless a prime field is requested.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long num, long den) {
        if (den == 0)
            throw division_by_zero_error("rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }

    // Accepts "n" or "n/d" in base 10, optionally signed.  The result is
    // canonicalized, so "-2/4" parses to -1/2.
    static Rational from_string(std::string_view s) {
        std::string trimmed(s);
        // mpq_set_str tolerates no surrounding whitespace; strip it here.
        const char* ws = " \t\n\r";
        auto b = trimmed.find_first_not_of(ws);
        auto e = trimmed.find_last_not_of(ws);
        if (b == std::string::npos)
            throw invalid_input_error("empty rational literal");
        trimmed = trimmed.substr(b, e - b + 1);
        mpq_class v;
        if (mpq_set_str(v.get_mpq_t(), trimmed.c_str(), 10) != 0)
            throw invalid_input_error("bad rational literal: '" + trimmed + "'");
        if (v.get_den() == 0)
            throw division_by_zero_error("rational with zero denominator: '" + trimmed + "'");
        v.canonicalize();
        Rational r;
        r.v_ = std::move(v);
        return r;
    }

    std::string to_string() const {
        return v_.get_str();
    }

    bool is_zero() const { return mpq_sgn(v_.get_mpq_t()) == 0; }
    bool is_one() const { return mpq_cmp_si(v_.get_mpq_t(), 1, 1) == 0; }

    Rational operator-() const {
        Rational r;
        r.v_ = -v_;
        return r;
    }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero())
            throw division_by_zero_error("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.v_;
    }

    const mpq_class& raw() const { return v_; }

    // Wraps an mpq value that is already canonical (GMP's mpq arithmetic
    // preserves canonical form; only raw set_str / set_num paths do not).
    static Rational from_canonical(mpq_class v) {
        Rational r;
        r.v_ = std::move(v);
        return r;
    }

private:
    mpq_class v_;
};

// Rank-only row normalization used by the fraction-free elimination: divide a
// row through by its content (gcd of numerators over lcm of denominators) so
// entries stay coprime integers instead of accumulating as large minors.
// Scaling a row by a nonzero constant changes neither its zero pattern nor the
// rank, so pivot selection and the computed rank are unaffected.
inline void normalize_row_for_rank(std::span<Rational> row) {
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const Rational& x : row) {
        if (x.is_zero())
            continue;
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), x.raw().get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.raw().get_den().get_mpz_t());
    }
    if (num_gcd == 0)
        return; // zero row
    mpq_class scale(den_lcm, num_gcd); // multiply by lcm/gcd
    scale.canonicalize();
    if (scale == 1)
        return;
    for (Rational& x : row) {
        if (x.is_zero())
            continue;
        x = Rational::from_canonical(mpq_class(x.raw() * scale));
    }
}

} // namespace diffalg

#endif
