#ifndef DIFFALG_PRIME_FIELD_HPP
#define DIFFALG_PRIME_FIELD_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace diffalg {

// Residue scalar for GF(p), p a prime below 2^31 so products fit in 128-bit
// intermediates.  Each value carries its modulus, which lets mixed-field data
// be detected at the first arithmetic contact and reported as invalid input.
//
// A default-constructed value (and any value built from a bare integer
// literal) is "unbound": it remembers the integer and adopts the modulus of
// the first bound operand it meets.  Generic code can therefore use K(0) and
// K(1) without threading a field descriptor around.
class PrimeField {
public:
    PrimeField() : v_(0), p_(0) {}
    PrimeField(long long n) : v_(n), p_(0) {}

    static PrimeField residue(unsigned long long p, long long value) {
        check_modulus(p);
        PrimeField r;
        r.p_ = p;
        r.v_ = reduce(value, p);
        return r;
    }

    // Accepts "a" or "a/b"; the quotient is taken in GF(p).
    static PrimeField from_string(std::string_view s, unsigned long long p) {
        check_modulus(p);
        std::string trimmed(s);
        const char* ws = " \t\n\r";
        auto b = trimmed.find_first_not_of(ws);
        auto e = trimmed.find_last_not_of(ws);
        if (b == std::string::npos)
            throw invalid_input_error("empty scalar literal");
        trimmed = trimmed.substr(b, e - b + 1);
        auto slash = trimmed.find('/');
        if (slash == std::string::npos)
            return residue(p, parse_int(trimmed));
        PrimeField num = residue(p, parse_int(trimmed.substr(0, slash)));
        PrimeField den = residue(p, parse_int(trimmed.substr(slash + 1)));
        return num / den;
    }

    unsigned long long modulus() const { return p_; } // 0 while unbound

    // Attach an unbound literal to a concrete field; no-op when already there.
    void bind_to(unsigned long long p) {
        check_modulus(p);
        if (p_ == 0) {
            p_ = p;
            v_ = reduce(v_, p);
        } else if (p_ != p) {
            throw invalid_input_error("mixed prime fields: GF(" + std::to_string(p_) +
                                      ") vs GF(" + std::to_string(p) + ")");
        }
    }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const {
        if (p_ == 0)
            return v_ == 1;
        return static_cast<unsigned long long>(v_) == 1 % p_;
    }

    std::string to_string() const { return std::to_string(v_); }

    PrimeField operator-() const {
        PrimeField r = *this;
        if (r.p_ == 0)
            r.v_ = -r.v_;
        else if (r.v_ != 0)
            r.v_ = static_cast<long long>(r.p_) - r.v_;
        return r;
    }

    friend PrimeField operator+(PrimeField a, PrimeField b) {
        bind(a, b);
        if (a.p_ == 0)
            return PrimeField(checked(static_cast<__int128>(a.v_) + b.v_));
        return PrimeField::bound(a.p_, (static_cast<unsigned __int128>(a.v_) + b.v_) % a.p_);
    }
    friend PrimeField operator-(PrimeField a, PrimeField b) { return a + (-b); }
    friend PrimeField operator*(PrimeField a, PrimeField b) {
        bind(a, b);
        if (a.p_ == 0)
            return PrimeField(checked(static_cast<__int128>(a.v_) * b.v_));
        return PrimeField::bound(a.p_, (static_cast<unsigned __int128>(a.v_) * b.v_) % a.p_);
    }
    friend PrimeField operator/(PrimeField a, PrimeField b) {
        bind(a, b);
        if (b.is_zero())
            throw division_by_zero_error("prime-field division by zero");
        if (a.p_ == 0) {
            // Two unbound literals: allow only exact integer quotients; this
            // occurs for trivial cases like 0/x in generic code.
            if (a.v_ % b.v_ != 0)
                throw invalid_input_error("unbound prime-field literals with inexact quotient");
            return PrimeField(a.v_ / b.v_);
        }
        return a * b.inverse();
    }

    PrimeField& operator+=(const PrimeField& o) { *this = *this + o; return *this; }
    PrimeField& operator-=(const PrimeField& o) { *this = *this - o; return *this; }
    PrimeField& operator*=(const PrimeField& o) { *this = *this * o; return *this; }
    PrimeField& operator/=(const PrimeField& o) { *this = *this / o; return *this; }

    friend bool operator==(const PrimeField& a, const PrimeField& b) {
        if (a.p_ != 0 && b.p_ != 0 && a.p_ != b.p_)
            throw invalid_input_error("comparing residues from different prime fields");
        if (a.p_ == b.p_)
            return a.v_ == b.v_;
        const PrimeField& bnd = a.p_ != 0 ? a : b;
        const PrimeField& raw = a.p_ != 0 ? b : a;
        return reduce(raw.v_, bnd.p_) == bnd.v_;
    }
    friend bool operator!=(const PrimeField& a, const PrimeField& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const PrimeField& x) {
        return os << x.v_;
    }

private:
    static PrimeField bound(unsigned long long p, unsigned long long v) {
        PrimeField r;
        r.p_ = p;
        r.v_ = static_cast<long long>(v);
        return r;
    }

    static void check_modulus(unsigned long long p) {
        if (p < 2 || p >= (1ULL << 31))
            throw invalid_input_error("prime-field modulus out of range [2, 2^31)");
    }

    static long long reduce(long long v, unsigned long long p) {
        long long m = v % static_cast<long long>(p);
        if (m < 0)
            m += static_cast<long long>(p);
        return m;
    }

    static long long checked(__int128 v) {
        // Unbound literals only ever hold small constants; catch the
        // pathological case instead of silently wrapping.
        if (v > (static_cast<__int128>(1) << 62) || v < -(static_cast<__int128>(1) << 62))
            throw invalid_input_error("unbound prime-field literal overflow");
        return static_cast<long long>(v);
    }

    static long long parse_int(const std::string& s) {
        if (s.empty())
            throw invalid_input_error("empty integer literal");
        size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            throw invalid_input_error("bad integer literal: '" + s + "'");
        }
        if (pos != s.size())
            throw invalid_input_error("trailing characters in integer literal: '" + s + "'");
        return v;
    }

    // Mixed-field contact: unify moduli or fail.
    static void bind(PrimeField& a, PrimeField& b) {
        if (a.p_ == b.p_)
            return;
        if (a.p_ != 0 && b.p_ != 0)
            throw invalid_input_error("mixed prime fields: GF(" + std::to_string(a.p_) +
                                      ") vs GF(" + std::to_string(b.p_) + ")");
        if (a.p_ == 0) {
            a.p_ = b.p_;
            a.v_ = reduce(a.v_, a.p_);
        } else {
            b.p_ = a.p_;
            b.v_ = reduce(b.v_, b.p_);
        }
    }

    PrimeField inverse() const {
        // Extended Euclid on (v, p); p prime and v nonzero, so gcd is 1.
        long long t = 0, new_t = 1;
        long long r = static_cast<long long>(p_), new_r = v_;
        while (new_r != 0) {
            long long q = r / new_r;
            long long tmp = t - q * new_t;
            t = new_t;
            new_t = tmp;
            tmp = r - q * new_r;
            r = new_r;
            new_r = tmp;
        }
        if (r != 1)
            throw internal_error("prime-field inverse of non-unit");
        return bound(p_, static_cast<unsigned long long>(reduce(t, p_)));
    }

    long long v_;
    unsigned long long p_;
};

} // namespace diffalg

#endif
