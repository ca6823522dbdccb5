#pragma once

// Scalar layer: exact rationals (GMP) and precision-tagged binary floats (MPFR).
// Every PFloat operation rounds to nearest-even at the wider operand precision.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <compare>
#include <concepts>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "rayleigh_ritz/errors.hpp"

namespace rr {

using precision_bits = long;

inline constexpr precision_bits min_precision = 53;
inline constexpr precision_bits default_precision = 256;
/// Largest precision the stored pi literal can be rounded to.
inline constexpr precision_bits max_pi_precision = 640;

inline constexpr mpfr_rnd_t round_nearest = MPFR_RNDN;

class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I value) : q_(static_cast<long>(value)) {}

    Rational(long numerator, long denominator) {
        if (denominator == 0) throw std::domain_error("rational with zero denominator");
        q_ = mpq_class(numerator, denominator);
        q_.canonicalize();
    }

    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    /// Accepts "p", "p/q" and decimal notation ("-0.25", "1.5e-3"); decimals are exact.
    static Rational parse(std::string_view text) {
        auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
        if (text.empty()) throw fail();
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            mpz_class num, den;
            if (!parse_integer(text.substr(0, slash), num) || !parse_integer(text.substr(slash + 1), den))
                throw fail();
            if (den == 0) throw std::domain_error("rational with zero denominator");
            return Rational(mpq_class(num, den));
        }

        std::size_t pos = 0;
        bool negative = false;
        if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
        std::string digits;
        long scale = 0;
        bool seen_point = false;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits.push_back(c);
                if (seen_point) ++scale;
            } else if (c == '.' && !seen_point) {
                seen_point = true;
            } else {
                break;
            }
        }
        if (digits.empty()) throw fail();
        long exponent = 0;
        if (pos < text.size()) {
            if (text[pos] != 'e' && text[pos] != 'E') throw fail();
            mpz_class e;
            if (!parse_integer(text.substr(pos + 1), e) || !e.fits_slong_p()) throw fail();
            exponent = e.get_si();
            if (exponent > 4096 || exponent < -4096) throw fail();
        }
        mpz_class num(digits, 10);
        if (negative) num = -num;
        long shift = exponent - scale;
        mpz_class power;
        mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        return shift >= 0 ? Rational(mpq_class(num * power)) : Rational(mpq_class(num, power));
    }

    const mpz_class& numerator() const { return q_.get_num(); }
    const mpz_class& denominator() const { return q_.get_den(); }
    mpq_srcptr get() const { return q_.get_mpq_t(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sign() == 0; }

    /// Canonical "p/q", or "p" when the denominator is one.
    std::string to_string() const { return q_.get_str(); }

    Rational operator-() const { return Rational(mpq_class(-q_)); }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("rational division by zero");
        return Rational(mpq_class(a.q_ / b.q_));
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    static bool parse_integer(std::string_view s, mpz_class& out) {
        if (s.empty()) return false;
        std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
        if (start == s.size()) return false;
        for (std::size_t i = start; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        std::string body(s.substr(s[0] == '+' ? 1 : 0));
        return out.set_str(body, 10) == 0;
    }

    mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

class PFloat {
public:
    explicit PFloat(precision_bits bits = min_precision) {
        check(bits);
        mpfr_init2(v_, bits);
        mpfr_set_zero(v_, 1);
    }

    PFloat(double value, precision_bits bits) {
        check(bits);
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, value, round_nearest);
    }

    template <std::integral I>
    PFloat(I value, precision_bits bits) {
        check(bits);
        mpfr_init2(v_, bits);
        mpfr_set_si(v_, static_cast<long>(value), round_nearest);
    }

    static PFloat parse(const std::string& decimal, precision_bits bits) {
        PFloat r(bits);
        if (mpfr_set_str(r.v_, decimal.c_str(), 10, round_nearest) != 0)
            throw std::invalid_argument("not a decimal number: '" + decimal + "'");
        return r;
    }

    /// 2^exponent at the given precision (exact).
    static PFloat pow2(long exponent, precision_bits bits) {
        PFloat r(bits);
        mpfr_set_ui_2exp(r.v_, 1, exponent, round_nearest);
        return r;
    }

    PFloat(const PFloat& o) {
        mpfr_init2(v_, o.precision());
        mpfr_set(v_, o.v_, round_nearest);
    }
    PFloat(PFloat&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    PFloat& operator=(const PFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, o.precision());
            mpfr_set(v_, o.v_, round_nearest);
        }
        return *this;
    }
    PFloat& operator=(PFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~PFloat() { mpfr_clear(v_); }

    precision_bits precision() const { return mpfr_get_prec(v_); }
    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }

    double to_double() const { return mpfr_get_d(v_, round_nearest); }
    int sign() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    PFloat operator-() const {
        PFloat r(precision());
        mpfr_neg(r.v_, v_, round_nearest);
        return r;
    }

    friend PFloat operator+(const PFloat& a, const PFloat& b) { return apply(mpfr_add, a, b); }
    friend PFloat operator-(const PFloat& a, const PFloat& b) { return apply(mpfr_sub, a, b); }
    friend PFloat operator*(const PFloat& a, const PFloat& b) { return apply(mpfr_mul, a, b); }
    friend PFloat operator/(const PFloat& a, const PFloat& b) { return apply(mpfr_div, a, b); }

    friend PFloat operator*(const PFloat& a, long k) {
        PFloat r(a.precision());
        mpfr_mul_si(r.v_, a.v_, k, round_nearest);
        return r;
    }
    friend PFloat operator*(long k, const PFloat& a) { return a * k; }
    friend PFloat operator/(const PFloat& a, long k) {
        PFloat r(a.precision());
        mpfr_div_si(r.v_, a.v_, k, round_nearest);
        return r;
    }

    PFloat& operator+=(const PFloat& o) { return in_place(mpfr_add, o); }
    PFloat& operator-=(const PFloat& o) { return in_place(mpfr_sub, o); }
    PFloat& operator*=(const PFloat& o) { return in_place(mpfr_mul, o); }
    PFloat& operator/=(const PFloat& o) { return in_place(mpfr_div, o); }

    friend bool operator==(const PFloat& a, const PFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend std::partial_ordering operator<=>(const PFloat& a, const PFloat& b) {
        if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
        int c = mpfr_cmp(a.v_, b.v_);
        return c < 0 ? std::partial_ordering::less
               : c > 0 ? std::partial_ordering::greater
                       : std::partial_ordering::equivalent;
    }

    friend std::ostream& operator<<(std::ostream& os, const PFloat& x) {
        mpfr_exp_t exp = 0;
        std::unique_ptr<char, void (*)(char*)> s(mpfr_get_str(nullptr, &exp, 10, 0, x.v_, round_nearest),
                                                 mpfr_free_str);
        std::string digits(s.get());
        if (!mpfr_number_p(x.v_)) return os << digits;
        bool neg = !digits.empty() && digits[0] == '-';
        if (neg) digits.erase(0, 1);
        return os << (neg ? "-" : "") << "0." << digits << "e" << exp;
    }

private:
    static void check(precision_bits bits) {
        if (bits < min_precision || bits > MPFR_PREC_MAX) throw precision_unsupported(bits);
    }

    template <class Op>
    static PFloat apply(Op op, const PFloat& a, const PFloat& b) {
        PFloat r(std::max(a.precision(), b.precision()));
        op(r.v_, a.v_, b.v_, round_nearest);
        return r;
    }

    template <class Op>
    PFloat& in_place(Op op, const PFloat& o) {
        if (o.precision() > precision()) return *this = apply(op, *this, o);
        op(v_, v_, o.v_, round_nearest);
        return *this;
    }

    mpfr_t v_;
};

inline PFloat abs(const PFloat& x) {
    PFloat r(x.precision());
    mpfr_abs(r.get(), x.get(), round_nearest);
    return r;
}

/// Correctly rounded square root at the operand's precision.
inline PFloat sqrt_pf(const PFloat& x) {
    if (x.sign() < 0) throw negative_operand();
    PFloat r(x.precision());
    mpfr_sqrt(r.get(), x.get(), round_nearest);
    return r;
}

/// r correctly rounded to `bits` bits.
inline PFloat to_float(const Rational& r, precision_bits bits) {
    PFloat x(bits);
    mpfr_set_q(x.get(), r.get(), round_nearest);
    return x;
}

/// x re-rounded to `bits` bits.
inline PFloat to_float(const PFloat& x, precision_bits bits) {
    PFloat r(bits);
    mpfr_set(r.get(), x.get(), round_nearest);
    return r;
}

/// Pi rounded to `bits` from a stored 220-digit literal.
inline PFloat pi_const(precision_bits bits) {
    static constexpr const char* pi_digits =
        "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706"
        "79821480865132823066470938446095505822317253594081284811174502841027019385211055596446229489549303819"
        "644288109756659334461";
    if (bits < min_precision || bits > max_pi_precision) throw precision_unsupported(bits);
    return PFloat::parse(pi_digits, bits);
}

/// Default iteration tolerance 2^(-p/2).
inline PFloat default_tolerance(precision_bits bits) { return PFloat::pow2(-(bits / 2), bits); }

inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational one_like(const Rational&) { return Rational(1); }
inline PFloat zero_like(const PFloat& x) { return PFloat(x.precision()); }
inline PFloat one_like(const PFloat& x) { return PFloat(1, x.precision()); }

}  // namespace rr
