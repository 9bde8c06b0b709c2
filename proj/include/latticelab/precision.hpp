// Arbitrary-precision real/complex arithmetic core.
//
// Real is an MPFR-backed floating type with *variable* precision: every value
// carries its own precision, freshly constructed values pick up the
// thread-local default, and binary operations promote to the wider operand.
// All public entry points of this library bracket their work with a
// ScopedPrecision so the construction default is always target+guard digits.
#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace latticelab {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Rat  = mp::mpq_rational;
using Int  = mp::mpz_int;

// ---------------------------------------------------------------------------
// Precision management
// ---------------------------------------------------------------------------

// RAII guard: sets the thread-local default construction precision (decimal
// digits) and restores the previous default on scope exit.
struct ScopedPrecision {
    unsigned saved;
    explicit ScopedPrecision(unsigned digits10) : saved(Real::default_precision()) {
        Real::default_precision(digits10);
    }
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;
    ~ScopedPrecision() { Real::default_precision(saved); }
};

// Evaluation contract shared by every numeric operation: the caller asks for
// target_digits and the implementation works at target+guard, with series
// term budgets and quadrature policy bounded as below.
struct PrecisionContext {
    unsigned target_digits = 25;
    unsigned guard_digits  = 15;
    std::uint64_t max_terms = 4'000'000;   // series-term budget
    int quad_max_levels = 11;              // tanh-sinh halving levels
    int quad_max_subdivisions = 200;       // bisection fallback budget

    unsigned working() const { return target_digits + guard_digits; }

    PrecisionContext with_target(unsigned d) const {
        PrecisionContext c = *this;
        c.target_digits = d;
        return c;
    }

    // 10^-target_digits, built at current working precision.
    Real tol() const;
    // 10^-(working-3): quantities below this are treated as exact noise floor.
    Real noise_floor() const;
};

struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Real helpers (constants via MPFR, special real functions)
// ---------------------------------------------------------------------------

inline Real const_pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

inline Real const_catalan() {
    Real r;
    mpfr_const_catalan(r.backend().data(), MPFR_RNDN);
    return r;
}

inline Real gamma_real(const Real& x) {
    Real r;
    mpfr_gamma(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

inline Real digamma_real(const Real& x) {
    Real r;
    mpfr_digamma(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

inline Real zeta_real(const Real& s) {
    Real r;
    mpfr_zeta(r.backend().data(), s.backend().data(), MPFR_RNDN);
    return r;
}

inline Real to_real(const Rat& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
    return r;
}

inline Real to_real(const Int& z) {
    Real r;
    mpfr_set_z(r.backend().data(), z.backend().data(), MPFR_RNDN);
    return r;
}

// cos(pi*p/s), sin(pi*p/s) computed from the exact rational angle in one
// mpfr_sin_cos call — ray arguments never accumulate drift.
inline std::pair<Real, Real> cos_sin_pi_rational(long p, long s) {
    Real angle = const_pi() * Real(p) / Real(s);
    Real c, si;
    mpfr_sin_cos(si.backend().data(), c.backend().data(), angle.backend().data(), MPFR_RNDN);
    return {c, si};
}

// Copies of entry arguments extended (exact zero-padding) to the current
// default precision.  Variable-precision arithmetic propagates the precision
// of its operands, so a narrow caller-supplied value would otherwise cap
// every derived quantity below the working precision the evaluation needs.
// Values already at or above the default are returned unchanged.
inline Real at_working(const Real& x) {
    if (x.precision() >= Real::default_precision()) return x;
    Real r = x;
    r.precision(Real::default_precision());
    return r;
}

inline Real pow10(long e) {
    Real r;
    mpfr_ui_pow_ui(r.backend().data(), 10u, static_cast<unsigned long>(e >= 0 ? e : -e), MPFR_RNDN);
    if (e < 0) r = 1 / r;
    return r;
}

inline Real PrecisionContext::tol() const { return pow10(-(long)target_digits); }
inline Real PrecisionContext::noise_floor() const { return pow10(-(long)working() + 3); }

// ---------------------------------------------------------------------------
// Complex type (principal branches everywhere)
// ---------------------------------------------------------------------------

struct Cplx {
    Real re, im;

    Cplx() : re(0), im(0) {}
    Cplx(const Real& r) : re(r), im(0) {}
    Cplx(Real&& r) : re(std::move(r)), im(0) {}
    Cplx(const Real& r, const Real& i) : re(r), im(i) {}
    Cplx(int n) : re(n), im(0) {}
    Cplx(long n) : re(n), im(0) {}
    Cplx(double d) : re(d), im(0) {}

    bool is_real() const { return im.is_zero(); }

    Cplx operator-() const { return Cplx(-re, -im); }

    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o) {
        Real r = re * o.re - im * o.im;
        Real i = re * o.im + im * o.re;
        re = std::move(r); im = std::move(i);
        return *this;
    }
    Cplx& operator/=(const Cplx& o) {
        Real d = o.re * o.re + o.im * o.im;
        Real r = (re * o.re + im * o.im) / d;
        Real i = (im * o.re - re * o.im) / d;
        re = std::move(r); im = std::move(i);
        return *this;
    }
};

inline Cplx operator+(Cplx a, const Cplx& b) { a += b; return a; }
inline Cplx operator-(Cplx a, const Cplx& b) { a -= b; return a; }
inline Cplx operator*(Cplx a, const Cplx& b) { a *= b; return a; }
inline Cplx operator/(Cplx a, const Cplx& b) { a /= b; return a; }
inline Cplx operator+(const Real& a, const Cplx& b) { return Cplx(a) + b; }
inline Cplx operator-(const Real& a, const Cplx& b) { return Cplx(a) - b; }
inline Cplx operator*(const Real& a, const Cplx& b) { return Cplx(a) * b; }
inline Cplx operator/(const Real& a, const Cplx& b) { return Cplx(a) / b; }
inline bool operator==(const Cplx& a, const Cplx& b) { return a.re == b.re && a.im == b.im; }

inline Cplx at_working(const Cplx& z) { return Cplx(at_working(z.re), at_working(z.im)); }

inline Real abs(const Cplx& z) { return sqrt(z.re * z.re + z.im * z.im); }
inline Real norm_sq(const Cplx& z) { return z.re * z.re + z.im * z.im; }
inline Cplx conj(const Cplx& z) { return Cplx(z.re, -z.im); }
inline Real arg(const Cplx& z) { return atan2(z.im, z.re); }

inline Cplx log(const Cplx& z) { return Cplx(log(abs(z)), arg(z)); }
inline Cplx exp(const Cplx& z) {
    Real m = exp(z.re);
    Real c, s;
    mpfr_sin_cos(s.backend().data(), c.backend().data(), z.im.backend().data(), MPFR_RNDN);
    return Cplx(m * c, m * s);
}
inline Cplx sqrt(const Cplx& z) {
    if (z.im.is_zero() && z.re >= 0) return Cplx(sqrt(z.re));
    Real m = sqrt(abs(z));
    Real half_arg = arg(z) / 2;
    Real c, s;
    mpfr_sin_cos(s.backend().data(), c.backend().data(), half_arg.backend().data(), MPFR_RNDN);
    return Cplx(m * c, m * s);
}
inline Cplx pow(const Cplx& z, const Real& w) {
    if (z.im.is_zero() && z.re > 0) return Cplx(pow(z.re, w));
    return exp(Cplx(w) * log(z));
}
inline Cplx pow(const Cplx& z, const Cplx& w) { return exp(w * log(z)); }
inline Cplx pow_int(Cplx z, long n) {
    bool inv = n < 0;
    unsigned long k = inv ? -(unsigned long)n : (unsigned long)n;
    Cplx acc(1);
    while (k) {
        if (k & 1) acc *= z;
        z *= z;
        k >>= 1;
    }
    return inv ? Cplx(1) / acc : acc;
}

// r * exp(i*pi*p/s): exact-angle point on a ray (design rule: ray arguments
// are always constructed from rational multiples of pi).
inline Cplx ray_point(const Real& r, long p, long s) {
    auto [c, si] = cos_sin_pi_rational(p, s);
    return Cplx(r * c, r * si);
}

// ---------------------------------------------------------------------------
// Decimal-string emission & digit matching
// ---------------------------------------------------------------------------

inline std::string real_str(const Real& x, unsigned digits) {
    return x.str(digits, std::ios_base::scientific);
}

inline std::string cplx_str(const Cplx& z, unsigned digits) {
    if (z.im.is_zero()) return real_str(z.re, digits);
    return real_str(z.re, digits) + (z.im < 0 ? " - " : " + ") +
           real_str(abs(z.im), digits) + "*I";
}

// floor(-log10(abs_diff / max(1,|lhs|))); "exact to working precision" caps
// at the digits the comparison was carried out with.
inline long digits_matched(const Real& abs_diff, const Real& lhs_mag, unsigned working_digits) {
    if (abs_diff.is_zero()) return (long)working_digits;
    Real scale = lhs_mag > 1 ? lhs_mag : Real(1);
    Real d = -log10(abs_diff / scale);
    long n = (long)floor(d).convert_to<long>();
    if (n > (long)working_digits) n = (long)working_digits;
    return n;
}

} // namespace latticelab
