// ============================================================================
//  theta.cpp -- theta series, eta products, class invariants (see theta.hpp)
//
//  Every series here is truncated against an explicit tail bound pushed below
//  ctx.noise_floor(), so the returned value is accurate to working precision
//  and the target-digit contract holds with the full guard margin.
// ============================================================================

#include "latticelab/theta.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace latticelab {

namespace {

// ---------------------------------------------------------------------------
// phi(q) = 1 + 2 sum_{n>=1} q^{n^2}
//
// Tail: for k > n,  k^2 >= (n+1)^2 + 2(k-n-1), so the remaining mass is at
// most |q|^{(n+1)^2} / (1 - |q|^2).
// ---------------------------------------------------------------------------
Cplx phi_series(const Cplx& q, const PrecisionContext& ctx) {
    Real aq = abs(q);
    Real floor_ = ctx.noise_floor();
    Cplx s(Real(1));
    Cplx qn2 = q;                 // q^{n^2}   at n = 1
    Cplx qodd = pow_int(q, 3);    // q^{2n+1}  at n = 1
    Cplx q2 = q * q;
    for (std::uint64_t n = 1;; ++n) {
        s += Real(2) * qn2;
        Real next = abs(qn2) * abs(qodd);          // |q|^{(n+1)^2}
        if (2 * next / (1 - aq * aq) < floor_) break;
        if (n >= ctx.max_terms)
            throw precision_error("theta phi: term budget exhausted (|q| too close to 1)");
        qn2 = qn2 * qodd;
        qodd = qodd * q2;
    }
    return s;
}

// ---------------------------------------------------------------------------
// psi(q) = sum_{n>=0} q^{n(n+1)/2};  triangular exponents step by n+1, so the
// tail after T_{n} is bounded by |q|^{T_{n+1}} / (1 - |q|).
// ---------------------------------------------------------------------------
Cplx psi_series(const Cplx& q, const PrecisionContext& ctx) {
    Real aq = abs(q);
    Real floor_ = ctx.noise_floor();
    Cplx s(Real(1));          // n = 0
    Cplx t = q;               // q^{T_n} at n = 1
    Cplx step = q * q;        // q^{n+1} at n = 1
    for (std::uint64_t n = 1;; ++n) {
        s += t;
        Real next = abs(t) * abs(step);            // |q|^{T_{n+1}}
        if (next / (1 - aq) < floor_) break;
        if (n >= ctx.max_terms)
            throw precision_error("theta psi: term budget exhausted (|q| too close to 1)");
        t = t * step;
        step = step * q;
    }
    return s;
}

// ---------------------------------------------------------------------------
// prod_{n>=1} (1 - q^n) summed as the pentagonal-number series
//   1 + sum_{k>=1} (-1)^k ( q^{k(3k-1)/2} + q^{k(3k+1)/2} ).
// Successive exponents increase by at least one, so the tail after the k-th
// pair is below 2 |q|^{g_{k+1}} / (1 - |q|) with g_{k+1} = g_k + 3k + 1.
// ---------------------------------------------------------------------------
Cplx f_pentagonal(const Cplx& q, const PrecisionContext& ctx) {
    Real aq = abs(q);
    Real floor_ = ctx.noise_floor();
    Cplx s(Real(1));
    Cplx p = q;                   // q^{g_k},  g_1 = 1
    Cplx qk = q;                  // q^k
    Cplx q3k1 = pow_int(q, 4);    // q^{3k+1} at k = 1
    Cplx q3 = pow_int(q, 3);
    for (std::uint64_t k = 1;; ++k) {
        Cplx pair = p * (Cplx(Real(1)) + qk);
        if (k & 1)
            s -= pair;
        else
            s += pair;
        Real next = abs(p) * abs(q3k1);            // |q|^{g_{k+1}}
        if (2 * next / (1 - aq) < floor_) break;
        if (k >= ctx.max_terms)
            throw precision_error("theta f: term budget exhausted (|q| too close to 1)");
        p = p * q3k1;
        qk = qk * q;
        q3k1 = q3k1 * q3;
    }
    return s;
}

// ---------------------------------------------------------------------------
// (x; q)_inf = prod_{n>=0} (1 - x q^n).  Once |x q^n| is tiny the log of the
// remaining product is bounded by 2 |x q^{n+1}| / (1 - |q|).
// ---------------------------------------------------------------------------
Cplx poch_product(const Cplx& x, const Cplx& q, const PrecisionContext& ctx) {
    Real aq = abs(q);
    Real floor_ = ctx.noise_floor();
    Cplx p(Real(1));
    Cplx xq = x;                  // x q^n
    for (std::uint64_t n = 0;; ++n) {
        p = p * (Cplx(Real(1)) - xq);
        xq = xq * q;
        if (2 * abs(xq) / (1 - aq) < floor_) break;
        if (n >= ctx.max_terms)
            throw precision_error("q_pochhammer: term budget exhausted (|q| too close to 1)");
    }
    return p;
}

// e_j(q) = q^{j/24} prod (1 - q^{jn}), principal fractional power.
Cplx eta_level_eval(long j, const Cplx& q, const PrecisionContext& ctx) {
    if (abs(q).is_zero()) return Cplx(Real(0));
    return pow(q, Real(j) / 24) * f_pentagonal(pow_int(q, j), ctx);
}

// ---------------------------------------------------------------------------
// Hexagonal double sums.  Q(m,n) = m^2 + mn + n^2 >= (m^2 + n^2)/2, so with
// r = |q| the mass outside the box [-M,M]^2 is at most 2TS + T^2 where
//   S = sum_{n in Z} r^{n^2/2},     T = sum_{|n|>M} r^{n^2/2}
//                                     <= 2 r^{(M+1)^2/2} / (1 - r^{M+1}).
// The shifted c sum uses exponents Q(m,n) + m + n = Q(m+1/3, n+1/3) - 1/3
// (nonnegative integers); widening the box by one row covers the shift.
// ---------------------------------------------------------------------------
Cplx sig3_sum(ThetaKind::Tag which, const Cplx& q, const PrecisionContext& ctx) {
    const bool is_c = which == ThetaKind::Tag::sig3_c;
    Real aq = abs(q);
    if (aq.is_zero()) return is_c ? Cplx(Real(0)) : Cplx(Real(1));

    Real lam = -log(aq);
    Real need = Real((long)ctx.working() + 3) * log(Real(10));
    long M = (long)std::ceil(std::sqrt((2 * need / lam).convert_to<double>())) + 2;

    Real S(1);
    for (long n = 1;; ++n) {
        Real t = pow(aq, Real(n) * n / 2);
        S += 2 * t;
        if (t < Real(1) / 1000000) break;
    }
    S += 1;  // slack for the truncated S itself
    auto tail_small = [&](long box) {
        Real T = 2 * pow(aq, Real(box + 1) * (box + 1) / 2) / (1 - pow(aq, Real(box + 1)));
        return 2 * T * S + T * T < ctx.noise_floor();
    };
    while (!tail_small(M)) ++M;

    long box = M + (is_c ? 1 : 0);
    std::uint64_t cells = (std::uint64_t)(2 * box + 1) * (std::uint64_t)(2 * box + 1);
    if (cells > ctx.max_terms)
        throw precision_error("theta sig3: term budget exhausted (|q| too close to 1)");

    Cplx w1, w2;
    if (which == ThetaKind::Tag::sig3_b) {
        auto [c3, s3] = cos_sin_pi_rational(2, 3);  // e^{2 pi i/3}
        w1 = Cplx(c3, s3);
        w2 = conj(w1);
    }

    Cplx s(Real(0));
    for (long m = -box; m <= box; ++m) {
        for (long n = -box; n <= box; ++n) {
            long e = m * m + m * n + n * n;
            if (is_c) e += m + n;
            Cplx term = pow_int(q, e);
            if (which == ThetaKind::Tag::sig3_b) {
                long r = ((m - n) % 3 + 3) % 3;
                if (r == 1)
                    term = term * w1;
                else if (r == 2)
                    term = term * w2;
            }
            s += term;
        }
    }
    if (is_c) s = s * pow(q, Real(1) / 3);
    return s;
}

// ---------------------------------------------------------------------------
// Memo cache: exact serialized operands + working precision as the key.
// Computation happens outside the lock; double insertion is harmless.
// ---------------------------------------------------------------------------
std::mutex cache_mutex;
std::map<std::string, Cplx> cache;

std::string real_key(const Real& v) { return v.str(0, std::ios_base::scientific); }

std::string cache_key(const ThetaKind& k, const Cplx& q, unsigned working) {
    std::string s = std::to_string((int)k.tag);
    s += '|';
    s += std::to_string(k.level);
    if (k.tag == ThetaKind::Tag::q_pochhammer) {
        s += '|';
        s += real_key(k.x.re);
        s += ',';
        s += real_key(k.x.im);
    }
    s += '|';
    s += real_key(q.re);
    s += ',';
    s += real_key(q.im);
    s += '|';
    s += std::to_string(working);
    return s;
}

// eta(i x) = e^{-pi x/12} prod (1 - e^{-2 pi n x}); callers keep x >= 1, so
// the nome is at most e^{-2 pi} and the product converges immediately.
Real eta_axis(const Real& x, const PrecisionContext& ctx) {
    Real u = exp(-2 * const_pi() * x);
    return exp(-const_pi() * x / 12) * f_pentagonal(Cplx(u), ctx).re;
}

}  // namespace

Cplx theta_eval(const ThetaKind& kind, const Cplx& q_in, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    const Cplx q = at_working(q_in);
    if (!(abs(q) < 1)) throw domain_error("theta_eval: nome must satisfy |q| < 1");
    if (kind.tag == ThetaKind::Tag::eta_level && kind.level < 1)
        throw domain_error("theta_eval: eta level must be >= 1");

    const std::string key = cache_key(kind, q, ctx.working());
    {
        std::lock_guard<std::mutex> lk(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    Cplx v;
    switch (kind.tag) {
        case ThetaKind::Tag::phi:          v = phi_series(q, ctx); break;
        case ThetaKind::Tag::psi:          v = psi_series(q, ctx); break;
        case ThetaKind::Tag::f_minus:      v = f_pentagonal(q, ctx); break;
        case ThetaKind::Tag::q_pochhammer: v = poch_product(at_working(kind.x), q, ctx); break;
        case ThetaKind::Tag::eta_level:    v = eta_level_eval(kind.level, q, ctx); break;
        case ThetaKind::Tag::sig3_a:
        case ThetaKind::Tag::sig3_b:
        case ThetaKind::Tag::sig3_c:       v = sig3_sum(kind.tag, q, ctx); break;
    }

    {
        std::lock_guard<std::mutex> lk(cache_mutex);
        cache.emplace(key, v);
    }
    return v;
}

Real eta_inverted(const Real& j, const Real& t, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    if (!(j > 0) || !(t > 0))
        throw domain_error("eta_inverted: level and argument must be positive");
    Real x = at_working(j) * at_working(t);
    if (x >= 1) return eta_axis(x, ctx);
    // eta(i x) = x^{-1/2} eta(i / x)
    return eta_axis(1 / x, ctx) / sqrt(x);
}

ClassInvariantPair class_invariants(const Rat& m, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    if (!(m > 0)) throw domain_error("class_invariants: m must be positive");
    Real pi_sqrt_m = const_pi() * sqrt(to_real(m));
    Real q = exp(-pi_sqrt_m);
    Real prefactor = exp(pi_sqrt_m / 24) / pow(Real(2), Real(1) / 4);
    Cplx q2(q * q);
    Real g = prefactor * poch_product(Cplx(q), q2, ctx).re;
    Real G = prefactor * poch_product(Cplx(-q), q2, ctx).re;
    return ClassInvariantPair{m, g, G};
}

void theta_cache_clear() {
    std::lock_guard<std::mutex> lk(cache_mutex);
    cache.clear();
}

}  // namespace latticelab
