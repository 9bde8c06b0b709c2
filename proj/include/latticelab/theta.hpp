#pragma once
// ============================================================================
//  theta.hpp -- classical theta functions, eta products, and class invariants
//
//  Everything here is a function of a nome q inside the unit disc:
//
//    phi(q)  = sum_{n in Z} q^{n^2}
//    psi(q)  = sum_{n >= 0} q^{n(n+1)/2}
//    f(q)    = prod_{n >= 1} (1 - q^n)          (call with q to get "f(-q)"
//                                                 in the classical notation)
//    (x;q)   = prod_{n >= 0} (1 - x q^n)
//    e_j(q)  = q^{j/24} prod_{n >= 1} (1 - q^{jn})   (principal q^{j/24})
//
//  plus the hexagonal-lattice ("signature three") theta functions
//
//    a(q) = sum_{m,n in Z} q^{m^2+mn+n^2}
//    b(q) = sum_{m,n in Z} w^{m-n} q^{m^2+mn+n^2},        w = e^{2 pi i/3}
//    c(q) = sum_{m,n in Z} q^{(m+1/3)^2+(m+1/3)(n+1/3)+(n+1/3)^2}
//
//  which satisfy a^3 = b^3 + c^3.  The c sum collapses to
//  q^{1/3} sum q^{m^2+mn+n^2+m+n} with integer exponents (principal q^{1/3}).
//
//  eta_inverted evaluates e_j at q = e^{-2 pi t} for real positive (possibly
//  non-integer) level j, switching to the modular inversion
//  eta(i x) = x^{-1/2} eta(i/x) when j*t < 1 so that the product always
//  converges fast.  class_invariants returns the Weber-style pair
//
//    g_m = 2^{-1/4} q^{-1/24} (q; q^2),   G_m = 2^{-1/4} q^{-1/24} (-q; q^2)
//
//  at q = e^{-pi sqrt(m)}, which satisfies (g G)^8 (G^8 - g^8) = 1/4.
//
//  Repeated evaluations at identical (kind, q, precision) are memoized in a
//  process-wide cache guarded by a mutex; theta_cache_clear() empties it.
// ============================================================================

#include "latticelab/precision.hpp"

namespace latticelab {

// ---------------------------------------------------------------------------
// Which series/product to evaluate.  A small tagged value type: the factory
// functions below are the intended way to build one.
// ---------------------------------------------------------------------------
struct ThetaKind {
    enum class Tag {
        phi,
        psi,
        f_minus,
        q_pochhammer,   // carries x
        eta_level,      // carries level >= 1
        sig3_a,
        sig3_b,
        sig3_c,
    };

    Tag tag = Tag::phi;
    Cplx x;            // q_pochhammer only
    long level = 1;    // eta_level only

    static ThetaKind phi()     { return ThetaKind{Tag::phi, Cplx(), 1}; }
    static ThetaKind psi()     { return ThetaKind{Tag::psi, Cplx(), 1}; }
    static ThetaKind f_minus() { return ThetaKind{Tag::f_minus, Cplx(), 1}; }
    static ThetaKind q_pochhammer(const Cplx& x) {
        return ThetaKind{Tag::q_pochhammer, x, 1};
    }
    static ThetaKind eta_level(long j) {
        return ThetaKind{Tag::eta_level, Cplx(), j};
    }
    static ThetaKind sig3_a()  { return ThetaKind{Tag::sig3_a, Cplx(), 1}; }
    static ThetaKind sig3_b()  { return ThetaKind{Tag::sig3_b, Cplx(), 1}; }
    static ThetaKind sig3_c()  { return ThetaKind{Tag::sig3_c, Cplx(), 1}; }
};

// Evaluate the requested series/product at nome q, |q| < 1 (domain_error
// otherwise; precision_error if |q| is so close to 1 that the term budget in
// ctx cannot resolve the value).  Result carries ctx.working() precision and
// is accurate to ctx.target_digits.
Cplx theta_eval(const ThetaKind& kind, const Cplx& q, const PrecisionContext& ctx);

// e_j at q = e^{-2 pi t} for real j > 0, t > 0 -- i.e. eta(i j t) on the
// imaginary axis.  Uses the inversion eta(i x) = x^{-1/2} eta(i/x) when
// j t < 1, so the defining product is only ever summed for argument >= 1.
Real eta_inverted(const Real& j, const Real& t, const PrecisionContext& ctx);

// Class invariant pair at q = e^{-pi sqrt(m)} for rational m > 0.
struct ClassInvariantPair {
    Rat  m;
    Real g_m;
    Real G_m;
};
ClassInvariantPair class_invariants(const Rat& m, const PrecisionContext& ctx);

// Empty the (kind, q, precision) memo cache.
void theta_cache_clear();

}  // namespace latticelab
