// Generalized hypergeometric series, Gauss 2F1 with real-axis continuation,
// complex Gamma, and the named constants built from it.
//
// Domain policy: pfq evaluates the defining series only where it converges
// absolutely with a geometric tail bound (p <= q: everywhere; p = q+1:
// |z| < 1, or terminating). The boundary point z = -1 of a (q+1)Fq with
// positive parameters is served by pfq_alternating_unit, which accelerates
// the alternating series; no analytic continuation of pFq beyond |z| < 1 is
// offered. 2F1 is the exception: hyp2f1 covers the cut plane C \ [1, inf)
// by connection formulas, and hyp2f1_on_cut adds directed limits onto the
// branch cut.
#pragma once

#include "latticelab/precision.hpp"

#include <vector>

namespace latticelab {

// sum_n prod_i (upper_i)_n / prod_j (lower_j)_n * z^n / n!  with a geometric
// tail bound certified against ctx.target_digits.
Real pfq(const std::vector<Real>& upper, const std::vector<Real>& lower,
         const Real& z, const PrecisionContext& ctx);
Cplx pfq(const std::vector<Real>& upper, const std::vector<Real>& lower,
         const Cplx& z, const PrecisionContext& ctx);

// The same series at exactly z = -1 (p = q+1), accelerated by the
// Cohen–Rodriguez Villegas–Zagier alternating-series scheme. Requires all
// parameters positive: the coefficients are then a totally monotone moment
// sequence and the scheme's (3+sqrt 8)^{-n} error bound is rigorous.
Real pfq_alternating_unit(const std::vector<Real>& upper, const std::vector<Real>& lower,
                          const PrecisionContext& ctx);

enum class CutSide { above, below, principal };

// Principal-branch 2F1 on C \ [1, inf).
Cplx hyp2f1(const Rat& a, const Rat& b, const Rat& c, const Cplx& z,
            const PrecisionContext& ctx);

// Real-axis evaluation; for x >= 1 the limit from the requested half-plane.
Cplx hyp2f1_on_cut(const Rat& a, const Rat& b, const Rat& c, const Real& x,
                   CutSide side, const PrecisionContext& ctx);

// 2F1(a, b; a+b; 1-u) computed from u = 1-z directly (the logarithmic
// connection at unit argument), for callers that know the distance to z = 1
// without cancellation: endpoint-stable quadrature integrands and kernels
// evaluated arbitrarily close to the cut start. Requires 0 < |u| < 1 and u
// off (-inf, 0].
Cplx hyp2f1_near_unit(const Rat& a, const Rat& b, const Cplx& u,
                      const PrecisionContext& ctx);

// Test oracle for 2F1(1/2,1/2;1;z) = 1/AGM(1, sqrt(1-z)), z real < 1.
Real agm_2f1_half(const Real& z, const PrecisionContext& ctx);

// Gamma on the complex plane (Spouge's approximation + reflection).
Cplx gamma_fn(const Cplx& z, const PrecisionContext& ctx);

// A = 2^{1/3} G(1/6) G(1/3) G(1/2) / (8 sqrt(3) pi^2),  B = G^3(2/3)/(16 pi^2).
Real constant_A(const PrecisionContext& ctx);
Real constant_B(const PrecisionContext& ctx);

// The weight attached to the sign of k in the 3F2 rewrite of the
// signature-three Mahler measure family: +1 for k > 0, -2 for k < 0
// (numerically pinned against the continued 4F3 form; see the .cpp note).
Rat sgn_weight_s(const Real& k);

} // namespace latticelab
