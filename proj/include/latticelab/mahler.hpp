// Logarithmic Mahler measures of two-variable Laurent polynomials.
//
// The measure of P(y, z) is the average of log|P| over the torus |y| = |z| = 1:
//
//   m(P) = int_0^1 int_0^1 log|P(e^{2 pi i s}, e^{2 pi i t})| ds dt.
//
// We never compute the double integral directly. Writing P as a polynomial in
// z whose coefficients are Laurent polynomials in y, Jensen's formula does the
// inner integral exactly for each fixed y on the circle:
//
//   int_0^1 log|P(y, e^{2 pi i t})| dt = log|c_d(y)| + sum_j log max(1, |z_j(y)|),
//
// where c_d is the leading z-coefficient and z_j are the fiber's roots. The
// outer integral over y is one-dimensional with integrable kinks at the
// finitely many points where a root crosses the unit circle; those crossings
// are located by a bracketing pre-scan and the pieces in between are handled
// by tanh-sinh quadrature (whose stall-bisection also catches anything the
// scan missed).
//
// Four one-parameter families recur throughout the lattice-sum identities:
//
//   mu_m(k) = m(k + y + 1/y + z + 1/z)
//   mu_n(k) = m(y^3 + z^3 + 1 - k y z)
//   mu_g(k) = m((1 + y)(1 + z)(y + z) - k y z)
//   mu_r(k) = m((1 + y)(1 + z)(1 + y + z) - k y z)
//
// The m, n, g families also have hypergeometric closed forms; r does not (it
// is evaluated only through the torus integral). The closed forms are built
// from the two primitives
//
//   Phi(w) = (w/8)  4F3(3/2,3/2,1,1; 2,2,2; w)      Phi'(w) = (2F1(1/2,1/2;1;w) - 1)/(2w)
//   Psi(w) = (2w/27) 4F3(4/3,5/3,1,1; 2,2,2; w)      Psi'(w) = (2F1(1/3,2/3;1;w) - 1)/(3w)
//
// via  mu_m(k) = Re(log k - Phi(16/k^2))  and  mu_n(k) = Re(log k - Psi(27/k^3))
// (the latter valid for |27/k^3| < 1; its right side defines the companion
// function "ntilde" for every k != 0), and
//
//   mu_g(k) = (1/3) Re[ log((4+k)(k-2)^4 / k^2)
//                       - Psi(27 k^2/(4+k)^3) - 4 Psi(27 k/(k-2)^3) ].
//
// Outside the unit disk of the 4F3 series the primitives are continued by
// integrating Phi' or Psi' from a point inside the disk along a path that
// detours below (or on the side of the target away from) the branch cut
// [1, inf); only the real part is wanted and the jump of 2F1 across the cut
// is purely imaginary, so the detour side does not matter.
//
// For real k the m and n closed forms convert to series in k (rather than
// 1/k), convergent for |k| <= 4 resp. |k| <= 3:
//
//   mu_m(k) = Re[(|k|/4) 3F2(1/2,1/2,1/2; 1,3/2; k^2/16)]
//   mu_n(k) = s(k) Re[A k 3F2(1/3,1/3,1/3; 2/3,4/3; k^3/27)
//                   + B k^2 3F2(2/3,2/3,2/3; 4/3,5/3; k^3/27)]
//
// with the constants A, B and weight s(k) from hypergeometric.hpp.
//
// The auxiliary functions entering the piecewise lattice-sum formulas are
//
//   mu_m2(k) = Im int_k^1 2F1(1/2,1/2;1;1-u) du/u
//   mu_n2(k) = Im int_k^1 2F1(1/3,2/3;1;1-u) du/u     (straight path from k to 1)
//
// together with ntilde above.
#pragma once

#include "latticelab/precision.hpp"
#include "latticelab/rational.hpp"

#include <string>
#include <vector>

namespace latticelab {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

// One Laurent term  coeff * y^exp_y * z^exp_z.
struct LaurentTerm {
    long exp_y = 0;
    long exp_z = 0;
    Cplx coeff;
};

// A two-variable Laurent polynomial with finite support. Must be nonzero by
// the time it reaches mahler_2var.
struct LaurentPoly2 {
    std::vector<LaurentTerm> terms;
};

enum class FamilyTag { m, n, g, r };

struct MahlerFamily {
    FamilyTag tag;
    Cplx k;
};

// Families served by hypergeometric closed forms. "ntilde" is the analytic
// companion Re(log k - Psi(27/k^3)) defined for every k != 0; it agrees with
// mu_n(k) for |k| large (numerically checked, never assumed).
enum class ClosedFamily { m, n, g, ntilde };

// Auxiliary functions of the piecewise lattice-sum formulas.
enum class AuxKind { m2, n2, ntilde };

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Parse "c*y^a*z^b" sums, e.g. "5 + y + y^-1 + z + z^-1" or
// "(1/3+2/3i)*z^2 - i*y*z". Coefficients are Gaussian rationals: integers,
// fractions n/d, the imaginary unit i, products thereof, and parenthesized
// combinations "(re+im i)". Exponents are (possibly negative) integers.
// Coefficient values are realized at the precision in effect at parse time,
// so parse under the ScopedPrecision you intend to evaluate under.
LaurentPoly2 parse_laurent_poly2(const std::string& text);

// The defining polynomial of a family instance (k realized at working
// precision of the current thread defaults).
LaurentPoly2 family_polynomial(const MahlerFamily& fam);

// Torus-integral measure of an arbitrary nonzero Laurent polynomial.
// Throws domain_error on a zero polynomial or a fiber that degenerates to the
// zero polynomial at some sampled y, precision_error if the root finder or
// quadrature cannot reach the requested accuracy.
Real mahler_2var(const LaurentPoly2& P, const PrecisionContext& ctx);

// Family measure through the torus integral (route of last resort, and the
// only route for the r family).
Real family_direct(const MahlerFamily& fam, const PrecisionContext& ctx);

// Family measure through the hypergeometric closed forms. Domain:
//   m:       any k != 0  (real |k| <= 4 uses the 3F2 series; |k| = 4 itself
//            sits on the series boundary and throws)
//   n:       |27/k^3| < 1, or k real with |k| < 3
//   g:       real k in the open interval (-4, 2) is not covered (use
//            family_direct); the endpoints are served through the proven
//            n-family equivalences mu_g(2) = (1/3) mu_n(3*2^{1/3}),
//            mu_g(-4) = (4/3) mu_n(3*2^{1/3})
//   ntilde:  any k != 0 away from the branch point 27/k^3 = 1
Real family_closed(ClosedFamily fam, const Cplx& k, const PrecisionContext& ctx);

// mu_m2 / mu_n2 path integrals (straight path from k to 1; throws if the path
// meets u = 0 or the cut (-inf, 0] of the integrand), and ntilde.
Real aux_m2_n2_ntilde(AuxKind which, const Cplx& k, const PrecisionContext& ctx);

// ---------------------------------------------------------------------------
// Closed-form sides, exposed for cross-checking
// ---------------------------------------------------------------------------

// Re(log k - Phi(16/k^2)) with path continuation: valid for any k != 0 with
// 16/k^2 away from the branch point 1 (i.e. k away from +-4).
Real m_closed_via_4f3(const Cplx& k, const PrecisionContext& ctx);

// Re[(|k|/4) 3F2(...; k^2/16)], real k, |k| < 4 (series route); for |k| > 4
// the same function is continued as an integral of 2F1(1/2,1/2;1;u^2) and
// still equals mu_m(k).
Real m_closed_via_3f2(const Real& k, const PrecisionContext& ctx);

// Re(log k - Psi(27/k^3)) with path continuation == ntilde(k).
Real n_closed_via_4f3(const Cplx& k, const PrecisionContext& ctx);

// s(k) Re[A k 3F2 + B k^2 3F2] at k^3/27, real k, |k| < 3.
Real n_closed_via_3f2(const Real& k, const PrecisionContext& ctx);

// Real part of the continued primitives themselves (unit tested against the
// derivative integrals; also used by the lattice-sum piecewise formulas).
Real re_phi_continued(const Cplx& z, const PrecisionContext& ctx);
Real re_psi_continued(const Cplx& z, const PrecisionContext& ctx);

} // namespace latticelab
