// Polylogarithms Li_s for s in {2,3,4} on the principal branch, the
// Bloch-Wigner dilogarithm D, and the single-valued weight-4 combination R.
//
// Domain policy: polylog accepts any z with |z| <= 1 or z off the cut
// [1,infinity); real z > 1 raises domain_error (no side convention is
// offered -- the callers that need boundary values use the single-valued
// combinations D and R, which extend by 0 on the real line).
#pragma once

#include "latticelab/precision.hpp"

namespace latticelab {

// Principal-branch Li_s(z), s in {2,3,4}: direct series for small |z|,
// a zeta/log expansion in the middle annulus, 1/z inversion outside.
Cplx polylog(int s, const Cplx& z, const PrecisionContext& ctx);

// D(z) = Im(Li_2(z) + log|z| log(1-z)); zero on the real line, odd under
// conjugation. Precondition: z != 0, 1.
Real bloch_wigner_D(const Cplx& z, const PrecisionContext& ctx);

// R(z) = Im(log|z| Li_4(z) - log^2|z| Li_3(z) + (log^3|z|/3) Li_2(z));
// like D, extends by 0 on the real line. Precondition: z != 0, 1.
Real R_fn(const Cplx& z, const PrecisionContext& ctx);

} // namespace latticelab
