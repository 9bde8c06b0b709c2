// Li_2..Li_4 via three regimes (direct series, zeta/log annulus expansion,
// 1/z inversion) plus the single-valued combinations D and R.
#include "latticelab/polylog.hpp"

#include <algorithm>

namespace latticelab {

namespace {

constexpr double kDirectR = 0.55;   // direct series outer radius
constexpr double kInvR = 1.90;      // inversion inner radius

// sum_{k>=1} z^k / k^s, |z| < 1 (used for |z| <= 0.55 where it is fast)
Cplx polylog_direct(int s, const Cplx& z, const PrecisionContext& ctx) {
    Real az = abs(z);
    Cplx zp = z, sum = z;
    const Real tol = ctx.tol() / 4;
    for (std::uint64_t k = 2;; ++k) {
        zp *= z;
        Real ks = Real(k) * Real(k);
        if (s >= 3) ks *= Real(k);
        if (s == 4) ks *= Real(k);
        sum += zp / Cplx(ks);
        // |z^k / k^s| <= |z|^k: geometric tail
        Real tail = abs(zp) * az / (1 - az);
        if (tail < tol * ((std::max))(Real(1), abs(sum))) break;
        if (k > ctx.max_terms) throw precision_error("polylog: series budget exhausted");
    }
    return sum;
}

// Annulus expansion around z = 1 in mu = log z (valid |mu| < 2 pi):
//   Li_s(z) = sum_{k>=0, k != s-1} zeta(s-k) mu^k / k!
//             + mu^{s-1}/(s-1)! (H_{s-1} - log(-mu)).
Cplx polylog_logseries(int s, const Cplx& z, const PrecisionContext& ctx) {
    Cplx mu = log(z);
    Real H(0);
    for (int j = 1; j < s; ++j) H += Real(1) / j;
    Real r = abs(mu) / (2 * const_pi());   // asymptotic term ratio
    const Real tol = ctx.tol() / 4;
    Cplx mupow(1), sum(0);   // mupow = mu^k / k!
    Real recent_max(0);
    for (int k = 0;; ++k) {
        Cplx term = (k == s - 1) ? mupow * (Cplx(H) - log(-mu))
                                 : mupow * Cplx(zeta_real(Real(s - k)));
        sum += term;
        Real m = abs(term);
        recent_max = (std::max)(recent_max, m);
        if (k % 4 == 3) {
            // |term| decays like r^k with r < 0.52 here (zeta(-2m) zeros make
            // some terms vanish, hence the window max instead of a single term)
            if (recent_max * r / (1 - r) < tol * ((std::max))(Real(1), abs(sum)) && k > s + 4)
                break;
            recent_max = 0;
        }
        mupow = mupow * mu / Cplx(Real(k + 1));
        if (k > 4000) throw precision_error("polylog: annulus expansion failed to converge");
    }
    return sum;
}

// 1/z inversion with L = log(-z), principal branch:
//   Li_2(z) = -Li_2(1/z) - pi^2/6 - L^2/2
//   Li_3(z) =  Li_3(1/z) - pi^2 L/6 - L^3/6
//   Li_4(z) = -Li_4(1/z) - 7 pi^4/360 - pi^2 L^2/12 - L^4/24
Cplx polylog_inversion(int s, const Cplx& z, const PrecisionContext& ctx) {
    Cplx w = Cplx(1) / z;
    Cplx liw = polylog_direct(s, w, ctx);   // |w| <= 1/1.9 < 0.55
    Cplx L = log(-z);
    Real pi = const_pi(), pi2 = pi * pi;
    switch (s) {
        case 2: return -liw - Cplx(pi2 / 6) - L * L / Cplx(2);
        case 3: return liw - Cplx(pi2 / 6) * L - L * L * L / Cplx(6);
        default: {
            Cplx L2 = L * L;
            return -liw - Cplx(7 * pi2 * pi2 / 360) - Cplx(pi2 / 12) * L2 -
                   L2 * L2 / Cplx(24);
        }
    }
}

void check_not_singular(const Cplx& z) {
    if (z.is_real() && (z.re.is_zero() || z.re == 1))
        throw domain_error("singular point z = 0 or z = 1");
}

} // namespace

Cplx polylog(int s, const Cplx& z_in, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    if (s < 2 || s > 4) throw domain_error("polylog: s must be 2, 3, or 4");
    const Cplx z = at_working(z_in);
    if (z.re.is_zero() && z.im.is_zero()) return Cplx(0);
    if (z.is_real()) {
        if (z.re == 1) return Cplx(zeta_real(Real(s)));
        if (z.re > 1) throw domain_error("polylog: z on the cut [1, inf)");
    }
    Real az = abs(z);
    Cplx v = az <= Real(kDirectR)  ? polylog_direct(s, z, ctx)
             : az >= Real(kInvR)   ? polylog_inversion(s, z, ctx)
                                   : polylog_logseries(s, z, ctx);
    if (z.is_real()) {
        // Li_s maps (-inf, 1] into R; the annulus expansion's complex
        // intermediates leave an imaginary residue bounded by the series
        // truncation tolerance
        if (abs(v.im) > ctx.tol() * (1 + abs(v.re)))
            throw precision_error("polylog: imaginary residue on real input");
        return Cplx(v.re);
    }
    return v;
}

Real bloch_wigner_D(const Cplx& z_in, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    const Cplx z = at_working(z_in);
    check_not_singular(z);
    if (z.is_real()) return Real(0);   // continuous extension: D vanishes on R
    Cplx li2 = polylog(2, z, ctx);
    return li2.im + log(abs(z)) * arg(Cplx(1) - z);
}

Real R_fn(const Cplx& z_in, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    const Cplx z = at_working(z_in);
    check_not_singular(z);
    if (z.is_real()) return Real(0);   // same continuous extension as D
    Real l = log(abs(z));
    Cplx combo = Cplx(l) * polylog(4, z, ctx) - Cplx(l * l) * polylog(3, z, ctx) +
                 Cplx(l * l * l / 3) * polylog(2, z, ctx);
    return combo.im;
}

} // namespace latticelab
