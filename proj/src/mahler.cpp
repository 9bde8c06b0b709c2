// Implementation of two-variable Mahler measures: torus integrals by
// Jensen's formula, the hypergeometric closed forms of the m/n/g families,
// and the auxiliary path integrals m2/n2/ntilde.
//
// Design notes
// ------------
// Torus route (mahler_2var): the polynomial is arranged as sum_j c_j(y) z^j
// with sparse Laurent coefficients c_j. For y on the unit circle the inner
// integral over z is Jensen's formula, J(y) = log|c_d(y)| + sum log^+ |root|.
// J is continuous in t (y = e^{2 pi i t}) and smooth except at the finitely
// many t where a root crosses the unit circle. Those crossings are bracketed
// by scanning the count of roots outside the circle on a coarse grid and
// bisecting every jump; the outer integral is then tanh-sinh per smooth
// piece (with the quadrature's own stall-bisection as a safety net for
// crossings an entire grid cell wide of the scan, e.g. tangential pairs).
//
// Fiber roots: degree 1 and 2 are solved in closed form (the quadratic via
// the |c1 + sqrt(disc)|-maximizing branch, so no cancellation); degree >= 3
// uses Aberth-Ehrlich simultaneous iteration started on a root-bound circle.
// A leading coefficient below the degeneracy threshold deflates the degree:
// lim_{c_d -> 0} [log|c_d| + log|c_{d-1}/c_d|] = log|c_{d-1}| exactly, so
// dropping the huge root is the correct limit and costs nothing.
//
// Closed forms: Phi(w) = (w/8) 4F3(3/2,3/2,1,1;2,2,2;w) and
// Psi(w) = (2w/27) 4F3(4/3,5/3,1,1;2,2,2;w) are evaluated by their series for
// |w| <= 0.995 and otherwise continued as Phi(w0) + int_path Phi', with
//   Phi'(w) = (2F1(1/2,1/2;1;w) - 1)/(2w),
//   Psi'(w) = (2F1(1/3,2/3;1;w) - 1)/(3w),
// w0 = 0.85 w/|w|, and a path that detours below the branch cut [1, inf)
// for real targets (rectangle through Im = -3/4) or stays on the target's
// side of the axis for complex ones. Only Re Phi / Re Psi are consumed and
// the jump of 2F1 across the cut is purely imaginary, so the detour side is
// immaterial for the real part.
//
// Validity caveats encoded below (established numerically, see tests):
//   - mu_n(k) = Re(log k - Psi(27/k^3)) holds for real k <= -1 and k >= 3
//     but NOT on (-1,3)\{0}, where the family polynomial vanishes on the
//     torus; family_closed(n) therefore throws there.
//   - the g closed form equals the measure only off the real interval
//     (-4,2); the endpoints ride on the proven equivalences
//     mu_g(2) = (1/3) mu_n(3*2^{1/3}), mu_g(-4) = (4/3) mu_n(3*2^{1/3}).

#include "latticelab/mahler.hpp"

#include "latticelab/hypergeometric.hpp"
#include "latticelab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

namespace latticelab {

namespace {

// ---------------------------------------------------------------------------
// Parser: sums of terms  coeff '*' y-power '*' z-power  with Gaussian-rational
// coefficients. Grammar (whitespace free-form):
//   poly   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := 'y' ['^' int] | 'z' ['^' int] | 'i' | rat ['i'] | '(' gauss ')'
//   gauss  := ['+'|'-'] simple (('+'|'-') simple)?       e.g. 1/2-3/4i
//   simple := rat ['i'] | 'i'
//   rat    := digits ['/' digits]
// ---------------------------------------------------------------------------

struct Parser {
    const std::string& s;
    size_t i = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool peek(char c) {
        skip();
        return i < s.size() && s[i] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++i;
        return true;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw domain_error("parse_laurent_poly2: " + what + " at position " +
                           std::to_string(i) + " of \"" + s + "\"");
    }

    Int digits() {
        skip();
        size_t start = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        if (i == start) fail("expected digits");
        return Int(s.substr(start, i - start));
    }

    long exponent() {
        skip();
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        Int d = digits();
        long v = d.convert_to<long>();
        return neg ? -v : v;
    }

    Rat rational() {
        Int num = digits();
        if (eat('/')) {
            Int den = digits();
            if (den == 0) fail("zero denominator");
            return Rat(num, den);
        }
        return Rat(num);
    }

    bool at_imag_unit() {
        skip();
        if (i >= s.size() || s[i] != 'i') return false;
        // do not confuse a hypothetical identifier; 'i' must not be followed
        // by a letter or digit
        if (i + 1 < s.size()) {
            char c = s[i + 1];
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9'))
                fail("unexpected identifier");
        }
        return true;
    }

    GaussianRational simple() {
        if (at_imag_unit()) {
            ++i;
            return GaussianRational::i_unit();
        }
        Rat r = rational();
        if (at_imag_unit()) {
            ++i;
            return GaussianRational(Rat(0), r);
        }
        return GaussianRational(r);
    }

    GaussianRational gauss() {
        GaussianRational acc(0);
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        GaussianRational first = simple();
        acc = neg ? -first : first;
        skip();
        while (peek('+') || peek('-')) {
            bool n2 = eat('-');
            if (!n2) eat('+');
            GaussianRational nxt = simple();
            acc += n2 ? -nxt : nxt;
        }
        return acc;
    }

    // One term: returns (exp_y, exp_z, coefficient).
    void term(long& ey, long& ez, GaussianRational& c) {
        ey = ez = 0;
        c = GaussianRational(1);
        bool expect_factor = true;
        while (expect_factor) {
            skip();
            if (i >= s.size()) fail("expected a factor");
            char ch = s[i];
            if (ch == 'y' || ch == 'z') {
                ++i;
                long e = 1;
                if (eat('^')) e = exponent();
                (ch == 'y' ? ey : ez) += e;
            } else if (ch == '(') {
                ++i;
                c *= gauss();
                if (!eat(')')) fail("expected ')'");
            } else if (ch == 'i') {
                if (!at_imag_unit()) fail("unexpected identifier");
                ++i;
                c *= GaussianRational::i_unit();
            } else if (ch >= '0' && ch <= '9') {
                c *= GaussianRational(rational());
                if (at_imag_unit()) {
                    ++i;
                    c *= GaussianRational::i_unit();
                }
            } else {
                fail("unexpected character");
            }
            expect_factor = eat('*');
        }
    }
};

// ---------------------------------------------------------------------------
// Fiber representation: z-degree columns of sparse Laurent polynomials in y,
// exponents shifted to be non-negative (a monomial shift y^a z^b changes the
// polynomial by a torus unit and leaves the measure unchanged).
// ---------------------------------------------------------------------------

struct Fiber {
    // cols[j] = list of (exp_y, coeff) making up the z^j coefficient
    std::vector<std::vector<std::pair<long, Cplx>>> cols;
    Real scale; // max |coeff|, reference for degeneracy thresholds
};

Fiber build_fiber(const LaurentPoly2& P) {
    if (P.terms.empty()) throw domain_error("mahler_2var: zero polynomial");
    long min_ey = P.terms[0].exp_y, min_ez = P.terms[0].exp_z, max_ez = P.terms[0].exp_z;
    for (const auto& t : P.terms) {
        min_ey = std::min(min_ey, t.exp_y);
        min_ez = std::min(min_ez, t.exp_z);
        max_ez = std::max(max_ez, t.exp_z);
    }
    Fiber f;
    f.cols.assign(static_cast<size_t>(max_ez - min_ez) + 1, {});
    f.scale = Real(0);
    for (const auto& t : P.terms) {
        Cplx c = at_working(t.coeff);
        Real a = abs(c);
        if (a == 0) continue;
        if (a > f.scale) f.scale = a;
        f.cols[static_cast<size_t>(t.exp_z - min_ez)].emplace_back(t.exp_y - min_ey, c);
    }
    if (f.scale == 0) throw domain_error("mahler_2var: zero polynomial");
    // drop trailing all-zero columns (can happen after zero-coefficient terms)
    while (!f.cols.empty() && f.cols.back().empty()) f.cols.pop_back();
    while (!f.cols.empty() && f.cols.front().empty()) f.cols.erase(f.cols.begin());
    if (f.cols.empty()) throw domain_error("mahler_2var: zero polynomial");
    return f;
}

// Evaluate the z-coefficients at y (|y| = 1), ascending degree.
std::vector<Cplx> eval_cols(const Fiber& f, const Cplx& y) {
    // powers of y by repeated multiplication up to the max exponent present
    long max_e = 0;
    for (const auto& col : f.cols)
        for (const auto& [e, c] : col) max_e = std::max(max_e, e);
    std::vector<Cplx> pw(static_cast<size_t>(max_e) + 1, Cplx(Real(1)));
    for (long e = 1; e <= max_e; ++e) pw[static_cast<size_t>(e)] = pw[static_cast<size_t>(e - 1)] * y;
    std::vector<Cplx> out;
    out.reserve(f.cols.size());
    for (const auto& col : f.cols) {
        Cplx acc(Real(0));
        for (const auto& [e, c] : col) acc += c * pw[static_cast<size_t>(e)];
        out.push_back(acc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polynomial roots at working precision
// ---------------------------------------------------------------------------

// Both roots of c2 z^2 + c1 z + c0, |c2| not tiny; the branch of sqrt(disc)
// is chosen to maximize |c1 + sqrt(disc)| so that q = -(c1+sqrt)/2 never
// cancels; the roots q/c2 and c0/q are then both stable.
void quadratic_roots(const Cplx& c2, const Cplx& c1, const Cplx& c0,
                     std::vector<Cplx>& out) {
    Cplx d = sqrt(c1 * c1 - Real(4) * c2 * c0);
    if (d.re * c1.re + d.im * c1.im < 0) d = -d;
    Cplx q = -(c1 + d) / Real(2);
    if (abs(q) == 0) {
        // c1 = 0 and c0 c2 = 0 here; both roots are sqrt(-c0/c2)
        Cplx r = sqrt(-c0 / c2);
        out.push_back(r);
        out.push_back(-r);
        return;
    }
    out.push_back(q / c2);
    out.push_back(c0 / q);
}

// Aberth-Ehrlich iteration for degree >= 3 (coefficients ascending, leading
// coefficient not tiny). Throws precision_error on non-convergence.
void aberth_roots(const std::vector<Cplx>& coeffs, const PrecisionContext& ctx,
                  std::vector<Cplx>& out) {
    const size_t d = coeffs.size() - 1;
    // monic-normalize
    std::vector<Cplx> b(coeffs.size());
    for (size_t j = 0; j <= d; ++j) b[j] = coeffs[j] / coeffs[d];
    // Cauchy-style inclusion radius
    Real R(1);
    for (size_t j = 0; j < d; ++j) {
        Real a = abs(b[j]);
        if (a > R) R = a;
    }
    R += 1;
    std::vector<Cplx> z(d);
    {
        // staggered circle of initial guesses; irrational-ish phase offset
        // breaks symmetric stalls
        Real pi_v = const_pi();
        for (size_t j = 0; j < d; ++j) {
            Real frac = (Real(2) * Real((long)j) + Real(1) / Real(3)) / Real((long)d);
            Real radius = R * (Real(6) + Real((long)(j % 3))) / Real(10);
            Real c = cos(pi_v * frac), s = sin(pi_v * frac);
            z[j] = Cplx(radius * c, radius * s);
        }
    }
    const Real eps = pow10(-(long)ctx.working() + 6);
    const Real tiny = pow10(-(long)ctx.working() * 2);
    bool converged = false;
    for (int iter = 0; iter < 240 && !converged; ++iter) {
        Real max_step(0);
        for (size_t jj = 0; jj < d; ++jj) {
            // Horner for p and p'
            Cplx p(Real(0)), dp(Real(0));
            for (size_t j = d + 1; j-- > 0;) {
                dp = dp * z[jj] + p;
                p = p * z[jj] + b[j];
            }
            if (abs(p) == 0) continue;
            Cplx N;
            if (abs(dp) < tiny) {
                // sitting on a critical point: nudge off it
                z[jj] += Cplx(eps, eps);
                max_step = Real(1);
                continue;
            }
            N = p / dp;
            Cplx S(Real(0));
            bool collision = false;
            for (size_t kk = 0; kk < d; ++kk) {
                if (kk == jj) continue;
                Cplx diff = z[jj] - z[kk];
                if (abs(diff) < tiny) {
                    collision = true;
                    break;
                }
                S += Cplx(Real(1)) / diff;
            }
            if (collision) {
                z[jj] += Cplx(eps * Real((long)jj + 2), eps);
                max_step = Real(1);
                continue;
            }
            Cplx denom = Cplx(Real(1)) - N * S;
            Cplx w = abs(denom) < tiny ? N : N / denom;
            z[jj] -= w;
            Real rel = abs(w) / std::max(Real(1), abs(z[jj]));
            if (rel > max_step) max_step = rel;
        }
        if (max_step < eps) converged = true;
    }
    if (!converged)
        throw precision_error("mahler_2var: fiber root finder failed to converge");
    for (const auto& r : z) out.push_back(r);
}

// Roots of the fiber polynomial given ascending coefficients; tiny leading
// coefficients are deflated (the limit value of Jensen's formula).
std::vector<Cplx> fiber_roots(std::vector<Cplx> c, const Real& tiny,
                              const PrecisionContext& ctx, Real& lead_abs) {
    while (c.size() > 1 && abs(c.back()) < tiny) c.pop_back();
    std::vector<Cplx> roots;
    lead_abs = abs(c.back());
    if (c.size() == 1) {
        if (lead_abs < tiny)
            throw domain_error(
                "mahler_2var: fiber degenerates to the zero polynomial at a "
                "quadrature node");
        return roots;
    }
    if (c.size() == 2) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    if (c.size() == 3) {
        quadratic_roots(c[2], c[1], c[0], roots);
        return roots;
    }
    aberth_roots(c, ctx, roots);
    return roots;
}

// ---------------------------------------------------------------------------
// Jensen integrand and the outer integral
// ---------------------------------------------------------------------------

struct JensenEval {
    const Fiber& fiber;
    const PrecisionContext& ctx;
    Real tiny;     // degeneracy threshold, relative to fiber.scale
    Real circ_tol; // |root| this close to 1 contributes log^+ = 0

    explicit JensenEval(const Fiber& f, const PrecisionContext& c)
        : fiber(f), ctx(c) {
        tiny = f.scale * pow10(-(long)c.working() + 8);
        circ_tol = pow10(-(long)(c.target_digits + 5));
    }

    std::vector<Cplx> roots_at(const Real& t, Real& lead_abs) const {
        Real angle = Real(2) * const_pi() * t;
        Cplx y(cos(angle), sin(angle));
        std::vector<Cplx> c = eval_cols(fiber, y);
        Real biggest(0);
        for (const auto& cc : c) {
            Real a = abs(cc);
            if (a > biggest) biggest = a;
        }
        if (biggest < tiny)
            throw domain_error(
                "mahler_2var: fiber degenerates to the zero polynomial at a "
                "quadrature node");
        return fiber_roots(std::move(c), tiny, ctx, lead_abs);
    }

    Real value(const Real& t) const {
        Real lead_abs(0);
        std::vector<Cplx> roots = roots_at(t, lead_abs);
        Real J = log(lead_abs);
        for (const auto& r : roots) {
            Real a = abs(r);
            if (a > Real(1) + circ_tol) J += log(a);
        }
        return J;
    }

    long count_outside(const Real& t) const {
        Real lead_abs(0);
        std::vector<Cplx> roots = roots_at(t, lead_abs);
        long n = 0;
        for (const auto& r : roots)
            if (abs(r) > Real(1) + circ_tol) ++n;
        return n;
    }
};

// Locate the unit-circle crossings of the fiber roots in (0,1): scan the
// outside-count on a grid, bisect every jump. Multiple crossings per cell are
// handled by re-queuing both halves when the midpoint matches neither end.
std::vector<Real> circle_crossings(const JensenEval& je, const PrecisionContext& ctx) {
    const int grid = 96;
    const Real kink_eps = pow10(-std::max(12L, (long)ctx.target_digits / 2 + 9));
    std::vector<std::pair<Real, long>> samples;
    samples.reserve(grid);
    for (int i = 0; i < grid; ++i) {
        Real t = (Real(2 * i + 1)) / Real(2 * grid);
        samples.emplace_back(t, je.count_outside(t));
    }
    std::vector<Real> splits;
    std::vector<std::tuple<Real, Real, long, long>> work;
    auto queue_cell = [&](const Real& a, const Real& b, long ka, long kb) {
        if (ka != kb) {
            work.emplace_back(a, b, ka, kb);
            return;
        }
        // Equal counts can hide a crossing pair (a root entering and leaving
        // within one cell — the generic situation in the wrap-around cell
        // when the kink window straddles t = 0); one midpoint probe.
        Real mid = (a + b) / 2;
        Real mid_eval = mid >= 1 ? Real(mid - 1) : mid;
        long km = je.count_outside(mid_eval);
        if (km != ka) {
            work.emplace_back(a, mid, ka, km);
            work.emplace_back(mid, b, km, kb);
        }
    };
    for (int i = 0; i + 1 < grid; ++i)
        queue_cell(samples[i].first, samples[i + 1].first, samples[i].second,
                   samples[i + 1].second);
    // wrap-around cell (t = 0 is the same fiber as t = 1)
    queue_cell(samples.back().first, Real(1) + samples.front().first,
               samples.back().second, samples.front().second);
    while (!work.empty() && splits.size() < 64) {
        auto [a, b, ka, kb] = work.back();
        work.pop_back();
        if (ka == kb) continue;
        if (b - a < kink_eps) {
            Real mid = (a + b) / 2;
            if (mid >= 1) mid -= 1;
            splits.push_back(mid);
            continue;
        }
        Real mid = (a + b) / 2;
        Real mid_eval = mid >= 1 ? mid - Real(1) : mid;
        long km = je.count_outside(mid_eval);
        if (km != ka) work.emplace_back(a, mid, ka, km);
        if (km != kb) work.emplace_back(mid, b, km, kb);
    }
    std::sort(splits.begin(), splits.end());
    return splits;
}

// ---------------------------------------------------------------------------
// Continued primitives Re Phi, Re Psi
// ---------------------------------------------------------------------------

struct PrimitiveSpec {
    std::vector<Real> upper, lower; // 4F3 parameters
    Rat d_a, d_b;                   // 2F1 parameters of the derivative
    long d_scale;                   // Phi' = (2F1-1)/(2w): scale 2; Psi': 3
    Real series_pref_num;           // Phi = (w/8)*4F3: 1/8; Psi = (2w/27)*4F3
    Real series_pref_den;
};

PrimitiveSpec phi_spec() {
    PrimitiveSpec s;
    Real half3 = to_real(Rat(3, 2));
    s.upper = {half3, half3, Real(1), Real(1)};
    s.lower = {Real(2), Real(2), Real(2)};
    s.d_a = Rat(1, 2);
    s.d_b = Rat(1, 2);
    s.d_scale = 2;
    s.series_pref_num = Real(1);
    s.series_pref_den = Real(8);
    return s;
}

PrimitiveSpec psi_spec() {
    PrimitiveSpec s;
    s.upper = {to_real(Rat(4, 3)), to_real(Rat(5, 3)), Real(1), Real(1)};
    s.lower = {Real(2), Real(2), Real(2)};
    s.d_a = Rat(1, 3);
    s.d_b = Rat(2, 3);
    s.d_scale = 3;
    s.series_pref_num = Real(2);
    s.series_pref_den = Real(27);
    return s;
}

Real re_primitive_continued(const PrimitiveSpec& sp, const Cplx& z,
                            const PrecisionContext& ctx) {
    Real az = abs(z);
    if (az == 0) return Real(0);
    auto series = [&](const Cplx& w, const PrecisionContext& c) -> Cplx {
        return (sp.series_pref_num * w / sp.series_pref_den) *
               pfq(sp.upper, sp.lower, w, c);
    };
    if (az <= Real(995) / 1000) return series(z, ctx).re;

    // branch-point guard: target too close to w = 1
    Cplx one_minus = Cplx(Real(1)) - z;
    if (abs(one_minus) < Real(4) / 1000)
        throw precision_error(
            "re_primitive_continued: argument too close to the branch point 1");

    // Series and 2F1 evaluations truncate at ~10^-target, so quadrature built
    // on them cannot verify a tighter tolerance than that noise floor; give
    // the integrand extra digits and ask the path for target+4.
    PrecisionContext ictx = ctx.with_target(ctx.target_digits + ctx.guard_digits / 2);
    auto deriv = [&](const Cplx& w) -> Cplx {
        // The deepest quadrature abscissas of a segment ending on the real
        // axis past 1 round onto the cut exactly; take the limit from below,
        // the side every detour here approaches the axis from. (Only the real
        // part of the result is consumed, and the jump across the cut is
        // purely imaginary, so the side cannot affect the answer.)
        Cplx f = w.im.is_zero() && w.re >= 1
                     ? hyp2f1_on_cut(sp.d_a, sp.d_b, Rat(1), w.re,
                                     CutSide::below, ictx)
                     : hyp2f1(sp.d_a, sp.d_b, Rat(1), w, ictx);
        return (f - Cplx(Real(1))) / (Real((long)sp.d_scale) * w);
    };
    Cplx z0 = z * (Real(85) / (100 * az));
    std::vector<Cplx> nodes;
    Real detour = Real(3) / 4;
    bool z_real = abs(z.im) <= az * pow10(-(long)ctx.working() + 10);
    if (z_real && z.re > 0) {
        // real target past the series disk: rectangle below the cut
        nodes = {z0, Cplx(z0.re, -detour), Cplx(z.re, -detour), Cplx(z.re)};
    } else if (!z_real && z.re > 0) {
        // complex target right of the imaginary axis: stay on its side
        Real side = z.im > 0 ? detour : -detour;
        nodes = {z0, Cplx(z0.re, side), Cplx(z.re, side), z};
    } else {
        // left half-plane (Re z <= 0): the straight segment from z0 cannot
        // meet [1, inf)
        nodes = {z0, z};
    }
    Real tol = pow10(-(long)ctx.target_digits - 4);
    Cplx base = series(z0, ictx);
    Cplx path = integrate_path(deriv, nodes, tol, ctx.quad_max_levels);
    return (base + path).re;
}

Real cbrt2_times3() { return 3 * cbrt(Real(2)); }

bool is_real_input(const Cplx& k, const Real& ak, const PrecisionContext& ctx) {
    return abs(k.im) <= ak * pow10(-(long)ctx.working() + 10);
}

} // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

LaurentPoly2 parse_laurent_poly2(const std::string& text) {
    Parser p(text);
    std::map<std::pair<long, long>, GaussianRational> acc;
    bool neg = false;
    p.skip();
    if (p.eat('-')) neg = true;
    else p.eat('+');
    for (;;) {
        long ey, ez;
        GaussianRational c;
        p.term(ey, ez, c);
        auto key = std::make_pair(ey, ez);
        auto it = acc.find(key);
        if (it == acc.end()) acc.emplace(key, neg ? -c : c);
        else it->second += neg ? -c : c;
        p.skip();
        if (p.i >= p.s.size()) break;
        if (p.eat('-')) neg = true;
        else if (p.eat('+')) neg = false;
        else p.fail("expected '+', '-' or end of input");
    }
    LaurentPoly2 out;
    for (const auto& [key, c] : acc) {
        if (c.is_zero()) continue;
        LaurentTerm t;
        t.exp_y = key.first;
        t.exp_z = key.second;
        t.coeff = Cplx(to_real(c.re), to_real(c.im));
        out.terms.push_back(t);
    }
    if (out.terms.empty())
        throw domain_error("parse_laurent_poly2: the polynomial is zero");
    return out;
}

LaurentPoly2 family_polynomial(const MahlerFamily& fam) {
    const Cplx& k = fam.k;
    LaurentPoly2 P;
    auto add = [&P](long ey, long ez, const Cplx& c) {
        P.terms.push_back({ey, ez, c});
    };
    Cplx one(Real(1));
    switch (fam.tag) {
        case FamilyTag::m:
            // k + y + 1/y + z + 1/z
            add(0, 0, k);
            add(1, 0, one);
            add(-1, 0, one);
            add(0, 1, one);
            add(0, -1, one);
            break;
        case FamilyTag::n:
            // y^3 + z^3 + 1 - k y z
            add(3, 0, one);
            add(0, 3, one);
            add(0, 0, one);
            add(1, 1, -k);
            break;
        case FamilyTag::g:
            // (1+y)(1+z)(y+z) - k y z
            //   = (1+y) z^2 + (1 + (2-k) y + y^2) z + y(1+y)
            add(0, 2, one);
            add(1, 2, one);
            add(0, 1, one);
            add(1, 1, Cplx(Real(2)) - k);
            add(2, 1, one);
            add(1, 0, one);
            add(2, 0, one);
            break;
        case FamilyTag::r:
            // (1+y)(1+z)(1+y+z) - k y z
            //   = (1+y) z^2 + (2 + (3-k) y + y^2) z + (1+y)^2
            add(0, 2, one);
            add(1, 2, one);
            add(0, 1, Cplx(Real(2)));
            add(1, 1, Cplx(Real(3)) - k);
            add(2, 1, one);
            add(0, 0, one);
            add(1, 0, Cplx(Real(2)));
            add(2, 0, one);
            break;
    }
    return P;
}

Real mahler_2var(const LaurentPoly2& P, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Fiber fiber = build_fiber(P);
    JensenEval je(fiber, ctx);

    std::vector<Real> splits = circle_crossings(je, ctx);
    std::vector<Real> pts;
    pts.push_back(Real(0));
    for (const auto& t : splits)
        if (t > pow10(-30) && t < Real(1) - pow10(-30)) pts.push_back(t);
    pts.push_back(Real(1));

    IntegrandEndpoints<Real> f = [&](const Real& t, const Real&, const Real&) {
        return je.value(t);
    };
    Real total(0);
    Real abs_tol = pow10(-(long)ctx.target_digits - 4);
    Real piece_tol = abs_tol / Real((long)pts.size() - 1);
    int budget = ctx.quad_max_subdivisions;
    for (size_t idx = 0; idx + 1 < pts.size(); ++idx)
        total += tanh_sinh<Real>(f, pts[idx], pts[idx + 1], piece_tol,
                                 ctx.quad_max_levels, &budget);
    return total;
}

Real family_direct(const MahlerFamily& fam, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    MahlerFamily f{fam.tag, at_working(fam.k)};
    return mahler_2var(family_polynomial(f), ctx);
}

Real re_phi_continued(const Cplx& z, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    return re_primitive_continued(phi_spec(), at_working(z), ctx);
}

Real re_psi_continued(const Cplx& z, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    return re_primitive_continued(psi_spec(), at_working(z), ctx);
}

Real m_closed_via_4f3(const Cplx& k, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Cplx kk = at_working(k);
    Real ak = abs(kk);
    if (ak == 0) throw domain_error("m closed form: k = 0");
    Cplx z = Real(16) / (kk * kk);
    return log(ak) - re_primitive_continued(phi_spec(), z, ctx);
}

Real m_closed_via_3f2(const Real& k, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Real a = abs(at_working(k));
    if (a == 0) return Real(0); // the measure of 0 + y + 1/y + z + 1/z
    Real x = a * a / 16;
    if (x <= Real(995) / 1000) {
        Real half = to_real(Rat(1, 2));
        return (a / 4) * pfq({half, half, half}, {Real(1), to_real(Rat(3, 2))}, x, ctx);
    }
    if (x < Real(1005) / 1000)
        throw precision_error("m closed form: |k| at the 3F2 series boundary 4");
    // continuation: (|k|/4) 3F2(...; x) = Re int_0^{|k|/4} 2F1(1/2,1/2;1;u^2) du,
    // the path dipping below the axis once past the branch point u = 1
    Real s = a / 4;
    PrecisionContext ictx = ctx.with_target(ctx.target_digits + ctx.guard_digits / 2);
    auto f = [&](const Cplx& u) -> Cplx {
        Cplx z = u * u;
        // Quadrature abscissas at the path's real endpoint land on the cut
        // u^2 >= 1 exactly; the path climbs to it from below the axis.
        if (z.im.is_zero() && z.re >= 1)
            return hyp2f1_on_cut(Rat(1, 2), Rat(1, 2), Rat(1), z.re,
                                 CutSide::below, ictx);
        return hyp2f1(Rat(1, 2), Rat(1, 2), Rat(1), z, ictx);
    };
    std::vector<Cplx> nodes = {Cplx(Real(0)), Cplx(Real(4) / 5),
                               Cplx(Real(4) / 5, -Real(2) / 5),
                               Cplx(s, -Real(2) / 5), Cplx(s)};
    Real tol = pow10(-(long)ctx.target_digits - 4);
    return integrate_path(f, nodes, tol, ctx.quad_max_levels).re;
}

Real n_closed_via_4f3(const Cplx& k, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Cplx kk = at_working(k);
    Real ak = abs(kk);
    if (ak == 0) throw domain_error("ntilde: k = 0");
    Cplx z = Real(27) / (kk * kk * kk);
    return log(ak) - re_primitive_continued(psi_spec(), z, ctx);
}

Real n_closed_via_3f2(const Real& k, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Real kk = at_working(k);
    if (kk == 0) throw domain_error("n 3F2 rewrite: k = 0");
    Real x = kk * kk * kk / 27;
    if (abs(x) > Real(995) / 1000)
        throw precision_error("n 3F2 rewrite: |k| at the series boundary 3");
    Real third = to_real(Rat(1, 3));
    Real two_thirds = to_real(Rat(2, 3));
    Real f1 = pfq({third, third, third}, {two_thirds, to_real(Rat(4, 3))}, x, ctx);
    Real f2 = pfq({two_thirds, two_thirds, two_thirds},
                  {to_real(Rat(4, 3)), to_real(Rat(5, 3))}, x, ctx);
    Real A = constant_A(ctx), B = constant_B(ctx);
    return to_real(sgn_weight_s(kk)) * (A * kk * f1 + B * kk * kk * f2);
}

Real family_closed(ClosedFamily fam, const Cplx& k, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Cplx kk = at_working(k);
    Real ak = abs(kk);
    if (ak == 0) throw domain_error("family_closed: k = 0");
    bool real_k = is_real_input(kk, ak, ctx);

    switch (fam) {
        case ClosedFamily::m:
            if (real_k && ak <= 4) return m_closed_via_3f2(kk.re, ctx);
            return m_closed_via_4f3(kk, ctx);

        case ClosedFamily::n: {
            Real az = Real(27) / (ak * ak * ak);
            if (az < 1) {
                // series domain |27/k^3| < 1: for real k (|k| > 3) this is
                // the measure; for complex k, the canonical continuation
                return n_closed_via_4f3(kk, ctx);
            }
            if (real_k && kk.re <= -1) {
                // measure = continuation on k <= -1 (numerically pinned;
                // the fiber polynomial does not vanish on the torus there)
                return n_closed_via_4f3(kk, ctx);
            }
            if (real_k)
                throw domain_error(
                    "family_closed(n): no closed form equals the measure for "
                    "real k in (-1,3); use family_direct or ntilde");
            throw domain_error(
                "family_closed(n): complex k requires |27/k^3| < 1");
        }

        case ClosedFamily::g: {
            if (real_k) {
                Real x = kk.re;
                Real tol = pow10(-(long)ctx.working() + 10);
                if (abs(x - 2) <= tol)
                    return n_closed_via_4f3(Cplx(cbrt2_times3()), ctx) / 3;
                if (abs(x + 4) <= tol)
                    return Real(4) * n_closed_via_4f3(Cplx(cbrt2_times3()), ctx) / 3;
                if (x > -4 && x < 2)
                    throw domain_error(
                        "family_closed(g): the closed form does not equal the "
                        "measure for real k in (-4,2); use family_direct");
            }
            Cplx km2 = kk - Cplx(Real(2));
            Cplx kp4 = kk + Cplx(Real(4));
            Cplx w = kp4 * pow_int(km2, 4) / (kk * kk);
            Cplx z1 = Real(27) * kk * kk / pow_int(kp4, 3);
            Cplx z2 = Real(27) * kk / pow_int(km2, 3);
            Real val = log(abs(w)) - re_primitive_continued(psi_spec(), z1, ctx) -
                       Real(4) * re_primitive_continued(psi_spec(), z2, ctx);
            return val / 3;
        }

        case ClosedFamily::ntilde:
            return n_closed_via_4f3(kk, ctx);
    }
    throw domain_error("family_closed: unknown family");
}

Real aux_m2_n2_ntilde(AuxKind which, const Cplx& k, const PrecisionContext& ctx) {
    ScopedPrecision sp(ctx.working());
    Cplx kk = at_working(k);
    if (which == AuxKind::ntilde) return n_closed_via_4f3(kk, ctx);

    // straight path from k to 1; the integrand 2F1(a,b;1;1-u)/u is singular
    // at u = 0 and on u in (-inf, 0] (branch cut of the 2F1 argument)
    const int samples = 128;
    Real guard = pow10(-6);
    for (int i = 0; i <= samples; ++i) {
        Real s = Real(i) / samples;
        Cplx u = kk + s * (Cplx(Real(1)) - kk);
        if (abs(u) < guard)
            throw domain_error("aux_m2_n2_ntilde: path passes through u = 0");
        if (abs(u.im) < guard && u.re < guard)
            throw domain_error(
                "aux_m2_n2_ntilde: path meets the branch cut (-inf, 0]");
    }
    Rat a = which == AuxKind::m2 ? Rat(1, 2) : Rat(1, 3);
    Rat b = which == AuxKind::m2 ? Rat(1, 2) : Rat(2, 3);
    PrecisionContext ictx = ctx.with_target(ctx.target_digits + ctx.guard_digits / 2);
    auto f = [&](const Cplx& u) -> Cplx {
        return hyp2f1(a, b, Rat(1), Cplx(Real(1)) - u, ictx) / u;
    };
    Real tol = pow10(-(long)ctx.target_digits - 4);
    return integrate_path(f, {kk, Cplx(Real(1))}, tol, ctx.quad_max_levels).im;
}

} // namespace latticelab
