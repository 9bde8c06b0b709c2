// Double-exponential quadrature at variable precision.
//
// tanh_sinh: finite intervals, tolerant of endpoint singularities — the
//   integrand receives (x, x-a, b-x) with the endpoint distances computed
//   stably so 1/sqrt(u(1-u))-type factors keep full precision.
// exp_sinh_0inf: (0, infinity) for integrands with power-law behaviour at 0
//   and (super-)exponential decay at infinity (heat-kernel integrals).
// integrate_path: complex line integral along a polyline, segment by segment.
//
// Error control is the standard DE doubling heuristic |I_h - I_{h/2}|, with
// recursive bisection as a fallback when refinement stalls (interior kinks).
#pragma once

#include "latticelab/precision.hpp"

#include <functional>
#include <vector>

namespace latticelab {

namespace detail {

inline Real quad_abs(const Real& x) { return abs(x); }
inline Real quad_abs(const Cplx& z) { return abs(z); }

// Abscissa/weight for tanh-sinh at parameter t, with stable endpoint gaps:
//   xi = tanh(u), u = (pi/2) sinh t;  gap = 1 - |xi| = 2 e^{-2|u|}/(1+e^{-2|u|}).
struct TSNode {
    Real xi;    // in (-1,1), sign of t
    Real gap;   // 1 - |xi|, computed without cancellation
    Real w;     // (pi/2) cosh t / cosh^2 u
};

inline TSNode ts_node(const Real& t, const Real& half_pi) {
    TSNode n;
    Real u = half_pi * sinh(t);
    Real au = abs(u);
    Real em = exp(-2 * au);                  // in (0,1]
    n.gap = 2 * em / (1 + em);
    Real axi = 1 - n.gap;
    n.xi = u < 0 ? Real(-axi) : axi;
    Real ch = (1 + em) / (2 * exp(-au));     // cosh u, overflow-free form
    n.w = half_pi * cosh(t) / (ch * ch);
    return n;
}

} // namespace detail

// f(x, x-a, b-x) -> V. For smooth integrands the distances can be ignored.
template <class V>
using IntegrandEndpoints = std::function<V(const Real&, const Real&, const Real&)>;

// Core tanh-sinh integrator on [a,b]. Throws precision_error if the doubling
// heuristic cannot reach abs_tol within max_levels and the bisection budget.
template <class V>
V tanh_sinh(const IntegrandEndpoints<V>& f, const Real& a, const Real& b,
            const Real& abs_tol, int max_levels = 11, int* subdiv_budget = nullptr,
            int depth = 0, Real* err_out = nullptr) {
    static thread_local int default_budget;
    if (!subdiv_budget) {
        default_budget = 200;
        subdiv_budget = &default_budget;
    }
    const unsigned digits = Real::default_precision();
    const Real half_pi = const_pi() / 2;
    const Real c = (a + b) / 2, hlen = (b - a) / 2;
    // Node window: |xi| up to 1 - 10^{-(digits+6)} — beyond that the weight is
    // below the noise floor for integrable singularities.
    const Real tmax = asinh(Real(2) * (Real((long)digits) + 6) * log(Real(10)) / const_pi());

    auto eval_w = [&](const Real& t) -> V {
        auto n = detail::ts_node(t, half_pi);
        Real da = n.xi >= 0 ? Real(hlen * (1 + n.xi)) : Real(hlen * n.gap);
        Real db = n.xi >= 0 ? Real(hlen * n.gap) : Real(hlen * (1 - n.xi));
        Real x = n.xi >= 0 ? Real(b - db) : Real(a + da);
        V fx = f(x, da, db);
        return fx * V(n.w);
    };

    Real h = tmax / 8;
    long steps = 8;
    V sum = eval_w(Real(0));
    for (long k = 1; k <= steps; ++k) {
        sum += eval_w(k * h) + eval_w(-k * h);
    }
    V integral = sum * V(h * hlen);
    Real prev_err(0);
    bool have_prev = false;

    for (int level = 1; level <= max_levels; ++level) {
        h /= 2;
        steps *= 2;
        V odd_sum{};
        bool first = true;
        for (long k = 1; k <= steps; k += 2) {
            V term = eval_w(k * h) + eval_w(-k * h);
            if (first) { odd_sum = term; first = false; }
            else odd_sum += term;
        }
        sum += odd_sum;
        V refined = sum * V(h * hlen);
        Real err = detail::quad_abs(refined - integral);
        integral = refined;
        if (err <= abs_tol) {
            if (err_out) *err_out = err;
            return integral;
        }
        if (have_prev && level >= 4 && err > prev_err / 2 && err > abs_tol) {
            break; // refinement stalled (kink?) — fall through to bisection
        }
        prev_err = err;
        have_prev = true;
    }

    // Bisection fallback.
    if (*subdiv_budget <= 0 || depth > 40)
        throw precision_error("tanh_sinh: tolerance not met within subdivision budget");
    --*subdiv_budget;
    Real mid = c;
    Real err_l(0), err_r(0);
    V left = tanh_sinh<V>(f, a, mid, abs_tol / 2, max_levels, subdiv_budget, depth + 1, &err_l);
    V right = tanh_sinh<V>(f, mid, b, abs_tol / 2, max_levels, subdiv_budget, depth + 1, &err_r);
    if (err_out) *err_out = err_l + err_r;
    return left + right;
}

inline Real tanh_sinh_real(const std::function<Real(const Real&)>& f, const Real& a,
                           const Real& b, const Real& abs_tol, int max_levels = 11) {
    IntegrandEndpoints<Real> g = [&](const Real& x, const Real&, const Real&) { return f(x); };
    return tanh_sinh<Real>(g, a, b, abs_tol, max_levels);
}

inline Real tanh_sinh_real_ep(const IntegrandEndpoints<Real>& f, const Real& a,
                              const Real& b, const Real& abs_tol, int max_levels = 11) {
    return tanh_sinh<Real>(f, a, b, abs_tol, max_levels);
}

// exp-sinh on (0, infinity): x = exp((pi/2) sinh t). The integrand must decay
// fast enough at infinity to be summable against the doubly-exponential node
// spread (heat kernels do) and should cheaply return 0 beyond its support.
inline Real exp_sinh_0inf(const std::function<Real(const Real&)>& f, const Real& abs_tol,
                          int max_levels = 11) {
    const unsigned digits = Real::default_precision();
    const Real half_pi = const_pi() / 2;
    // Node window covers x in [10^-(digits+6), 10^(digits+6)].
    const Real lnspan = (Real((long)digits) + 6) * log(Real(10));
    const Real tmax = asinh(lnspan / half_pi);

    auto eval = [&](const Real& t) -> Real {
        Real u = half_pi * sinh(t);
        Real x = exp(u);
        Real w = x * half_pi * cosh(t);
        return f(x) * w;
    };

    Real h = tmax / 8;
    long steps = 8;
    Real sum = eval(Real(0));
    for (long k = 1; k <= steps; ++k) sum += eval(k * h) + eval(-k * h);
    Real integral = sum * h;

    for (int level = 1; level <= max_levels; ++level) {
        h /= 2;
        steps *= 2;
        Real odd(0);
        for (long k = 1; k <= steps; k += 2) odd += eval(k * h) + eval(-k * h);
        sum += odd;
        Real refined = sum * h;
        Real err = abs(refined - integral);
        integral = refined;
        if (err <= abs_tol) return integral;
    }
    throw precision_error("exp_sinh_0inf: tolerance not met");
}

// Complex line integral along the polyline nodes[0] -> nodes[1] -> ...
// Each segment is parameterized linearly and integrated by tanh-sinh.
// Additive under concatenation, antisymmetric under reversal (up to tol).
// err_out (optional) receives the accumulated quadrature error estimate.
inline Cplx integrate_path(const std::function<Cplx(const Cplx&)>& f,
                           const std::vector<Cplx>& nodes, const Real& abs_tol,
                           int max_levels = 11, Real* err_out = nullptr) {
    if (nodes.size() < 2) throw domain_error("integrate_path: need at least two nodes");
    Cplx total(0);
    Real total_err(0);
    Real seg_tol = abs_tol / Real((long)nodes.size() - 1);
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        const Cplx& z0 = nodes[i];
        Cplx dz = nodes[i + 1] - nodes[i];
        IntegrandEndpoints<Cplx> g = [&](const Real& s, const Real&, const Real&) {
            return f(z0 + Cplx(s) * dz);
        };
        Real seg_err(0);
        Cplx seg = tanh_sinh<Cplx>(g, Real(0), Real(1), seg_tol, max_levels, nullptr, 0,
                                   &seg_err);
        total += seg * dz;
        total_err += seg_err * abs(dz);
    }
    if (err_out) *err_out = total_err;
    return total;
}

} // namespace latticelab
