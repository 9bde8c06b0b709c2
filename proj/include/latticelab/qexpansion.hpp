// Exact truncated Puiseux/q-series arithmetic.
//
// A QExpansion stores coefficients of q^{k/denom} for integer keys k < order
// (order is in the same 1/denom units). All coefficients are exact elements
// of a field K (rationals, Gaussian rationals, or a real quadratic field);
// no floating point enters the formal engine. Binary operations rescale both
// operands to the least common denominator and carry the tightest truncation
// order that the inputs support.
#pragma once

#include "latticelab/rational.hpp"

#include <algorithm>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latticelab {

struct series_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class K = GaussianRational>
struct QExpansion {
    long denom = 1;
    long order = 0;               // keys are valid iff k < order
    std::map<long, K> coeffs;     // key k  ->  coefficient of q^{k/denom}

    QExpansion() = default;
    QExpansion(long d, long o) : denom(d), order(o) {}

    static QExpansion one(long d, long o) {
        QExpansion s(d, o);
        if (o > 0) s.coeffs[0] = K(1);
        return s;
    }
    static QExpansion monomial(const K& c, long key, long d, long o) {
        QExpansion s(d, o);
        if (!c.is_zero() && key < o) s.coeffs[key] = c;
        return s;
    }

    bool empty() const { return coeffs.empty(); }
    long leading() const {
        if (empty()) throw series_error("leading(): series has no terms before its truncation order");
        return coeffs.begin()->first;
    }
    K get(long key) const {
        auto it = coeffs.find(key);
        return it == coeffs.end() ? K(0) : it->second;
    }
    void set(long key, const K& v) {
        if (key >= order) return;
        if (v.is_zero()) coeffs.erase(key);
        else coeffs[key] = v;
    }
    void prune() {
        for (auto it = coeffs.begin(); it != coeffs.end();) {
            if (it->second.is_zero() || it->first >= order) it = coeffs.erase(it);
            else ++it;
        }
    }

    // Rescale so that this->denom becomes exactly nd (a multiple of denom).
    QExpansion rescaled(long nd) const {
        if (nd == denom) return *this;
        if (nd % denom != 0) throw series_error("rescaled: new denominator not a multiple");
        long m = nd / denom;
        QExpansion s(nd, order * m);
        for (auto& [k, v] : coeffs) s.coeffs[k * m] = v;
        return s;
    }
};

namespace qx_detail {

inline long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

// Dense view of the unit-normalized tail, used by the O(n^2) kernels.
template <class K>
struct Dense {
    long lead;                  // key offset of slot 0
    std::vector<K> c;           // c[i] = coeff of key lead+i, length = span
};

template <class K>
Dense<K> to_dense(const QExpansion<K>& s, long lead, long span) {
    Dense<K> d{lead, std::vector<K>(span >= 0 ? (size_t)span : 0, K(0))};
    for (auto& [k, v] : s.coeffs) {
        long i = k - lead;
        if (i >= 0 && i < span) d.c[(size_t)i] = v;
    }
    return d;
}

} // namespace qx_detail

template <class K>
std::pair<QExpansion<K>, QExpansion<K>> aligned(const QExpansion<K>& a, const QExpansion<K>& b) {
    long d = qx_detail::lcm_long(a.denom, b.denom);
    return {a.rescaled(d), b.rescaled(d)};
}

template <class K>
QExpansion<K> operator+(const QExpansion<K>& x, const QExpansion<K>& y) {
    auto [a, b] = aligned(x, y);
    QExpansion<K> r(a.denom, std::min(a.order, b.order));
    r.coeffs = a.coeffs;
    for (auto& [k, v] : b.coeffs) {
        auto it = r.coeffs.find(k);
        if (it == r.coeffs.end()) r.coeffs[k] = v;
        else it->second += v;
    }
    r.prune();
    return r;
}

template <class K>
QExpansion<K> operator-(const QExpansion<K>& x, const QExpansion<K>& y) {
    auto [a, b] = aligned(x, y);
    QExpansion<K> r(a.denom, std::min(a.order, b.order));
    r.coeffs = a.coeffs;
    for (auto& [k, v] : b.coeffs) {
        auto it = r.coeffs.find(k);
        if (it == r.coeffs.end()) r.coeffs[k] = -v;
        else it->second -= v;
    }
    r.prune();
    return r;
}

template <class K>
QExpansion<K> scalar_mul(const K& c, const QExpansion<K>& x) {
    QExpansion<K> r(x.denom, x.order);
    if (c.is_zero()) return r;
    for (auto& [k, v] : x.coeffs) r.coeffs[k] = c * v;
    r.prune();
    return r;
}

// Truncation bookkeeping for products: a product is trustworthy up to
// min(order_a + lead_b, order_b + lead_a) — each factor's unknown tail gets
// shifted by the other factor's leading exponent.
template <class K>
QExpansion<K> operator*(const QExpansion<K>& x, const QExpansion<K>& y) {
    auto [a, b] = aligned(x, y);
    long la = a.empty() ? a.order : a.leading();
    long lb = b.empty() ? b.order : b.leading();
    QExpansion<K> r(a.denom, std::min(a.order + lb, b.order + la));
    if (a.empty() || b.empty()) return r;

    // sparse x sparse is the common case; fall back to dense when both are fat
    size_t na = a.coeffs.size(), nb = b.coeffs.size();
    if (na * nb <= 400000) {
        for (auto& [ka, va] : a.coeffs) {
            if (ka + lb >= r.order) break;
            for (auto& [kb, vb] : b.coeffs) {
                long k = ka + kb;
                if (k >= r.order) break;
                auto it = r.coeffs.find(k);
                if (it == r.coeffs.end()) r.coeffs[k] = va * vb;
                else it->second += va * vb;
            }
        }
    } else {
        long span = r.order - la - lb;
        auto da = qx_detail::to_dense(a, la, std::min<long>(span, a.order - la));
        auto db = qx_detail::to_dense(b, lb, std::min<long>(span, b.order - lb));
        std::vector<K> out((size_t)span, K(0));
        for (size_t i = 0; i < da.c.size(); ++i) {
            if (da.c[i].is_zero()) continue;
            size_t jmax = std::min(db.c.size(), (size_t)span - i);
            for (size_t j = 0; j < jmax; ++j) {
                if (db.c[j].is_zero()) continue;
                out[i + j] += da.c[i] * db.c[j];
            }
        }
        for (long i = 0; i < span; ++i)
            if (!out[(size_t)i].is_zero()) r.coeffs[la + lb + i] = out[(size_t)i];
    }
    r.prune();
    return r;
}

// Power-series division: factor the leading monomial of the divisor and invert
// its unit part by the standard coefficient recurrence.
template <class K>
QExpansion<K> operator/(const QExpansion<K>& x, const QExpansion<K>& y) {
    auto [a, b] = aligned(x, y);
    if (b.empty()) throw series_error("division by series with zero leading coefficient");
    long lb = b.leading();
    const K& b0 = b.coeffs.begin()->second;
    if (a.empty()) return QExpansion<K>(a.denom, a.order - lb);

    long la = a.leading();
    long span = std::min(a.order - la, b.order - lb);
    if (span <= 0) return QExpansion<K>(a.denom, la - lb);

    auto da = qx_detail::to_dense(a, la, span);
    auto db = qx_detail::to_dense(b, lb, span);
    std::vector<K> xq((size_t)span, K(0));
    for (long i = 0; i < span; ++i) {
        K acc = da.c[(size_t)i];
        for (long j = 1; j <= i; ++j) {
            if (db.c[(size_t)j].is_zero() || xq[(size_t)(i - j)].is_zero()) continue;
            acc -= db.c[(size_t)j] * xq[(size_t)(i - j)];
        }
        xq[(size_t)i] = acc / b0;
    }
    QExpansion<K> r(a.denom, la - lb + span);
    for (long i = 0; i < span; ++i)
        if (!xq[(size_t)i].is_zero()) r.coeffs[la - lb + i] = xq[(size_t)i];
    return r;
}

template <class K>
QExpansion<K> pow(const QExpansion<K>& x, long n) {
    if (n < 0) {
        QExpansion<K> inv = QExpansion<K>::one(x.denom, x.order) / x;
        return pow(inv, -n);
    }
    if (n == 0) {
        long l = x.empty() ? 0 : x.leading();
        return QExpansion<K>::one(x.denom, x.order - l);
    }
    QExpansion<K> acc = x, result;
    bool have = false;
    long k = n;
    while (k) {
        if (k & 1) {
            result = have ? result * acc : acc;
            have = true;
        }
        k >>= 1;
        if (k) acc = acc * acc;
    }
    return result;
}

// q -> q^p (p a positive integer): exponents scale, the denominator stays.
template <class K>
QExpansion<K> substitute_q_power(const QExpansion<K>& x, long p) {
    if (p <= 0) throw series_error("substitute_q_power: power must be positive");
    QExpansion<K> r(x.denom, x.order * p);
    for (auto& [k, v] : x.coeffs) r.coeffs[k * p] = v;
    return r;
}

// ---------------------------------------------------------------------------
// Named series constructors
// ---------------------------------------------------------------------------

// e_j = sum_{n in Z} (-1)^n q^{j(6n+1)^2/24}, truncated at key `order_keys`
// in units of 1/denom with denom = 24/gcd(j,24).
template <class K = GaussianRational>
QExpansion<K> eta_series(long j, long order_keys) {
    if (j < 1) throw series_error("eta_series: level must be positive");
    long g = std::gcd(j, 24L);
    long denom = 24 / g;
    QExpansion<K> s(denom, order_keys);
    bool any = false;
    for (long n = 0;; ++n) {
        // n and -(n+1) give exponents j(6n+1)^2/24 and j(6n+5)^2/24
        long k1 = (j / g) * (6 * n + 1) * (6 * n + 1);
        long k2 = (j / g) * (6 * n + 5) * (6 * n + 5);
        bool wrote = false;
        K sgn = (n % 2 == 0) ? K(1) : K(-1);
        if (k1 < order_keys) { s.coeffs[k1] = sgn; wrote = any = true; }
        // index -(n+1) has parity of n+1
        if (k2 < order_keys) { s.coeffs[k2] = -sgn; wrote = any = true; }
        if (!wrote) break;
    }
    if (!any) throw series_error("eta_series: truncation order holds no term (empty series)");
    return s;
}

enum class ThetaSeriesKind {
    phi,                 // 1 + 2 sum q^{n^2}
    psi,                 // sum_{n>=0} q^{n(n+1)/2}
    f_minus,             // prod(1-q^n) = sum (-1)^n q^{n(3n-1)/2}
    e_cubed,             // e_j^3 = sum_{n>=0} (-1)^n (2n+1) q^{j(2n+1)^2/8}
    e1sq_over_e2,        // sum (-1)^n q^{n^2}
    e1e4_over_e2,        // sum_{n>=0} (-1)^{n(n+1)/2} q^{(2n+1)^2/8}
    e1sq_e4sq_over_e2,   // sum_{n in Z} (3n+1) q^{(3n+1)^2/3}
    weight32_cm,         // sum_{n in Z, k>=0} (-1)^{n+k}(2k+1) q^{(15(2k+1)^2+(6n+1)^2)/8}
};

template <class K = GaussianRational>
QExpansion<K> theta_series(ThetaSeriesKind kind, long order_keys, long j = 1) {
    using S = QExpansion<K>;
    switch (kind) {
    case ThetaSeriesKind::phi: {
        S s(1, order_keys);
        s.coeffs[0] = K(1);
        for (long n = 1; n * n < order_keys; ++n) s.coeffs[n * n] = K(2);
        return s;
    }
    case ThetaSeriesKind::psi: {
        S s(1, order_keys);
        for (long n = 0; n * (n + 1) / 2 < order_keys; ++n) s.coeffs[n * (n + 1) / 2] = K(1);
        return s;
    }
    case ThetaSeriesKind::f_minus: {
        S s(1, order_keys);
        s.coeffs[0] = K(1);
        for (long n = 1;; ++n) {
            long k1 = n * (3 * n - 1) / 2, k2 = n * (3 * n + 1) / 2;
            bool wrote = false;
            K sgn = (n % 2 == 0) ? K(1) : K(-1);
            if (k1 < order_keys) { s.coeffs[k1] = sgn; wrote = true; }
            if (k2 < order_keys) { s.coeffs[k2] = sgn; wrote = true; }
            if (!wrote) break;
        }
        return s;
    }
    case ThetaSeriesKind::e_cubed: {
        long g = std::gcd(j, 8L);
        S s(8 / g, order_keys);
        for (long n = 0;; ++n) {
            long key = (j / g) * (2 * n + 1) * (2 * n + 1);
            if (key >= order_keys) break;
            s.coeffs[key] = (n % 2 == 0) ? K(2 * n + 1) : K(-(2 * n + 1));
        }
        if (s.empty()) throw series_error("theta_series: truncation order holds no term");
        return s;
    }
    case ThetaSeriesKind::e1sq_over_e2: {
        S s(1, order_keys);
        s.coeffs[0] = K(1);
        for (long n = 1; n * n < order_keys; ++n) s.coeffs[n * n] = (n % 2 == 0) ? K(2) : K(-2);
        return s;
    }
    case ThetaSeriesKind::e1e4_over_e2: {
        S s(8, order_keys);
        for (long n = 0; (2 * n + 1) * (2 * n + 1) < order_keys; ++n) {
            // sign (-1)^{n(n+1)/2} has period four in n: +,-,-,+
            long m = n % 4;
            s.coeffs[(2 * n + 1) * (2 * n + 1)] = (m == 0 || m == 3) ? K(1) : K(-1);
        }
        return s;
    }
    case ThetaSeriesKind::e1sq_e4sq_over_e2: {
        S s(3, order_keys);
        for (long n = 0;; ++n) {
            // n and -(n+1): coefficients 3n+1 and -(3n+2)
            long k1 = (3 * n + 1) * (3 * n + 1), k2 = (3 * n + 2) * (3 * n + 2);
            bool wrote = false;
            if (k1 < order_keys) { s.coeffs[k1] = K(3 * n + 1); wrote = true; }
            if (k2 < order_keys) { s.coeffs[k2] = K(-(3 * n + 2)); wrote = true; }
            if (!wrote) break;
        }
        return s;
    }
    case ThetaSeriesKind::weight32_cm: {
        S s(1, order_keys);   // exponents (15(2k+1)^2 + (6n+1)^2)/8 are integers
        for (long k = 0;; ++k) {
            long base = 15 * (2 * k + 1) * (2 * k + 1);
            if ((base + 1) / 8 >= order_keys) break;   // smallest exponent for this k
            bool any_n = false;
            for (long half = 0;; ++half) {
                // n and -(n+1) give (6n+1)^2 and (6n+5)^2
                long e1 = base + (6 * half + 1) * (6 * half + 1);
                long e2 = base + (6 * half + 5) * (6 * half + 5);
                bool wrote = false;
                long sgn_n = (half % 2 == 0) ? 1 : -1;
                long w = (k % 2 == 0) ? (2 * k + 1) : -(2 * k + 1);
                if (e1 % 8 == 0 && e1 / 8 < order_keys) {
                    long key = e1 / 8;
                    s.set(key, s.get(key) + K(sgn_n * w));
                    wrote = true;
                }
                if (e2 % 8 == 0 && e2 / 8 < order_keys) {
                    long key = e2 / 8;
                    s.set(key, s.get(key) + K(-sgn_n * w));
                    wrote = true;
                }
                if (!wrote) break;
                any_n = true;
            }
            if (!any_n) break;
        }
        s.prune();
        return s;
    }
    }
    throw series_error("theta_series: unknown kind");
}

// Convenience: e_j valid through q^{qpow} (i.e. `qpow` whole q-powers past the
// leading exponent j/24).
template <class K = GaussianRational>
QExpansion<K> eta_q(long j, long qpow) {
    long g = std::gcd(j, 24L);
    long denom = 24 / g;
    return eta_series<K>(j, j / g + qpow * denom);
}

// q -> -q for series with integer exponents only.
template <class K>
QExpansion<K> negate_q(const QExpansion<K>& x) {
    if (x.denom != 1) throw series_error("negate_q: series must have integer exponents");
    QExpansion<K> r(1, x.order);
    for (auto& [k, v] : x.coeffs) r.coeffs[k] = (k % 2 == 0) ? v : -v;
    return r;
}

// ---------------------------------------------------------------------------
// Eta quotients
// ---------------------------------------------------------------------------

struct EtaQuotient {
    std::vector<std::pair<long, long>> factors;   // (level j, exponent), canonical

    EtaQuotient() = default;
    EtaQuotient(std::initializer_list<std::pair<long, long>> fs) {
        for (auto& [j, e] : fs) add(j, e);
    }

    void add(long level, long exponent) {
        if (level < 1) throw series_error("EtaQuotient: levels must be positive");
        for (auto& [j, e] : factors)
            if (j == level) {
                e += exponent;
                canonicalize();
                return;
            }
        factors.push_back({level, exponent});
        canonicalize();
    }

    void canonicalize() {
        std::sort(factors.begin(), factors.end());
        factors.erase(std::remove_if(factors.begin(), factors.end(),
                                     [](auto& f) { return f.second == 0; }),
                      factors.end());
    }

    // Leading exponent sum(j*e)/24 as an exact rational.
    Rat leading_exponent() const {
        long s = 0;
        for (auto& [j, e] : factors) s += j * e;
        return Rat(s, 24);
    }

    // Expand to a series trustworthy through at least q^{qpow} past its
    // leading exponent (a small safety margin is built in).
    template <class K = GaussianRational>
    QExpansion<K> series(long qpow) const {
        if (factors.empty()) return QExpansion<K>::one(1, qpow + 1);
        long build = qpow + 4;
        QExpansion<K> num, den;
        bool have_num = false, have_den = false;
        for (auto& [j, e] : factors) {
            if (e == 0) continue;
            QExpansion<K> p = pow(eta_q<K>(j, build), std::labs(e));
            if (e > 0) { num = have_num ? num * p : p; have_num = true; }
            else       { den = have_den ? den * p : p; have_den = true; }
        }
        if (!have_num) num = QExpansion<K>::one(1, (qpow + 4));
        return have_den ? num / den : num;
    }
};

// ---------------------------------------------------------------------------
// Comparison and coefficient extraction
// ---------------------------------------------------------------------------

template <class K>
struct SeriesCompare {
    bool equal;
    std::optional<Rat> first_mismatch;   // exponent (in q powers) of the first differing term
};

// Coefficient-by-coefficient comparison through q^{order_qpow} (exclusive).
template <class K>
SeriesCompare<K> check_series_identity(const QExpansion<K>& x, const QExpansion<K>& y,
                                       long order_qpow) {
    auto [a, b] = aligned(x, y);
    long kcap = order_qpow * a.denom;
    if (a.order < kcap || b.order < kcap)
        throw series_error("check_series_identity: requested order exceeds a truncation");
    auto ia = a.coeffs.begin(), ib = b.coeffs.begin();
    while (ia != a.coeffs.end() || ib != b.coeffs.end()) {
        long ka = ia != a.coeffs.end() ? ia->first : kcap;
        long kb = ib != b.coeffs.end() ? ib->first : kcap;
        long k = std::min(ka, kb);
        if (k >= kcap) break;
        K ca = ka == k ? ia->second : K(0);
        K cb = kb == k ? ib->second : K(0);
        if (!(ca == cb)) return {false, Rat(k, a.denom)};
        if (ka == k) ++ia;
        if (kb == k) ++ib;
    }
    return {true, std::nullopt};
}

template <class K>
struct CoefficientList {
    long n_max;
    std::vector<K> a;   // a[i] = coefficient of q^i, 0 <= i <= n_max
};

// Dirichlet-ready integer-indexed coefficients. With normalize_leading, the
// series is first multiplied by a monomial making the leading term q^1.
template <class K>
CoefficientList<K> coefficients(const QExpansion<K>& s, bool normalize_leading) {
    long shift = 0;
    if (normalize_leading && !s.empty()) shift = s.denom - s.leading();
    CoefficientList<K> out;
    long kcap = s.order + shift;
    out.n_max = kcap / s.denom - ((kcap % s.denom == 0) ? 1 : 0);
    if (out.n_max < 0) out.n_max = 0;
    out.a.assign((size_t)out.n_max + 1, K(0));
    for (auto& [k, v] : s.coeffs) {
        long ks = k + shift;
        if (ks % s.denom != 0)
            throw series_error("coefficients: non-integer exponent after normalization");
        long n = ks / s.denom;
        if (n <= out.n_max) out.a[(size_t)n] = v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// series_arith dispatcher (spec-shaped single entry point)
// ---------------------------------------------------------------------------

enum class SeriesOp { add, sub, mul, div, pow, substitute_q_power, scalar_mul };

template <class K>
QExpansion<K> series_arith(SeriesOp op, const QExpansion<K>& lhs, const QExpansion<K>& rhs) {
    switch (op) {
    case SeriesOp::add: return lhs + rhs;
    case SeriesOp::sub: return lhs - rhs;
    case SeriesOp::mul: return lhs * rhs;
    case SeriesOp::div: return lhs / rhs;
    default: throw series_error("series_arith: operation needs an integer/scalar operand");
    }
}

template <class K>
QExpansion<K> series_arith(SeriesOp op, const QExpansion<K>& lhs, long n) {
    switch (op) {
    case SeriesOp::pow: return pow(lhs, n);
    case SeriesOp::substitute_q_power: return substitute_q_power(lhs, n);
    default: throw series_error("series_arith: operation needs a series operand");
    }
}

template <class K>
QExpansion<K> series_arith(SeriesOp op, const QExpansion<K>& lhs, const K& c) {
    if (op != SeriesOp::scalar_mul) throw series_error("series_arith: bad scalar operation");
    return scalar_mul(c, lhs);
}

// ---------------------------------------------------------------------------
// JSON serialization (golden-file format) for the Gaussian-rational engine:
// {denom, order, coeffs: [[k, num, den, inum, iden], ...]}
// ---------------------------------------------------------------------------

inline std::string qexpansion_to_json(const QExpansion<GaussianRational>& s) {
    std::string out = "{\"denom\":" + std::to_string(s.denom) +
                      ",\"order\":" + std::to_string(s.order) + ",\"coeffs\":[";
    bool first = true;
    for (auto& [k, v] : s.coeffs) {
        if (!first) out += ',';
        first = false;
        out += '[' + std::to_string(k) + ',' +
               boost::multiprecision::numerator(v.re).str() + ',' +
               boost::multiprecision::denominator(v.re).str() + ',' +
               boost::multiprecision::numerator(v.im).str() + ',' +
               boost::multiprecision::denominator(v.im).str() + ']';
    }
    out += "]}";
    return out;
}

} // namespace latticelab
