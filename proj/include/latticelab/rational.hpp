// Exact coefficient fields for the formal q-series engine:
//   GaussianRational  — a + b*i with rational a, b (hosts complex-coefficient
//                       cusp forms like q + 2i q^3 - q^9 - ...)
//   QuadRational<D>   — a + b*sqrt(D) with rational a, b (hosts the sqrt(2)
//                       coefficients of the octic product used in one check)
#pragma once

#include "latticelab/precision.hpp"

#include <string>

namespace latticelab {

struct GaussianRational {
    Rat re{0}, im{0};

    GaussianRational() = default;
    GaussianRational(long n) : re(n) {}
    GaussianRational(const Rat& r) : re(r) {}
    GaussianRational(const Rat& r, const Rat& i) : re(r), im(i) {}
    static GaussianRational i_unit() { return GaussianRational(Rat(0), Rat(1)); }

    bool is_zero() const { return re == 0 && im == 0; }

    GaussianRational operator-() const { return {-re, -im}; }
    GaussianRational& operator+=(const GaussianRational& o) { re += o.re; im += o.im; return *this; }
    GaussianRational& operator-=(const GaussianRational& o) { re -= o.re; im -= o.im; return *this; }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rat r = re * o.re - im * o.im;
        Rat i = re * o.im + im * o.re;
        re = r; im = i;
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        Rat d = o.re * o.re + o.im * o.im;
        Rat r = (re * o.re + im * o.im) / d;
        Rat i = (im * o.re - re * o.im) / d;
        re = r; im = i;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { a += b; return a; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { a -= b; return a; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { a *= b; return a; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { a /= b; return a; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }

    std::string str() const {
        if (im == 0) return re.str();
        if (re == 0) return im.str() + "*i";
        return re.str() + (im > 0 ? "+" : "") + im.str() + "*i";
    }

    Cplx to_cplx() const { return Cplx(to_real(re), to_real(im)); }
};

// a + b*sqrt(D), D a positive non-square integer.
template <long D>
struct QuadRational {
    Rat a{0}, b{0};

    QuadRational() = default;
    QuadRational(long n) : a(n) {}
    QuadRational(const Rat& x) : a(x) {}
    QuadRational(const Rat& x, const Rat& y) : a(x), b(y) {}
    static QuadRational sqrt_unit() { return QuadRational(Rat(0), Rat(1)); }

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }

    QuadRational operator-() const { return {-a, -b}; }
    QuadRational& operator+=(const QuadRational& o) { a += o.a; b += o.b; return *this; }
    QuadRational& operator-=(const QuadRational& o) { a -= o.a; b -= o.b; return *this; }
    QuadRational& operator*=(const QuadRational& o) {
        Rat x = a * o.a + Rat(D) * b * o.b;
        Rat y = a * o.b + b * o.a;
        a = x; b = y;
        return *this;
    }
    QuadRational& operator/=(const QuadRational& o) {
        Rat n = o.a * o.a - Rat(D) * o.b * o.b;   // field norm, nonzero for nonzero o
        QuadRational conj{o.a / n, -o.b / n};
        return *this *= conj;
    }

    friend QuadRational operator+(QuadRational x, const QuadRational& y) { x += y; return x; }
    friend QuadRational operator-(QuadRational x, const QuadRational& y) { x -= y; return x; }
    friend QuadRational operator*(QuadRational x, const QuadRational& y) { x *= y; return x; }
    friend QuadRational operator/(QuadRational x, const QuadRational& y) { x /= y; return x; }
    friend bool operator==(const QuadRational& x, const QuadRational& y) {
        return x.a == y.a && x.b == y.b;
    }

    std::string str() const {
        if (b == 0) return a.str();
        return a.str() + (b > 0 ? "+" : "") + b.str() + "*sqrt(" + std::to_string(D) + ")";
    }
};

} // namespace latticelab
