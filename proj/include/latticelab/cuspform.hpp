// Fast int64 coefficient engines for Dirichlet partial sums.
//
// The exact Gaussian-rational engine (qexpansion.hpp) is the reference; these
// dense int64 arrays exist only to push coefficient counts to ~10^5..10^6 for
// the slowly convergent sum a_n/n^s sanity comparisons. Coefficients of the
// eta products handled here are tiny, so int64 never overflows; unit tests
// pin the arrays against the exact engine on a prefix.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace latticelab {

// Coefficients c[0..N] of prod_{j in levels} prod_{n>=1} (1 - q^{jn}).
inline std::vector<std::int64_t> eta_product_int64(const std::vector<long>& levels, long N) {
    std::vector<std::int64_t> cur((size_t)N + 1, 0);
    cur[0] = 1;
    for (long j : levels) {
        std::vector<std::int64_t> next((size_t)N + 1, 0);
        // pentagonal expansion of prod (1-q^{jn})
        std::vector<std::pair<long, int>> pent{{0, 1}};
        for (long m = 1;; ++m) {
            long e1 = j * m * (3 * m - 1) / 2, e2 = j * m * (3 * m + 1) / 2;
            if (e1 > N && e2 > N) break;
            int s = (m % 2 == 0) ? 1 : -1;
            if (e1 <= N) pent.push_back({e1, s});
            if (e2 <= N) pent.push_back({e2, s});
        }
        for (auto [e, s] : pent) {
            if (s > 0)
                for (long i = 0; i + e <= N; ++i) next[(size_t)(i + e)] += cur[(size_t)i];
            else
                for (long i = 0; i + e <= N; ++i) next[(size_t)(i + e)] -= cur[(size_t)i];
        }
        cur.swap(next);
    }
    return cur;
}

// In-place multiplication by 1/prod_{n>=1}(1 - q^{jn})  (geometric back-substitution).
inline void divide_by_eta_int64(std::vector<std::int64_t>& c, long j) {
    long N = (long)c.size() - 1;
    for (long n = 1; j * n <= N; ++n) {
        long e = j * n;
        for (long i = e; i <= N; ++i) c[(size_t)i] += c[(size_t)(i - e)];
    }
}

// Weight-3 form: coefficients of  e3^3 e5^3 + e1^3 e15^3  through q^N.
// Both pieces expand by the cube identity prod(1-q^n)^3 = sum (-1)^m (2m+1) q^{m(m+1)/2}.
inline std::vector<std::int64_t> weight3_cm15_int64(long N) {
    std::vector<std::int64_t> a((size_t)N + 1, 0);
    auto add_piece = [&](long j1, long j2) {
        for (long m = 0;; ++m) {
            long t1 = j1 * (2 * m + 1) * (2 * m + 1);
            if ((t1 + j2) / 8 > N) break;
            for (long k = 0;; ++k) {
                long e = t1 + j2 * (2 * k + 1) * (2 * k + 1);
                if (e / 8 > N) break;   // e is always divisible by 8 here
                std::int64_t c = (std::int64_t)(2 * m + 1) * (2 * k + 1);
                if ((m + k) % 2) c = -c;
                a[(size_t)(e / 8)] += c;
            }
        }
    };
    add_piece(3, 5);
    add_piece(1, 15);
    return a;
}

} // namespace latticelab
