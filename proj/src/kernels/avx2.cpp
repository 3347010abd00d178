// Compiled with -mavx2. Only reached through the dispatch table after a CPU check.

#include "pathlab/kernels/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace pathlab::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// m = number of increments; vector body covers i < m rounded down to 4.
double sum_sq_increments(const double* x, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i < m; ++i) {
        const double d = x[i + 1] - x[i];
        s += d * d;
    }
    return s;
}

double sum_left(const double* x, std::size_t n) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < m; ++i) s += x[i];
    return s;
}

double sum_well_sq(const double* x, std::size_t n, double beta_sq) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    const __m256d b2 = _mm256_set1_pd(beta_sq);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d w = _mm256_sub_pd(_mm256_mul_pd(v, v), b2);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(w, w));
    }
    double s = hsum(acc);
    for (; i < m; ++i) {
        const double w = x[i] * x[i] - beta_sq;
        s += w * w;
    }
    return s;
}

double sum_shifted_sq_increments(const double* x, std::size_t n, double coef, double beta_sq) {
    if (n < 2) return 0.0;
    const std::size_t m = n - 1;
    const __m256d b2 = _mm256_set1_pd(beta_sq);
    const __m256d c = _mm256_set1_pd(coef);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d inc = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), v);
        const __m256d w = _mm256_sub_pd(_mm256_mul_pd(v, v), b2);
        const __m256d d = _mm256_add_pd(inc, _mm256_mul_pd(c, w));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i < m; ++i) {
        const double d = (x[i + 1] - x[i]) + coef * (x[i] * x[i] - beta_sq);
        s += d * d;
    }
    return s;
}

ItoSums ito_sums(const double* x, std::size_t n) {
    ItoSums r;
    if (n < 2) return r;
    const std::size_t m = n - 1;
    __m256d a1 = _mm256_setzero_pd(), a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    __m256d as = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), v);
        const __m256d t1 = _mm256_mul_pd(_mm256_mul_pd(v, v), d);
        const __m256d t2 = _mm256_mul_pd(_mm256_mul_pd(v, d), d);
        const __m256d t3 = _mm256_mul_pd(_mm256_mul_pd(d, d), d);
        a1 = _mm256_add_pd(a1, t1);
        a2 = _mm256_add_pd(a2, t2);
        a3 = _mm256_add_pd(a3, t3);
        as = _mm256_add_pd(as, _mm256_add_pd(_mm256_add_pd(vabs(t1), vabs(t2)), vabs(t3)));
    }
    r.x2_dx = hsum(a1);
    r.x_dx2 = hsum(a2);
    r.dx3 = hsum(a3);
    r.abs_scale = hsum(as);
    for (; i < m; ++i) {
        const double d = x[i + 1] - x[i];
        const double t1 = x[i] * x[i] * d;
        const double t2 = x[i] * d * d;
        const double t3 = d * d * d;
        r.x2_dx += t1;
        r.x_dx2 += t2;
        r.dx3 += t3;
        r.abs_scale += std::abs(t1) + std::abs(t2) + std::abs(t3);
    }
    return r;
}

static_assert(kLanes == 4, "one __m256d per step");

void inverse_map_lanes(const double* dchi, std::size_t steps, const double* x0, double coef,
                       double beta_sq, double* out) {
    const __m256d b2 = _mm256_set1_pd(beta_sq);
    const __m256d c = _mm256_set1_pd(coef);
    __m256d x = _mm256_loadu_pd(x0);
    _mm256_storeu_pd(out, x);
    for (std::size_t s = 0; s < steps; ++s) {
        const __m256d d = _mm256_loadu_pd(dchi + s * kLanes);
        const __m256d w = _mm256_sub_pd(_mm256_mul_pd(x, x), b2);
        x = _mm256_sub_pd(_mm256_add_pd(x, d), _mm256_mul_pd(c, w));
        _mm256_storeu_pd(out + (s + 1) * kLanes, x);
    }
}

constexpr KernelTable kAvx2{
    Isa::Avx2,           &sum_sq_increments, &sum_left,         &sum_well_sq,
    &sum_shifted_sq_increments, &ito_sums,   &inverse_map_lanes,
};

}  // namespace

const KernelTable& detail::avx2_table() noexcept { return kAvx2; }

}  // namespace pathlab::kernels
