// AVX2+FMA variants of the kernel table. Compiled with -mavx2 -mfma; only
// reached after the runtime CPU check in kernels.cpp.

#include "gss/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace gss::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s2 = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
}

double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_avx2(const double* w, const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) y[r] = dot_avx2(w + r * cols, x, cols);
}

void matvec_t_avx2(const double* w, const double* u, double* g, size_t rows, size_t cols) {
    std::fill(g, g + cols, 0.0);
    for (size_t r = 0; r < rows; ++r) axpy_avx2(u[r], w + r * cols, g, cols);
}

void ger_acc_avx2(double* a, const double* u, const double* x, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) axpy_avx2(u[r], x, a + r * cols, cols);
}

void lrelu_avx2(const double* x, double* y, double slope, size_t n) {
    const __m256d vs = _mm256_set1_pd(slope);
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d neg = _mm256_mul_pd(vx, vs);
        __m256d gt = _mm256_cmp_pd(vx, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(y + i, _mm256_blendv_pd(neg, vx, gt));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void lrelu_grad_avx2(const double* x, const double* up, double* out, double slope, size_t n) {
    const __m256d vs = _mm256_set1_pd(slope);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d gt = _mm256_cmp_pd(vx, zero, _CMP_GT_OQ);
        __m256d d = _mm256_blendv_pd(vs, one, gt);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(up + i), d));
    }
    for (; i < n; ++i) out[i] = up[i] * (x[i] > 0.0 ? 1.0 : slope);
}

inline __m256d mask_to_pd(const uint8_t* mask, size_t i) {
    int packed;
    std::memcpy(&packed, mask + i, 4);
    __m128i m32 = _mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed));
    return _mm256_cvtepi32_pd(m32);
}

double masked_l1_avx2(const double* a, const double* b, const uint8_t* mask, size_t n) {
    const __m256d signbit = _mm256_set1_pd(-0.0);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d ad = _mm256_andnot_pd(signbit, diff);
        __m256d keep = _mm256_cmp_pd(mask_to_pd(mask, i), zero, _CMP_NEQ_OQ);
        acc = _mm256_add_pd(acc, _mm256_and_pd(ad, keep));
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        if (mask[i]) s += std::fabs(a[i] - b[i]);
    return s;
}

void masked_l1_grad_acc_avx2(const double* a, const double* b, const uint8_t* mask,
                             double weight, double* g, size_t n) {
    const __m256d vw = _mm256_set1_pd(weight);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d pos = _mm256_and_pd(_mm256_cmp_pd(diff, zero, _CMP_GT_OQ), one);
        __m256d neg = _mm256_and_pd(_mm256_cmp_pd(diff, zero, _CMP_LT_OQ), one);
        __m256d sgn = _mm256_sub_pd(pos, neg);
        __m256d keep = _mm256_cmp_pd(mask_to_pd(mask, i), zero, _CMP_NEQ_OQ);
        __m256d vg = _mm256_loadu_pd(g + i);
        vg = _mm256_add_pd(vg, _mm256_and_pd(_mm256_mul_pd(vw, sgn), keep));
        _mm256_storeu_pd(g + i, vg);
    }
    for (; i < n; ++i) {
        if (!mask[i]) continue;
        const double d = a[i] - b[i];
        if (d > 0.0)
            g[i] += weight;
        else if (d < 0.0)
            g[i] -= weight;
    }
}

void adam_update_avx2(double* p, const double* g, double* m, double* v, size_t n,
                      double lr, double b1, double b2, double eps, double b1c, double b2c) {
    const __m256d vb1 = _mm256_set1_pd(b1);
    const __m256d vb2 = _mm256_set1_pd(b2);
    const __m256d v1b1 = _mm256_set1_pd(1.0 - b1);
    const __m256d v1b2 = _mm256_set1_pd(1.0 - b2);
    const __m256d vb1c = _mm256_set1_pd(b1c);
    const __m256d vb2c = _mm256_set1_pd(b2c);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)),
                                   _mm256_mul_pd(v1b1, vg));
        __m256d vv = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(v1b2, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        __m256d mhat = _mm256_div_pd(vm, vb1c);
        __m256d vhat = _mm256_div_pd(vv, vb2c);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        p[i] -= lr * (m[i] / b1c) / (std::sqrt(v[i] / b2c) + eps);
    }
}

void clip_avx2(double* x, double lo, double hi, size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(x + i, _mm256_min_pd(vhi, _mm256_max_pd(vlo, vx)));
    }
    for (; i < n; ++i) x[i] = std::min(hi, std::max(lo, x[i]));
}

}  // namespace

namespace detail {
const Ops* avx2_table() {
    static const Ops table = {
        "avx2",
        dot_avx2,
        axpy_avx2,
        matvec_avx2,
        matvec_t_avx2,
        ger_acc_avx2,
        lrelu_avx2,
        lrelu_grad_avx2,
        masked_l1_avx2,
        masked_l1_grad_acc_avx2,
        adam_update_avx2,
        clip_avx2,
    };
    return &table;
}
}  // namespace detail

}  // namespace gss::kernels

#else

namespace gss::kernels::detail {
const Ops* avx2_table() { return nullptr; }
}  // namespace gss::kernels::detail

#endif
