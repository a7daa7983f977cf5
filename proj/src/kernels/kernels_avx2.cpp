// Compiled with -mavx2 -mfma; only reached after CPUID confirms both.
#if defined(PCWLAB_BUILD_AVX2)

#include <immintrin.h>

#include <cmath>

#include "pcwlab/kernels.hpp"

namespace pcwlab::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          const double* bias, double* y) {
    std::size_t i = 0;
    // Four rows at a time share each load of x.
    for (; i + 4 <= rows; i += 4) {
        const double* r0 = w + i * cols;
        const double* r1 = r0 + cols;
        const double* r2 = r1 + cols;
        const double* r3 = r2 + cols;
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd();
        __m256d a3 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) {
            const __m256d xv = _mm256_loadu_pd(x + j);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + j), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + j), xv, a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + j), xv, a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + j), xv, a3);
        }
        double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
        for (; j < cols; ++j) {
            s0 += r0[j] * x[j];
            s1 += r1[j] * x[j];
            s2 += r2[j] * x[j];
            s3 += r3[j] * x[j];
        }
        y[i] = s0 + bias[i];
        y[i + 1] = s1 + bias[i + 1];
        y[i + 2] = s2 + bias[i + 2];
        y[i + 3] = s3 + bias[i + 3];
    }
    for (; i < rows; ++i) y[i] = dot(w + i * cols, x, cols) + bias[i];
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* g, double* out) {
    std::size_t j = 0;
    // Column blocks of 16 held in registers across all rows.
    for (; j + 16 <= cols; j += 16) {
        __m256d o0 = _mm256_loadu_pd(out + j);
        __m256d o1 = _mm256_loadu_pd(out + j + 4);
        __m256d o2 = _mm256_loadu_pd(out + j + 8);
        __m256d o3 = _mm256_loadu_pd(out + j + 12);
        for (std::size_t i = 0; i < rows; ++i) {
            const __m256d gi = _mm256_set1_pd(g[i]);
            const double* row = w + i * cols + j;
            o0 = _mm256_fmadd_pd(gi, _mm256_loadu_pd(row), o0);
            o1 = _mm256_fmadd_pd(gi, _mm256_loadu_pd(row + 4), o1);
            o2 = _mm256_fmadd_pd(gi, _mm256_loadu_pd(row + 8), o2);
            o3 = _mm256_fmadd_pd(gi, _mm256_loadu_pd(row + 12), o3);
        }
        _mm256_storeu_pd(out + j, o0);
        _mm256_storeu_pd(out + j + 4, o1);
        _mm256_storeu_pd(out + j + 8, o2);
        _mm256_storeu_pd(out + j + 12, o3);
    }
    for (; j + 4 <= cols; j += 4) {
        __m256d o = _mm256_loadu_pd(out + j);
        for (std::size_t i = 0; i < rows; ++i) {
            o = _mm256_fmadd_pd(_mm256_set1_pd(g[i]), _mm256_loadu_pd(w + i * cols + j), o);
        }
        _mm256_storeu_pd(out + j, o);
    }
    for (; j < cols; ++j) {
        double o = out[j];
        for (std::size_t i = 0; i < rows; ++i) o += g[i] * w[i * cols + j];
        out[j] = o;
    }
}

// Multiply and add are issued separately so the result matches the scalar kernel bit for bit.
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d p0 = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
        const __m256d p1 = _mm256_mul_pd(a, _mm256_loadu_pd(x + i + 4));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p0));
        _mm256_storeu_pd(y + i + 4, _mm256_add_pd(_mm256_loadu_pd(y + i + 4), p1));
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void rank1_acc(double* w, std::size_t rows, std::size_t cols, double alpha, const double* u,
               const double* v) {
    const __m256d a = _mm256_set1_pd(alpha);
    for (std::size_t i = 0; i < rows; ++i) {
        const double ui = u[i];
        const __m256d uv = _mm256_set1_pd(ui);
        double* row = w + i * cols;
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) {
            const __m256d g = _mm256_mul_pd(uv, _mm256_loadu_pd(v + j));
            _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j), _mm256_mul_pd(a, g)));
        }
        for (; j < cols; ++j) row[j] += alpha * (ui * v[j]);
    }
}

void true_objective(const double* premium, std::size_t n, double top5, double spread, double burn,
                    double* out) {
    const __m256d t5 = _mm256_set1_pd(top5);
    const __m256d sp = _mm256_set1_pd(spread);
    const __m256d b = _mm256_set1_pd(burn);
    const __m256d eight = _mm256_set1_pd(8.0);
    const __m256d minus_eight = _mm256_set1_pd(-8.0);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d cap = _mm256_set1_pd(0.2);
    const __m256d neg_cap = _mm256_set1_pd(-0.2);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d p = _mm256_loadu_pd(premium + k);
        const __m256d z = _mm256_div_pd(_mm256_sub_pd(p, t5), sp);
        const __m256d t = _mm256_add_pd(_mm256_div_pd(z, eight), one);
        const __m256d quad = _mm256_add_pd(_mm256_mul_pd(neg_cap, _mm256_mul_pd(t, t)), cap);
        const __m256d below = _mm256_cmp_pd(z, minus_eight, _CMP_LT_OQ);
        const __m256d negative = _mm256_cmp_pd(z, zero, _CMP_LT_OQ);
        __m256d prob = _mm256_blendv_pd(zero, quad, negative);
        prob = _mm256_blendv_pd(prob, cap, below);
        _mm256_storeu_pd(out + k, _mm256_mul_pd(prob, _mm256_sub_pd(p, b)));
    }
    if (k < n) table_for(Backend::scalar).true_objective(premium + k, n - k, top5, spread, burn, out + k);
}

void fitted_objective(const double* premium, std::size_t n, double top5, double spread,
                      double burn, const double* table, double* out) {
    const __m256d t5 = _mm256_set1_pd(top5);
    const __m256d sp = _mm256_set1_pd(spread);
    const __m256d b = _mm256_set1_pd(burn);
    const __m256d hundred = _mm256_set1_pd(100.0);
    const __m256d lo = _mm256_set1_pd(-600.0);
    const __m256d hi = _mm256_set1_pd(600.0);
    const __m128i offset = _mm_set1_epi32(600);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d p = _mm256_loadu_pd(premium + k);
        const __m256d z = _mm256_div_pd(_mm256_sub_pd(p, t5), sp);
        __m256d bin = _mm256_round_pd(_mm256_mul_pd(z, hundred),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        bin = _mm256_min_pd(_mm256_max_pd(bin, lo), hi);
        const __m128i idx = _mm_add_epi32(_mm256_cvtpd_epi32(bin), offset);
        const __m256d prob = _mm256_i32gather_pd(table, idx, 8);
        _mm256_storeu_pd(out + k, _mm256_mul_pd(prob, _mm256_sub_pd(p, b)));
    }
    if (k < n) {
        table_for(Backend::scalar).fitted_objective(premium + k, n - k, top5, spread, burn, table, out + k);
    }
}

std::size_t argmax_first(const double* v, std::size_t n) {
    if (n < 8) return table_for(Backend::scalar).argmax_first(v, n);
    __m256d m = _mm256_loadu_pd(v);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(v + i));
    const __m128d h = _mm_max_pd(_mm256_castpd256_pd128(m), _mm256_extractf128_pd(m, 1));
    double best = std::fmax(_mm_cvtsd_f64(h), _mm_cvtsd_f64(_mm_unpackhi_pd(h, h)));
    for (; i < n; ++i) best = v[i] > best ? v[i] : best;
    const __m256d target = _mm256_set1_pd(best);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(v + k), target, _CMP_EQ_OQ));
        if (mask != 0) return k + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
    }
    for (; k < n; ++k) {
        if (v[k] == best) return k;
    }
    return 0;
}

}  // namespace

const KernelTable avx2_table = {
    dot, gemv, gemv_t_acc, rank1_acc, axpy, true_objective, fitted_objective, argmax_first,
};

}  // namespace pcwlab::kernels::detail

#endif
