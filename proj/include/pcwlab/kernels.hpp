#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Each kernel has a portable scalar reference and, on x86-64,
// an AVX2 variant; the variant is chosen once at startup from CPUID and can be forced
// with PCWLAB_KERNELS=scalar|avx2 or set_backend().
//
// Elementwise kernels (axpy, rank1, the grid objectives, argmax) produce bit-identical
// results on every backend. Reductions (dot, gemv, gemv_t) may differ in the last bits
// because the SIMD versions sum in a different order and use fused multiply-add.
namespace pcwlab::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y = W x + bias, W row-major rows x cols.
    void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 const double* bias, double* y);
    // out += W^T g.
    void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* g,
                       double* out);
    // W[i][j] += alpha * (u[i] * v[j]).
    void (*rank1_acc)(double* w, std::size_t rows, std::size_t cols, double alpha,
                      const double* u, const double* v);
    // y[i] += alpha * x[i].
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[k] = p(z_k) * (premium[k] - burn) with the analytic demand curve and
    // z_k = (premium[k] - top5) / spread.
    void (*true_objective)(const double* premium, std::size_t n, double top5, double spread,
                           double burn, double* out);
    // Same with a binned curve: table holds the 1201 bin values for bins -600..600.
    void (*fitted_objective)(const double* premium, std::size_t n, double top5, double spread,
                             double burn, const double* table, double* out);
    // Lowest index of the maximum. n must be positive.
    std::size_t (*argmax_first)(const double* v, std::size_t n);
};

const KernelTable& table_for(Backend backend);
bool backend_available(Backend backend) noexcept;
Backend active_backend() noexcept;
// Throws ValidationError if the backend is not available on this CPU.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend) noexcept;

const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline std::size_t argmax_first(std::span<const double> v) {
    return active().argmax_first(v.data(), v.size());
}

/// Scope guard that switches the backend and restores the previous one.
class ScopedBackend {
public:
    explicit ScopedBackend(Backend backend) : previous_(active_backend()) { set_backend(backend); }
    ~ScopedBackend() { set_backend(previous_); }
    ScopedBackend(const ScopedBackend&) = delete;
    ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
    Backend previous_;
};

namespace detail {
extern const KernelTable scalar_table;
#if defined(PCWLAB_BUILD_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace pcwlab::kernels
