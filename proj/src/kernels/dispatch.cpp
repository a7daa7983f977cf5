#include <atomic>
#include <cstdlib>
#include <string>

#include "pcwlab/error.hpp"
#include "pcwlab/kernels.hpp"

namespace pcwlab::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(PCWLAB_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() noexcept {
    const bool avx2 = cpu_has_avx2();
    if (const char* env = std::getenv("PCWLAB_KERNELS")) {
        const std::string choice(env);
        if (choice == "scalar") return Backend::scalar;
        if (choice == "avx2" && avx2) return Backend::avx2;
    }
    return avx2 ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

bool backend_available(Backend backend) noexcept {
    return backend == Backend::scalar || cpu_has_avx2();
}

const KernelTable& table_for(Backend backend) {
#if defined(PCWLAB_BUILD_AVX2)
    if (backend == Backend::avx2) return detail::avx2_table;
#endif
    (void)backend;
    return detail::scalar_table;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
    if (!backend_available(backend)) {
        throw ValidationError(std::string("kernel backend unavailable: ") +
                              std::string(backend_name(backend)));
    }
    current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) noexcept {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& active() noexcept {
#if defined(PCWLAB_BUILD_AVX2)
    if (active_backend() == Backend::avx2) return detail::avx2_table;
#endif
    return detail::scalar_table;
}

}  // namespace pcwlab::kernels
