#include <cmath>

#include "pcwlab/kernels.hpp"

namespace pcwlab::kernels::detail {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          const double* bias, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot(w + i * cols, x, cols) + bias[i];
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* g, double* out) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double gi = g[i];
        const double* row = w + i * cols;
        for (std::size_t j = 0; j < cols; ++j) out[j] += gi * row[j];
    }
}

void rank1_acc(double* w, std::size_t rows, std::size_t cols, double alpha, const double* u,
               const double* v) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double ui = u[i];
        double* row = w + i * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += alpha * (ui * v[j]);
    }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void true_objective(const double* premium, std::size_t n, double top5, double spread, double burn,
                    double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        const double z = (premium[k] - top5) / spread;
        double p;
        if (z < -8.0) {
            p = 0.2;
        } else if (z < 0.0) {
            const double t = z / 8.0 + 1.0;
            p = -0.2 * (t * t) + 0.2;
        } else {
            p = 0.0;
        }
        out[k] = p * (premium[k] - burn);
    }
}

void fitted_objective(const double* premium, std::size_t n, double top5, double spread,
                      double burn, const double* table, double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        const double z = (premium[k] - top5) / spread;
        double bin = std::nearbyint(z * 100.0);
        bin = bin < -600.0 ? -600.0 : bin;
        bin = bin > 600.0 ? 600.0 : bin;
        const double p = table[static_cast<int>(bin) + 600];
        out[k] = p * (premium[k] - burn);
    }
}

std::size_t argmax_first(const double* v, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
        if (v[k] > v[best]) best = k;
    }
    return best;
}

}  // namespace

const KernelTable scalar_table = {
    dot, gemv, gemv_t_acc, rank1_acc, axpy, true_objective, fitted_objective, argmax_first,
};

}  // namespace pcwlab::kernels::detail
