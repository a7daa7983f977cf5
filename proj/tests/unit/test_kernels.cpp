#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "pcwlab/conversion.hpp"
#include "pcwlab/error.hpp"
#include "pcwlab/kernels.hpp"

using namespace pcwlab;
using kernels::Backend;

namespace {

std::vector<double> randoms(std::size_t n, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = d(gen);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out = {Backend::scalar};
    if (kernels::backend_available(Backend::avx2)) out.push_back(Backend::avx2);
    return out;
}

const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 601};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels agree with naive loops") {
    const auto& k = kernels::table_for(Backend::scalar);
    std::mt19937_64 gen(1);
    const auto a = randoms(37, gen), b = randoms(37, gen);
    double s = 0.0;
    for (std::size_t i = 0; i < 37; ++i) s += a[i] * b[i];
    CHECK(k.dot(a.data(), b.data(), 37) == s);

    const std::size_t rows = 5, cols = 7;
    const auto w = randoms(rows * cols, gen), x = randoms(cols, gen), bias = randoms(rows, gen);
    std::vector<double> y(rows);
    k.gemv(w.data(), rows, cols, x.data(), bias.data(), y.data());
    for (std::size_t i = 0; i < rows; ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < cols; ++j) e += w[i * cols + j] * x[j];
        CHECK(y[i] == doctest::Approx(e + bias[i]).epsilon(1e-14));
    }
    std::vector<double> out(cols, 1.0);
    const auto g = randoms(rows, gen);
    k.gemv_t_acc(w.data(), rows, cols, g.data(), out.data());
    for (std::size_t j = 0; j < cols; ++j) {
        double e = 1.0;
        for (std::size_t i = 0; i < rows; ++i) e += w[i * cols + j] * g[i];
        CHECK(out[j] == doctest::Approx(e).epsilon(1e-14));
    }
    const std::vector<double> v = {1.0, 3.0, 3.0, -2.0};
    CHECK(k.argmax_first(v.data(), v.size()) == 1);
}

TEST_CASE("elementwise kernels are bit-identical across backends") {
    std::mt19937_64 gen(2);
    for (Backend backend : available_backends()) {
        const auto& k = kernels::table_for(backend);
        const auto& ref = kernels::table_for(Backend::scalar);
        for (std::size_t n : kSizes) {
            CAPTURE(n);
            const auto x = randoms(n, gen);
            auto y1 = randoms(n, gen);
            auto y2 = y1;
            ref.axpy(0.37, x.data(), y1.data(), n);
            k.axpy(0.37, x.data(), y2.data(), n);
            CHECK(bitwise_equal(y1, y2));

            const std::size_t rows = 3;
            const auto u = randoms(rows, gen);
            auto w1 = randoms(rows * n, gen);
            auto w2 = w1;
            ref.rank1_acc(w1.data(), rows, n, -0.013, u.data(), x.data());
            k.rank1_acc(w2.data(), rows, n, -0.013, u.data(), x.data());
            CHECK(bitwise_equal(w1, w2));

            const auto premium = randoms(n, gen, 200.0, 900.0);
            std::vector<double> o1(n), o2(n);
            ref.true_objective(premium.data(), n, 500.0, 120.0, 350.0, o1.data());
            k.true_objective(premium.data(), n, 500.0, 120.0, 350.0, o2.data());
            CHECK(bitwise_equal(o1, o2));

            std::vector<double> table(1201);
            for (std::size_t i = 0; i < table.size(); ++i) table[i] = 0.3 - 0.00025 * static_cast<double>(i);
            ref.fitted_objective(premium.data(), n, 500.0, 40.0, 350.0, table.data(), o1.data());
            k.fitted_objective(premium.data(), n, 500.0, 40.0, 350.0, table.data(), o2.data());
            CHECK(bitwise_equal(o1, o2));

            auto v = randoms(n, gen);
            if (n > 3) v[n - 1] = v[1] = 5.0;  // ties resolve to the lowest index
            CHECK(ref.argmax_first(v.data(), n) == k.argmax_first(v.data(), n));
        }
    }
}

TEST_CASE("reduction kernels agree across backends within rounding") {
    std::mt19937_64 gen(3);
    for (Backend backend : available_backends()) {
        const auto& k = kernels::table_for(backend);
        const auto& ref = kernels::table_for(Backend::scalar);
        for (std::size_t n : kSizes) {
            CAPTURE(n);
            const auto a = randoms(n, gen), b = randoms(n, gen);
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
            CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * scale + 1e-300);

            for (std::size_t rows : {1, 5, 64}) {
                const auto w = randoms(rows * n, gen), x = randoms(n, gen), bias = randoms(rows, gen);
                std::vector<double> y1(rows), y2(rows);
                ref.gemv(w.data(), rows, n, x.data(), bias.data(), y1.data());
                k.gemv(w.data(), rows, n, x.data(), bias.data(), y2.data());
                for (std::size_t i = 0; i < rows; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-12).scale(1.0));
                const auto g = randoms(rows, gen);
                std::vector<double> t1(n, 0.5), t2(n, 0.5);
                ref.gemv_t_acc(w.data(), rows, n, g.data(), t1.data());
                k.gemv_t_acc(w.data(), rows, n, g.data(), t2.data());
                for (std::size_t j = 0; j < n; ++j) CHECK(t2[j] == doctest::Approx(t1[j]).epsilon(1e-12).scale(1.0));
            }
        }
    }
}

TEST_CASE("grid objectives evaluate the demand curves") {
    const auto& k = kernels::table_for(Backend::scalar);
    std::mt19937_64 gen(4);
    const auto premium = randoms(500, gen, 100.0, 1000.0);
    std::vector<double> out(premium.size());
    k.true_objective(premium.data(), premium.size(), 500.0, 60.0, 300.0, out.data());
    for (std::size_t i = 0; i < premium.size(); ++i) {
        const double expected = fixtures::demand((premium[i] - 500.0) / 60.0) * (premium[i] - 300.0);
        CHECK(out[i] == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }

    std::vector<double> table(1201);
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = 0.2 * std::exp(-0.004 * static_cast<double>(i));
    const FittedConversionModel model(table);
    k.fitted_objective(premium.data(), premium.size(), 500.0, 60.0, 300.0, table.data(), out.data());
    for (std::size_t i = 0; i < premium.size(); ++i) {
        CHECK(out[i] == model((premium[i] - 500.0) / 60.0) * (premium[i] - 300.0));
    }
}

TEST_CASE("backend selection is switchable and scoped") {
    const Backend before = kernels::active_backend();
    {
        kernels::ScopedBackend guard(Backend::scalar);
        CHECK(kernels::active_backend() == Backend::scalar);
        CHECK(&kernels::active() == &kernels::table_for(Backend::scalar));
    }
    CHECK(kernels::active_backend() == before);
    CHECK(kernels::backend_name(Backend::scalar) == "scalar");
    CHECK(kernels::backend_name(Backend::avx2) == "avx2");
    if (!kernels::backend_available(Backend::avx2)) {
        CHECK_THROWS_AS(kernels::set_backend(Backend::avx2), ValidationError);
    }
}

}
