#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "fiberfold/kernels.hpp"

#include <random>
#include <vector>

using namespace fiberfold;

namespace {

std::vector<double> random_buf(std::size_t n, unsigned seed, double amp = 3.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("every compiled backend matches the scalar reference") {
    const auto backends = kernels::available_backends();
    REQUIRE(!backends.empty());
    CHECK(std::string(backends.front()->name) == "scalar");

    const std::vector<std::size_t> sizes = {0, 1, 2, 3, 5, 7, 8, 16, 33, 255, 1024};
    const auto& ref = kernels::scalar_ops();

    for (const kernels::Ops* ops : backends) {
        CAPTURE(ops->name);
        for (std::size_t n : sizes) {
            CAPTURE(n);
            auto x = random_buf(n, 11 + static_cast<unsigned>(n));
            auto y = random_buf(n, 23 + static_cast<unsigned>(n));
            auto w = random_buf(n, 37 + static_cast<unsigned>(n), 1.0);
            const double tol = 1e-12 * (1.0 + static_cast<double>(n));

            CHECK(ops->dot(x.data(), y.data(), n) ==
                  doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(tol));
            CHECK(ops->dot3(w.data(), x.data(), y.data(), n) ==
                  doctest::Approx(ref.dot3(w.data(), x.data(), y.data(), n)).epsilon(tol));
            CHECK(ops->nrm2sq(x.data(), n) ==
                  doctest::Approx(ref.nrm2sq(x.data(), n)).epsilon(tol));
            CHECK(ops->max_abs(x.data(), n) == ref.max_abs(x.data(), n));

            auto y1 = y;
            auto y2 = y;
            ops->axpy(1.7, x.data(), y1.data(), n);
            ref.axpy(1.7, x.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(tol));

            auto z1 = x;
            auto z2 = x;
            ops->scal(-0.37, z1.data(), n);
            ref.scal(-0.37, z2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(z1[i] == z2[i]);

            std::vector<double> m1(n);
            std::vector<double> m2(n);
            ops->vmul(x.data(), y.data(), m1.data(), n);
            ref.vmul(x.data(), y.data(), m2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(m1[i] == m2[i]);

            std::vector<double> up1(n), un1(n), up2(n), un2(n);
            ops->pos_neg_split(x.data(), up1.data(), un1.data(), n);
            ref.pos_neg_split(x.data(), up2.data(), un2.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(up1[i] == up2[i]);
                CHECK(un1[i] == un2[i]);
            }

            auto rx1 = x;
            auto ry1 = y;
            auto rx2 = x;
            auto ry2 = y;
            ops->rot(rx1.data(), ry1.data(), 0.8, 0.6, n);
            ref.rot(rx2.data(), ry2.data(), 0.8, 0.6, n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(rx1[i] == doctest::Approx(rx2[i]).epsilon(tol));
                CHECK(ry1[i] == doctest::Approx(ry2[i]).epsilon(tol));
            }
        }
    }
}

TEST_CASE("positive/negative split reconstructs the input") {
    auto x = random_buf(257, 99);
    std::vector<double> up(x.size()), un(x.size());
    kernels::pos_neg_split(x.data(), up.data(), un.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(up[i] >= 0.0);
        CHECK(un[i] >= 0.0);
        CHECK(up[i] - un[i] == x[i]);
        CHECK(up[i] * un[i] == 0.0);
    }
}

TEST_CASE("backend selection honors explicit names") {
    CHECK(kernels::select_backend("scalar"));
    CHECK(std::string(kernels::ops().name) == "scalar");
    CHECK_FALSE(kernels::select_backend("not-a-backend"));
    CHECK(kernels::select_backend("auto"));
}
