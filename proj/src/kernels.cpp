#include "fiberfold/kernels.hpp"

#include "kernels_impl.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

namespace fiberfold::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot3_scalar(const double* w, const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void vmul_scalar(const double* x, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void pos_neg_split_scalar(const double* x, double* up, double* un, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        up[i] = x[i] > 0.0 ? x[i] : 0.0;
        un[i] = x[i] < 0.0 ? -x[i] : 0.0;
    }
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi + s * yi;
        y[i] = -s * xi + c * yi;
    }
}

const Ops kScalarOps = {
    "scalar",     dot_scalar,     dot3_scalar,    axpy_scalar, scal_scalar,
    vmul_scalar,  nrm2sq_scalar,  max_abs_scalar, pos_neg_split_scalar,
    rot_scalar,
};

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_auto() {
#if defined(FIBERFOLD_HAVE_AVX2)
    if (avx2_supported()) return &avx2_ops();
#endif
#if defined(FIBERFOLD_HAVE_NEON)
    return &neon_ops();
#endif
    return &kScalarOps;
}

const Ops* pick_named(std::string_view name) {
    if (name == "scalar") return &kScalarOps;
    if (name == "auto") return pick_auto();
#if defined(FIBERFOLD_HAVE_AVX2)
    if (name == "avx2" && avx2_supported()) return &avx2_ops();
#endif
#if defined(FIBERFOLD_HAVE_NEON)
    if (name == "neon") return &neon_ops();
#endif
    return nullptr;
}

const Ops* init_active() {
    if (const char* env = std::getenv("FIBERFOLD_KERNELS")) {
        if (const Ops* o = pick_named(env)) return o;
    }
    return pick_auto();
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& ops() {
    const Ops* o = g_active.load(std::memory_order_acquire);
    if (!o) {
        // benign race: init_active is idempotent
        o = init_active();
        g_active.store(o, std::memory_order_release);
    }
    return *o;
}

std::vector<const Ops*> available_backends() {
    std::vector<const Ops*> v = {&kScalarOps};
#if defined(FIBERFOLD_HAVE_AVX2)
    if (avx2_supported()) v.push_back(&avx2_ops());
#endif
#if defined(FIBERFOLD_HAVE_NEON)
    v.push_back(&neon_ops());
#endif
    return v;
}

bool select_backend(std::string_view name) {
    const Ops* o = pick_named(name);
    if (!o) return false;
    g_active.store(o, std::memory_order_release);
    return true;
}

}  // namespace fiberfold::kernels
