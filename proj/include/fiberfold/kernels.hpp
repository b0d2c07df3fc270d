#pragma once

// Double-precision inner-loop kernels with runtime backend dispatch.
//
// Every operation has a scalar reference implementation; on x86-64 an AVX2+FMA
// variant and on aarch64 a NEON variant are compiled in and selected at startup
// when the CPU supports them. The environment variable FIBERFOLD_KERNELS
// ("scalar", "avx2", "neon", "auto") or select_backend() overrides the choice.

#include <cstddef>
#include <string_view>
#include <vector>

namespace fiberfold::kernels {

struct Ops {
    const char* name;

    // sum_i x[i]*y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i w[i]*x[i]*y[i]  (weighted quadrature pairing)
    double (*dot3)(const double* w, const double* x, const double* y, std::size_t n);
    // y[i] += a*x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x[i] *= a
    void (*scal)(double a, double* x, std::size_t n);
    // z[i] = x[i]*y[i]
    void (*vmul)(const double* x, const double* y, double* z, std::size_t n);
    // sum_i x[i]^2
    double (*nrm2sq)(const double* x, std::size_t n);
    // max_i |x[i]|
    double (*max_abs)(const double* x, std::size_t n);
    // up[i] = max(x[i],0), un[i] = max(-x[i],0)
    void (*pos_neg_split)(const double* x, double* up, double* un, std::size_t n);
    // plane rotation: x[i],y[i] <- c*x[i]+s*y[i], -s*x[i]+c*y[i]
    void (*rot)(double* x, double* y, double c, double s, std::size_t n);
};

const Ops& scalar_ops();

// Currently active backend (auto-selected on first use).
const Ops& ops();

// Backends compiled into this binary and usable on this CPU.
std::vector<const Ops*> available_backends();

// Force a backend by name; returns false if unknown or unsupported here.
bool select_backend(std::string_view name);

inline double dot(const double* x, const double* y, std::size_t n) { return ops().dot(x, y, n); }
inline double dot3(const double* w, const double* x, const double* y, std::size_t n) {
    return ops().dot3(w, x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) { ops().axpy(a, x, y, n); }
inline void scal(double a, double* x, std::size_t n) { ops().scal(a, x, n); }
inline void vmul(const double* x, const double* y, double* z, std::size_t n) { ops().vmul(x, y, z, n); }
inline double nrm2sq(const double* x, std::size_t n) { return ops().nrm2sq(x, n); }
inline double max_abs(const double* x, std::size_t n) { return ops().max_abs(x, n); }
inline void pos_neg_split(const double* x, double* up, double* un, std::size_t n) {
    ops().pos_neg_split(x, up, un, n);
}
inline void rot(double* x, double* y, double c, double s, std::size_t n) { ops().rot(x, y, c, s, n); }

}  // namespace fiberfold::kernels
