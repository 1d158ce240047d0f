#pragma once

#include <cstddef>
#include <cstdint>

namespace gss::kernels {

// Data-parallel inner loops used by the differentiable core, the latent
// search, and the classifier. Every entry has a scalar reference
// implementation and may have SIMD variants; the active table is chosen at
// runtime from CPU features (or forced via select_backend / the
// GSS_KERNEL_BACKEND environment variable). SIMD variants are equivalence-
// tested against the scalar reference.
struct Ops {
    const char* name;

    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, size_t n);
    // y = W x, W row-major (rows x cols)
    void (*matvec)(const double* w, const double* x, double* y, size_t rows, size_t cols);
    // g = W^T u, W row-major (rows x cols), u length rows, g length cols
    void (*matvec_t)(const double* w, const double* u, double* g, size_t rows, size_t cols);
    // A += u x^T, A row-major (rows x cols)
    void (*ger_acc)(double* a, const double* u, const double* x, size_t rows, size_t cols);
    // y[i] = x[i] > 0 ? x[i] : slope*x[i]
    void (*lrelu)(const double* x, double* y, double slope, size_t n);
    // out[i] = up[i] * (x[i] > 0 ? 1 : slope)
    void (*lrelu_grad)(const double* x, const double* up, double* out, double slope, size_t n);
    // sum_i mask[i] ? |a[i]-b[i]| : 0   (mask entries are 0/1 bytes)
    double (*masked_l1)(const double* a, const double* b, const uint8_t* mask, size_t n);
    // g[i] += weight * mask[i] * sign(a[i]-b[i]), sign(0) = 0
    void (*masked_l1_grad_acc)(const double* a, const double* b, const uint8_t* mask,
                               double weight, double* g, size_t n);
    // One Adam update over a parameter block. b1c = 1-b1^t, b2c = 1-b2^t.
    void (*adam_update)(double* p, const double* g, double* m, double* v, size_t n,
                        double lr, double b1, double b2, double eps, double b1c, double b2c);
    // x[i] = min(hi, max(lo, x[i]))
    void (*clip)(double* x, double lo, double hi, size_t n);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unavailable (non-x86 build or no CPU support)

// Active table. Defaults to the best supported backend; GSS_KERNEL_BACKEND
// (values: scalar, avx2) overrides at first use.
const Ops& ops();
void select_backend(Backend b);  // throws gss::Error when unsupported
Backend active_backend();

}  // namespace gss::kernels
