#include "gss/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gss::kernels {
namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_scalar(const double* w, const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) y[r] = dot_scalar(w + r * cols, x, cols);
}

void matvec_t_scalar(const double* w, const double* u, double* g, size_t rows, size_t cols) {
    std::fill(g, g + cols, 0.0);
    for (size_t r = 0; r < rows; ++r) axpy_scalar(u[r], w + r * cols, g, cols);
}

void ger_acc_scalar(double* a, const double* u, const double* x, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) axpy_scalar(u[r], x, a + r * cols, cols);
}

void lrelu_scalar(const double* x, double* y, double slope, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void lrelu_grad_scalar(const double* x, const double* up, double* out, double slope, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = up[i] * (x[i] > 0.0 ? 1.0 : slope);
}

double masked_l1_scalar(const double* a, const double* b, const uint8_t* mask, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i)
        if (mask[i]) s += std::fabs(a[i] - b[i]);
    return s;
}

void masked_l1_grad_acc_scalar(const double* a, const double* b, const uint8_t* mask,
                               double weight, double* g, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        const double d = a[i] - b[i];
        if (d > 0.0)
            g[i] += weight;
        else if (d < 0.0)
            g[i] -= weight;
    }
}

void adam_update_scalar(double* p, const double* g, double* m, double* v, size_t n,
                        double lr, double b1, double b2, double eps, double b1c, double b2c) {
    for (size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / b1c;
        const double vhat = v[i] / b2c;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void clip_scalar(double* x, double lo, double hi, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] = std::min(hi, std::max(lo, x[i]));
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops table = {
        "scalar",
        dot_scalar,
        axpy_scalar,
        matvec_scalar,
        matvec_t_scalar,
        ger_acc_scalar,
        lrelu_scalar,
        lrelu_grad_scalar,
        masked_l1_scalar,
        masked_l1_grad_acc_scalar,
        adam_update_scalar,
        clip_scalar,
    };
    return table;
}

}  // namespace gss::kernels
