#pragma once

#include <vector>

#include "gss/tensor.hpp"

namespace gss {

// First/second moment state for one group of tensors updated together.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    uint64_t t = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    static AdamState for_params(const std::vector<Tensor*>& params, double lr);
};

// One Adam step over matching param/grad lists. Rejects non-finite gradients
// before touching any state, so a bad step leaves params and moments intact.
void adam_step(AdamState& st, const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads);

}  // namespace gss
