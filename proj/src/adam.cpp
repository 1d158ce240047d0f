#include "gss/adam.hpp"

#include <cmath>

#include "gss/error.hpp"
#include "gss/kernels.hpp"

namespace gss {

AdamState AdamState::for_params(const std::vector<Tensor*>& params, double lr) {
    AdamState st;
    st.lr = lr;
    st.m.reserve(params.size());
    st.v.reserve(params.size());
    for (const Tensor* p : params) {
        st.m.emplace_back(p->size(), 0.0);
        st.v.emplace_back(p->size(), 0.0);
    }
    return st;
}

void adam_step(AdamState& st, const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size() || params.size() != st.m.size())
        throw dim_error("adam_step: param/grad/state count mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        if (params[i]->size() != grads[i]->size() || params[i]->size() != st.m[i].size())
            throw dim_error("adam_step: tensor size mismatch at index " + std::to_string(i));
        for (double g : grads[i]->v)
            if (!std::isfinite(g)) throw numeric_error("adam_step: non-finite gradient");
    }
    st.t += 1;
    double b1c = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    double b2c = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    const auto& K = kernels::ops();
    for (size_t i = 0; i < params.size(); ++i) {
        K.adam_update(params[i]->v.data(), grads[i]->v.data(), st.m[i].data(), st.v[i].data(),
                      params[i]->size(), st.lr, st.beta1, st.beta2, st.eps, b1c, b2c);
    }
}

}  // namespace gss
