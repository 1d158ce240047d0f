#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/rng.hpp"
#include "gss/tensor.hpp"

namespace gss {

enum class Act : uint32_t { tanh_ = 0, sigmoid = 1, lrelu = 2 };

// One entry in a net description: a dense layer (out x in weight + bias)
// followed optionally by an activation. `act_slope` only matters for lrelu.
struct LayerSpec {
    size_t in = 0;
    size_t out = 0;
    bool has_act = false;
    Act act = Act::tanh_;
    double act_slope = 0.2;
};

struct DenseLayer {
    Tensor w;  // [out, in], row-major
    Tensor b;  // [out]
};

struct Net {
    std::vector<LayerSpec> specs;
    std::vector<DenseLayer> layers;

    size_t in_dim() const { return specs.empty() ? 0 : specs.front().in; }
    size_t out_dim() const { return specs.empty() ? 0 : specs.back().out; }
    size_t param_count() const;

    // Flattened parameter access in declaration order (per layer: w then b).
    std::vector<Tensor*> params();
    std::vector<const Tensor*> params() const;
};

// Weights ~ U(-sqrt(1/fan_in), sqrt(1/fan_in)), biases zero.
Net build_net(const std::vector<LayerSpec>& specs, Rng& rng);

// Per-layer values retained by forward for the backward pass.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;   // input to each dense layer
    std::vector<std::vector<double>> pre_act;  // dense output before activation
    std::vector<double> out;                   // final output
};

const std::vector<double>& net_forward(const Net& net, const std::vector<double>& x,
                                       ForwardTrace& trace);

struct BackwardResult {
    std::vector<Tensor> param_grads;  // same order as Net::params(); empty if skipped
    std::vector<double> input_grad;
};

// Vector-Jacobian product: grad_out is dL/d(out). Set want_param_grads=false
// to propagate to the input only (used when updating z through a frozen net).
BackwardResult net_backward(const Net& net, const ForwardTrace& trace,
                            const std::vector<double>& grad_out, bool want_param_grads = true);

struct GradCheckReport {
    double max_rel_err = 0.0;
    size_t checked = 0;
    bool pass = false;
};

// Central finite differences over every parameter (step 1e-5 by default),
// comparing against net_backward. loss = 0.5*|y - target|^2.
GradCheckReport grad_check(Net& net, const std::vector<double>& x,
                           const std::vector<double>& target, double step = 1e-5,
                           double tol = 1e-4);

}  // namespace gss
