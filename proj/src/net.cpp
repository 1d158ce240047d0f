#include "gss/net.hpp"

#include <cmath>

#include "gss/error.hpp"
#include "gss/kernels.hpp"

namespace gss {

size_t Net::param_count() const {
    size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

std::vector<Tensor*> Net::params() {
    std::vector<Tensor*> out;
    out.reserve(layers.size() * 2);
    for (auto& l : layers) {
        out.push_back(&l.w);
        out.push_back(&l.b);
    }
    return out;
}

std::vector<const Tensor*> Net::params() const {
    std::vector<const Tensor*> out;
    out.reserve(layers.size() * 2);
    for (const auto& l : layers) {
        out.push_back(&l.w);
        out.push_back(&l.b);
    }
    return out;
}

Net build_net(const std::vector<LayerSpec>& specs, Rng& rng) {
    if (specs.empty()) throw dim_error("net needs at least one layer");
    for (size_t i = 0; i + 1 < specs.size(); ++i) {
        if (specs[i].out != specs[i + 1].in)
            throw dim_error("layer " + std::to_string(i) + " output dim " +
                            std::to_string(specs[i].out) + " does not feed layer " +
                            std::to_string(i + 1) + " input dim " +
                            std::to_string(specs[i + 1].in));
    }
    Net net;
    net.specs = specs;
    net.layers.reserve(specs.size());
    for (const auto& s : specs) {
        if (s.in == 0 || s.out == 0) throw dim_error("layer dims must be positive");
        DenseLayer l;
        l.w = Tensor::zeros({s.out, s.in});
        l.b = Tensor::zeros({s.out});
        double bound = std::sqrt(1.0 / static_cast<double>(s.in));
        for (double& x : l.w.v) x = rng.uniform(-bound, bound);
        net.layers.push_back(std::move(l));
    }
    return net;
}

static void apply_act(const LayerSpec& s, const std::vector<double>& pre, std::vector<double>& out) {
    out.resize(pre.size());
    switch (s.act) {
        case Act::tanh_:
            for (size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
            break;
        case Act::sigmoid:
            for (size_t i = 0; i < pre.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-pre[i]));
            break;
        case Act::lrelu:
            kernels::ops().lrelu(pre.data(), out.data(), s.act_slope, pre.size());
            break;
    }
}

const std::vector<double>& net_forward(const Net& net, const std::vector<double>& x,
                                       ForwardTrace& trace) {
    if (net.layers.empty()) throw dim_error("forward on empty net");
    if (x.size() != net.in_dim())
        throw dim_error("input size " + std::to_string(x.size()) + " != net input dim " +
                        std::to_string(net.in_dim()));
    const auto& K = kernels::ops();
    trace.inputs.assign(net.layers.size(), {});
    trace.pre_act.assign(net.layers.size(), {});

    std::vector<double> cur = x;
    for (size_t li = 0; li < net.layers.size(); ++li) {
        const auto& s = net.specs[li];
        const auto& l = net.layers[li];
        trace.inputs[li] = cur;
        std::vector<double> pre(s.out);
        K.matvec(l.w.v.data(), cur.data(), pre.data(), s.out, s.in);
        for (size_t i = 0; i < s.out; ++i) pre[i] += l.b.v[i];
        trace.pre_act[li] = pre;
        if (s.has_act) {
            apply_act(s, pre, cur);
        } else {
            cur = std::move(pre);
        }
    }
    trace.out = std::move(cur);
    return trace.out;
}

BackwardResult net_backward(const Net& net, const ForwardTrace& trace,
                            const std::vector<double>& grad_out, bool want_param_grads) {
    if (trace.inputs.size() != net.layers.size())
        throw dim_error("trace does not match net (run net_forward first)");
    if (grad_out.size() != net.out_dim())
        throw dim_error("grad_out size != net output dim");
    const auto& K = kernels::ops();

    BackwardResult res;
    if (want_param_grads) {
        res.param_grads.reserve(net.layers.size() * 2);
        for (const auto& l : net.layers) {
            res.param_grads.push_back(Tensor::zeros(l.w.shape));
            res.param_grads.push_back(Tensor::zeros(l.b.shape));
        }
    }

    std::vector<double> g = grad_out;  // dL/d(layer output), walking backwards
    for (size_t li = net.layers.size(); li-- > 0;) {
        const auto& s = net.specs[li];
        const auto& l = net.layers[li];
        const auto& pre = trace.pre_act[li];

        // through the activation: g becomes dL/d(pre)
        if (s.has_act) {
            switch (s.act) {
                case Act::tanh_:
                    for (size_t i = 0; i < g.size(); ++i) {
                        double t = std::tanh(pre[i]);
                        g[i] *= 1.0 - t * t;
                    }
                    break;
                case Act::sigmoid:
                    for (size_t i = 0; i < g.size(); ++i) {
                        double sg = 1.0 / (1.0 + std::exp(-pre[i]));
                        g[i] *= sg * (1.0 - sg);
                    }
                    break;
                case Act::lrelu:
                    K.lrelu_grad(pre.data(), g.data(), g.data(), s.act_slope, g.size());
                    break;
            }
        }

        if (want_param_grads) {
            Tensor& gw = res.param_grads[li * 2];
            Tensor& gb = res.param_grads[li * 2 + 1];
            K.ger_acc(gw.v.data(), g.data(), trace.inputs[li].data(), s.out, s.in);
            for (size_t i = 0; i < s.out; ++i) gb.v[i] += g[i];
        }

        std::vector<double> gin(s.in);
        K.matvec_t(l.w.v.data(), g.data(), gin.data(), s.out, s.in);
        g = std::move(gin);
    }
    res.input_grad = std::move(g);
    return res;
}

GradCheckReport grad_check(Net& net, const std::vector<double>& x,
                           const std::vector<double>& target, double step, double tol) {
    if (target.size() != net.out_dim()) throw dim_error("target size != net output dim");
    auto loss = [&](void) {
        ForwardTrace tr;
        const auto& y = net_forward(net, x, tr);
        double s = 0.0;
        for (size_t i = 0; i < y.size(); ++i) {
            double d = y[i] - target[i];
            s += 0.5 * d * d;
        }
        return s;
    };

    ForwardTrace tr;
    const auto& y = net_forward(net, x, tr);
    std::vector<double> grad_out(y.size());
    for (size_t i = 0; i < y.size(); ++i) grad_out[i] = y[i] - target[i];
    BackwardResult back = net_backward(net, tr, grad_out, true);

    GradCheckReport rep;
    auto ps = net.params();
    for (size_t pi = 0; pi < ps.size(); ++pi) {
        Tensor* p = ps[pi];
        for (size_t i = 0; i < p->v.size(); ++i) {
            double keep = p->v[i];
            p->v[i] = keep + step;
            double lp = loss();
            p->v[i] = keep - step;
            double lm = loss();
            p->v[i] = keep;
            double num = (lp - lm) / (2.0 * step);
            double ana = back.param_grads[pi].v[i];
            double rel = std::fabs(ana - num) / (std::fabs(ana) + std::fabs(num) + 1e-12);
            if (rel > rep.max_rel_err) rep.max_rel_err = rel;
            ++rep.checked;
        }
    }
    rep.pass = rep.max_rel_err <= tol;
    return rep;
}

}  // namespace gss
