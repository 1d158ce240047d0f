#include "gss/sampler.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gss/adam.hpp"
#include "gss/kernels.hpp"
#include "gss/rng.hpp"
#include "gss/security.hpp"

namespace gss {

namespace {

constexpr double kDClip = 1e-7;

double clamp_prob(double p) {
    if (p < kDClip) return kDClip;
    if (p > 1.0 - kDClip) return 1.0 - kDClip;
    return p;
}

void check_dims(const GeneratorModel& g, const CorruptionMask& mask, const SemiStego& carrier,
                const CardanGrille& grille) {
    if (mask.w != g.w || mask.h != g.h) throw dim_error("mask dims != generator dims");
    if (carrier.image.w != g.w || carrier.image.h != g.h)
        throw dim_error("carrier dims != generator dims");
    if (grille.w != g.w || grille.h != g.h) throw dim_error("grille dims != generator dims");
}

struct StepEval {
    double contextual = 0.0;
    double perceptual = 0.0;
    double message = 0.0;
    double total = 0.0;
    std::vector<double> z_grad;
};

// One forward/backward sweep of the search objective. `msg_bits` selects
// which pixels the message term covers (a subset of the grille in the
// search loop, the whole grille for the public gradient).
StepEval eval_step(const GeneratorModel& g, const DiscriminatorModel& d,
                   const std::vector<double>& z, const uint8_t* mask_bits,
                   const uint8_t* msg_bits, const ImageF& carrier_f, double lambda,
                   bool want_grad) {
    const auto& K = kernels::ops();
    const size_t npx = g.h * g.w;

    ForwardTrace tr_g;
    const ImageF& gen = net_forward(g.net, z, tr_g);
    ForwardTrace tr_d;
    double p_raw = net_forward(d.net, gen, tr_d)[0];
    double p = clamp_prob(p_raw);

    StepEval ev;
    ev.contextual = K.masked_l1(gen.data(), carrier_f.data(), mask_bits, npx);
    ev.perceptual = std::log(1.0 - p);
    ev.message = K.masked_l1(gen.data(), carrier_f.data(), msg_bits, npx);
    ev.total = ev.perceptual + ev.contextual + lambda * ev.message;
    if (!want_grad || !std::isfinite(ev.total)) return ev;

    // dL/d(gen): contextual + lambda*message L1 signs, plus the perceptual
    // term routed through D (zero on the clamp plateau).
    std::vector<double> g_gen(npx, 0.0);
    K.masked_l1_grad_acc(gen.data(), carrier_f.data(), mask_bits, 1.0, g_gen.data(), npx);
    K.masked_l1_grad_acc(gen.data(), carrier_f.data(), msg_bits, lambda, g_gen.data(), npx);
    if (p_raw > kDClip && p_raw < 1.0 - kDClip) {
        BackwardResult through_d = net_backward(d.net, tr_d, {-1.0 / (1.0 - p)}, false);
        K.axpy(1.0, through_d.input_grad.data(), g_gen.data(), npx);
    }
    BackwardResult back = net_backward(g.net, tr_g, g_gen, false);
    ev.z_grad = std::move(back.input_grad);
    return ev;
}

}  // namespace

double contextual_loss(const ImageF& gen, const ImageF& carrier, const CorruptionMask& mask) {
    if (gen.size() != carrier.size() || gen.size() != mask.m.size())
        throw dim_error("contextual loss: size mismatch");
    return kernels::ops().masked_l1(gen.data(), carrier.data(), mask.m.data(), gen.size());
}

double contextual_loss(const GeneratorModel& g, const std::vector<double>& z,
                       const CorruptionMask& mask, const SemiStego& carrier) {
    return contextual_loss(generate(g, z), dequantize(carrier.image), mask);
}

double perceptual_loss(const DiscriminatorModel& d, const ImageF& gen) {
    ForwardTrace tr;
    double p = clamp_prob(net_forward(d.net, gen, tr)[0]);
    return std::log(1.0 - p);
}

double perceptual_loss(const GeneratorModel& g, const DiscriminatorModel& d,
                       const std::vector<double>& z) {
    return perceptual_loss(d, generate(g, z));
}

double message_loss(const ImageF& gen, const ImageF& carrier, const CardanGrille& grille) {
    if (gen.size() != carrier.size() || gen.size() != grille.c.size())
        throw dim_error("message loss: size mismatch");
    return kernels::ops().masked_l1(gen.data(), carrier.data(), grille.c.data(), gen.size());
}

double total_loss(const GeneratorModel& g, const DiscriminatorModel& d,
                  const std::vector<double>& z, const CorruptionMask& mask,
                  const SemiStego& carrier, const CardanGrille& grille, double lambda) {
    ImageF gen = generate(g, z);
    ImageF carrier_f = dequantize(carrier.image);
    return perceptual_loss(d, gen) + contextual_loss(gen, carrier_f, mask) +
           lambda * message_loss(gen, carrier_f, grille);
}

std::vector<double> total_loss_grad(const GeneratorModel& g, const DiscriminatorModel& d,
                                    const std::vector<double>& z, const CorruptionMask& mask,
                                    const SemiStego& carrier, const CardanGrille& grille,
                                    double lambda) {
    check_dims(g, mask, carrier, grille);
    if (z.size() != g.latent_dim) throw dim_error("latent vector size != generator latent dim");
    ImageF carrier_f = dequantize(carrier.image);
    StepEval ev = eval_step(g, d, z, mask.m.data(), grille.c.data(), carrier_f, lambda, true);
    if (ev.z_grad.empty()) throw numeric_error("loss is non-finite at this point");
    return std::move(ev.z_grad);
}

SearchResult find_encoding(const GeneratorModel& g, const DiscriminatorModel& d,
                           const SemiStego& carrier, const CardanGrille& grille,
                           const Message& m, const SearchConfig& cfg) {
    if (cfg.iterations == 0) throw config_error("search needs at least one iteration");
    if (cfg.lambda < 0.0) throw config_error("lambda must be nonnegative");
    check_dims(g, carrier.mask, carrier, grille);
    if (m.bits.size() > grille.popcount())
        throw capacity_error("message longer than grille capacity");

    const auto& K = kernels::ops();
    const size_t npx = g.h * g.w;
    const ImageF carrier_f = dequantize(carrier.image);

    // Only the grille positions that actually carry message bits (the first
    // |m| in row-major order) enter the message loss; a zero-length message
    // makes it identically zero.
    std::vector<uint8_t> msg_mask(npx, 0);
    {
        size_t taken = 0;
        for (size_t i = 0; i < npx && taken < m.bits.size(); ++i)
            if (grille.c[i]) {
                msg_mask[i] = 1;
                ++taken;
            }
    }

    Tensor z = Tensor::zeros({g.latent_dim});
    Rng rng(cfg.seed);
    for (double& x : z.v) x = rng.uniform(-1.0, 1.0);

    std::vector<Tensor*> zparam = {&z};
    AdamState opt = AdamState::for_params(zparam, cfg.lr);

    SearchResult res;
    res.z_hat = z.v;
    res.best_total = std::numeric_limits<double>::infinity();
    res.trajectory.reserve(cfg.iterations);

    auto snapshot_accuracy = [&](const std::vector<double>& zbest) {
        if (m.bits.empty()) return 1.0;
        ImageU8 img = quantize(generate(g, zbest), g.w, g.h);
        Message got = extract(img, grille);
        got.bits.resize(m.bits.size());
        return extraction_accuracy(m.bits, got.bits);
    };

    for (size_t it = 0; it < cfg.iterations; ++it) {
        StepEval ev = eval_step(g, d, z.v, carrier.mask.m.data(), msg_mask.data(), carrier_f,
                                cfg.lambda, true);

        TrajectoryPoint pt;
        pt.iter = it;
        pt.contextual = ev.contextual;
        pt.perceptual = ev.perceptual;
        pt.message = ev.message;
        pt.total = ev.total;

        if (!std::isfinite(pt.total)) {
            res.trajectory.push_back(pt);
            res.aborted = true;
            break;
        }
        if (pt.total < res.best_total) {
            res.best_total = pt.total;
            res.z_hat = z.v;
        }
        if (cfg.snapshot_every != 0 && it % cfg.snapshot_every == 0)
            pt.accuracy_snapshot = snapshot_accuracy(res.z_hat);
        res.trajectory.push_back(pt);

        Tensor grad = Tensor::zeros({g.latent_dim});
        grad.v = std::move(ev.z_grad);
        std::vector<const Tensor*> gview = {&grad};
        adam_step(opt, zparam, gview);
        K.clip(z.v.data(), -1.0, 1.0, z.v.size());
    }
    return res;
}

StegoResult generate_stego(const GeneratorModel& g, const DiscriminatorModel& d,
                           const Message& m, const ImageU8& base, const CorruptionMask& mask,
                           const GrilleKey& key, const SearchConfig& cfg) {
    CardanGrille grille = derive_grille(key, mask);
    SemiStego carrier = expand(m, base, mask, grille);
    SearchResult search = find_encoding(g, d, carrier, grille, m, cfg);

    StegoResult out;
    out.stego = quantize(generate(g, search.z_hat), g.w, g.h);
    out.z_hat = std::move(search.z_hat);
    out.trajectory = std::move(search.trajectory);
    if (m.bits.empty()) {
        out.accuracy = 1.0;
    } else {
        Message got = extract(out.stego, grille);
        got.bits.resize(m.bits.size());
        out.accuracy = extraction_accuracy(m.bits, got.bits);
    }
    return out;
}

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& traj) {
    std::ostringstream os;
    os << "iter,l_contextual,l_perceptual,l_message,l_total,extraction_accuracy_snapshot\n";
    os.precision(17);
    for (const auto& p : traj) {
        os << p.iter << ',' << p.contextual << ',' << p.perceptual << ',' << p.message << ','
           << p.total << ',';
        if (p.accuracy_snapshot >= 0.0) os << p.accuracy_snapshot;
        os << '\n';
    }
    return os.str();
}

}  // namespace gss
