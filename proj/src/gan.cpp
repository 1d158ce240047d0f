#include "gss/gan.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gss/adam.hpp"
#include "gss/checkpoint.hpp"
#include "gss/error.hpp"
#include "gss/rng.hpp"

namespace gss {

std::string TrainLog::to_csv() const {
    std::ostringstream os;
    os << "epoch,g_loss,d_loss,d_real_mean,d_fake_mean,js_proxy\n";
    os.precision(17);
    for (const auto& r : records)
        os << r.epoch << ',' << r.g_loss << ',' << r.d_loss << ',' << r.d_real_mean << ','
           << r.d_fake_mean << ',' << r.js_proxy << '\n';
    return os.str();
}

static std::vector<LayerSpec> mlp_specs(size_t in, const std::vector<size_t>& hidden, size_t out,
                                        Act final_act) {
    std::vector<LayerSpec> specs;
    size_t prev = in;
    for (size_t hdim : hidden) {
        LayerSpec s;
        s.in = prev;
        s.out = hdim;
        s.has_act = true;
        s.act = Act::lrelu;
        s.act_slope = 0.2;
        specs.push_back(s);
        prev = hdim;
    }
    LayerSpec last;
    last.in = prev;
    last.out = out;
    last.has_act = true;
    last.act = final_act;
    specs.push_back(last);
    return specs;
}

void init_models(GeneratorModel& g, DiscriminatorModel& d, size_t h, size_t w,
                 size_t latent_dim, const std::vector<size_t>& hidden_g,
                 const std::vector<size_t>& hidden_d, uint64_t seed) {
    if (h == 0 || w == 0 || latent_dim == 0) throw dim_error("model dims must be positive");
    Rng rg = Rng::substream(seed, 0);
    Rng rd = Rng::substream(seed, 1);
    g.net = build_net(mlp_specs(latent_dim, hidden_g, h * w, Act::tanh_), rg);
    g.h = h;
    g.w = w;
    g.latent_dim = latent_dim;
    d.net = build_net(mlp_specs(h * w, hidden_d, 1, Act::sigmoid), rd);
}

ImageF generate(const GeneratorModel& g, const std::vector<double>& z) {
    ForwardTrace tr;
    return net_forward(g.net, z, tr);
}

std::vector<ImageF> sample_images(const GeneratorModel& g, size_t n, uint64_t seed) {
    if (n == 0) throw config_error("sample count must be >= 1");
    std::vector<ImageF> out;
    out.reserve(n);
    std::vector<double> z(g.latent_dim);
    for (size_t i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, i);
        for (double& x : z) x = rng.uniform(-1.0, 1.0);
        out.push_back(generate(g, z));
    }
    return out;
}

namespace {

constexpr double kDClip = 1e-7;

double clamp_prob(double p) {
    if (p < kDClip) return kDClip;
    if (p > 1.0 - kDClip) return 1.0 - kDClip;
    return p;
}

// Running sum of parameter gradients, averaged at step time.
struct GradAccum {
    std::vector<Tensor> sums;

    void init_like(const Net& net) {
        sums.clear();
        for (const auto& l : net.layers) {
            sums.push_back(Tensor::zeros(l.w.shape));
            sums.push_back(Tensor::zeros(l.b.shape));
        }
    }
    void add(const std::vector<Tensor>& grads, double scale) {
        for (size_t i = 0; i < sums.size(); ++i)
            for (size_t j = 0; j < sums[i].v.size(); ++j)
                sums[i].v[j] += scale * grads[i].v[j];
    }
    std::vector<const Tensor*> views() const {
        std::vector<const Tensor*> out;
        out.reserve(sums.size());
        for (const auto& t : sums) out.push_back(&t);
        return out;
    }
};

void fill_uniform_latent(Rng& rng, std::vector<double>& z) {
    for (double& x : z) x = rng.uniform(-1.0, 1.0);
}

}  // namespace

TrainLog train_gan(const std::vector<ImageF>& data, GeneratorModel& g, DiscriminatorModel& d,
                   const TrainConfig& cfg) {
    if (data.empty()) throw config_error("training set is empty");
    if (cfg.epochs == 0 || cfg.batch == 0) throw config_error("epochs and batch must be >= 1");
    size_t npx = cfg.h * cfg.w;
    if (g.h != cfg.h || g.w != cfg.w || g.latent_dim != cfg.latent_dim)
        throw dim_error("generator does not match config dims");
    if (d.net.in_dim() != npx || d.net.out_dim() != 1)
        throw dim_error("discriminator does not match config dims");
    for (const auto& im : data)
        if (im.size() != npx) throw dim_error("training image size != h*w");

    Rng rng(cfg.seed);
    AdamState opt_g = AdamState::for_params(g.net.params(), cfg.lr_g);
    AdamState opt_d = AdamState::for_params(d.net.params(), cfg.lr_d);

    std::vector<uint32_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<uint32_t>(i);

    TrainLog log;
    std::vector<double> z(cfg.latent_dim);
    GradAccum acc_d, acc_g;

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double ep_gloss = 0.0, ep_dloss = 0.0, ep_dreal = 0.0, ep_dfake = 0.0;
        size_t nreal = 0, nfake = 0, ngstep = 0;

        for (size_t start = 0; start < data.size(); start += cfg.batch) {
            size_t bsz = std::min(cfg.batch, data.size() - start);
            double inv = 1.0 / static_cast<double>(bsz);

            // --- discriminator step: minimize -[ln D(x) + ln(1 - D(G(z)))]
            acc_d.init_like(d.net);
            double batch_dloss = 0.0;
            for (size_t bi = 0; bi < bsz; ++bi) {
                const ImageF& x = data[order[start + bi]];
                ForwardTrace tr;
                double p = clamp_prob(net_forward(d.net, x, tr)[0]);
                batch_dloss += -std::log(p);
                ep_dreal += p;
                ++nreal;
                BackwardResult back = net_backward(d.net, tr, {-1.0 / p}, true);
                acc_d.add(back.param_grads, inv);
            }
            for (size_t bi = 0; bi < bsz; ++bi) {
                fill_uniform_latent(rng, z);
                ImageF fake = generate(g, z);
                ForwardTrace tr;
                double p = clamp_prob(net_forward(d.net, fake, tr)[0]);
                batch_dloss += -std::log(1.0 - p);
                ep_dfake += p;
                ++nfake;
                BackwardResult back = net_backward(d.net, tr, {1.0 / (1.0 - p)}, true);
                acc_d.add(back.param_grads, inv);
            }
            batch_dloss *= inv;
            if (!std::isfinite(batch_dloss))
                throw numeric_error("discriminator loss went non-finite at epoch " +
                                    std::to_string(epoch));
            if (cfg.lr_d != 0.0) adam_step(opt_d, d.net.params(), acc_d.views());
            ep_dloss += batch_dloss;

            // --- generator step: ascend ln D(G(z)); log the Eq-style
            //     saturating value ln(1 - D(G(z))) alongside.
            acc_g.init_like(g.net);
            double batch_gsat = 0.0;
            for (size_t bi = 0; bi < bsz; ++bi) {
                fill_uniform_latent(rng, z);
                ForwardTrace tr_g;
                const ImageF& fake = net_forward(g.net, z, tr_g);
                ForwardTrace tr_d;
                double p = clamp_prob(net_forward(d.net, fake, tr_d)[0]);
                batch_gsat += std::log(1.0 - p);
                BackwardResult through_d = net_backward(d.net, tr_d, {-1.0 / p}, false);
                BackwardResult back = net_backward(g.net, tr_g, through_d.input_grad, true);
                acc_g.add(back.param_grads, inv);
            }
            batch_gsat *= inv;
            if (!std::isfinite(batch_gsat))
                throw numeric_error("generator loss went non-finite at epoch " +
                                    std::to_string(epoch));
            if (cfg.lr_g != 0.0) adam_step(opt_g, g.net.params(), acc_g.views());
            ep_gloss += batch_gsat;
            ++ngstep;
        }

        size_t nbatches = ngstep;
        TrainRecord r;
        r.epoch = epoch;
        r.g_loss = ep_gloss / static_cast<double>(nbatches);
        r.d_loss = ep_dloss / static_cast<double>(nbatches);
        r.d_real_mean = ep_dreal / static_cast<double>(nreal);
        r.d_fake_mean = ep_dfake / static_cast<double>(nfake);
        // Value function V = E ln D(x) + E ln(1-D(fake)) relates to the JS
        // divergence of the two distributions as V* = 2*JS_nats - ln 4.
        double v = -r.d_loss;
        double js_bits = (v + 2.0 * std::log(2.0)) / (2.0 * std::log(2.0));
        r.js_proxy = std::min(1.0, std::max(0.0, js_bits));
        log.records.push_back(r);
    }
    return log;
}

TrainLog train_gan(const std::vector<ImageF>& data, const TrainConfig& cfg, GeneratorModel& g,
                   DiscriminatorModel& d) {
    init_models(g, d, cfg.h, cfg.w, cfg.latent_dim, cfg.hidden_g, cfg.hidden_d, cfg.seed);
    return train_gan(data, g, d, cfg);
}

static constexpr uint32_t kMagic = 0x31535347;  // "GSS1" little-endian
static constexpr uint32_t kVersion = 1;

void save_checkpoint(const std::string& path, const GeneratorModel& g,
                     const DiscriminatorModel& d) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    write_u32(os, kMagic);
    write_u32(os, kVersion);
    write_u32(os, static_cast<uint32_t>(g.h));
    write_u32(os, static_cast<uint32_t>(g.w));
    write_u32(os, static_cast<uint32_t>(g.latent_dim));
    write_u32(os, 2);  // net count
    write_net(os, g.net);
    write_net(os, d.net);
    if (!os) throw io_error("short write to " + path);
}

void load_checkpoint(const std::string& path, GeneratorModel& g, DiscriminatorModel& d) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open " + path);
    uint32_t magic = read_u32(is, "magic");
    if (magic != kMagic) throw format_error(path + ": bad magic (not a GSS1 checkpoint)");
    uint32_t version = read_u32(is, "version");
    if (version != kVersion)
        throw format_error(path + ": unsupported checkpoint version " + std::to_string(version));
    g.h = read_u32(is, "height");
    g.w = read_u32(is, "width");
    g.latent_dim = read_u32(is, "latent dim");
    if (g.h == 0 || g.w == 0 || g.latent_dim == 0)
        throw format_error(path + ": zero dimension in header");
    uint32_t nets = read_u32(is, "net count");
    if (nets != 2) throw format_error(path + ": expected 2 nets, found " + std::to_string(nets));
    g.net = read_net(is);
    d.net = read_net(is);
    if (g.net.in_dim() != g.latent_dim || g.net.out_dim() != g.h * g.w)
        throw format_error(path + ": generator dims disagree with header");
    if (d.net.in_dim() != g.h * g.w || d.net.out_dim() != 1)
        throw format_error(path + ": discriminator dims disagree with header");
}

}  // namespace gss
