#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gss/data.hpp"
#include "gss/rng.hpp"
#include "gss/sampler.hpp"

using namespace gss;

namespace {

GrilleKey key_from(uint64_t n, double rho = 0.5, int bpi = 1) {
    GrilleKey k;
    k.seed.assign(8, 0);
    for (int i = 0; i < 8; ++i) k.seed[i] = static_cast<uint8_t>(n >> (8 * i));
    k.rho = rho;
    k.bpi = bpi;
    return k;
}

// G(z) = z: one linear 1->1 layer, no activation
GeneratorModel identity_generator() {
    Rng rng(1);
    GeneratorModel g;
    g.net = build_net({{1, 1, false, Act::tanh_, 0.0}}, rng);
    g.net.layers[0].w.v = {1.0};
    g.net.layers[0].b.v = {0.0};
    g.h = 1;
    g.w = 1;
    g.latent_dim = 1;
    return g;
}

// D(x) = 0.5 with zero gradient everywhere
DiscriminatorModel constant_discriminator(size_t in_dim) {
    Rng rng(1);
    DiscriminatorModel d;
    d.net = build_net({{in_dim, 1, true, Act::sigmoid, 0.0}}, rng);
    std::fill(d.net.layers[0].w.v.begin(), d.net.layers[0].w.v.end(), 0.0);
    d.net.layers[0].b.v = {0.0};
    return d;
}

}  // namespace

TEST_CASE("loss building blocks: worked values") {
    SUBCASE("contextual") {
        ImageF gen = {0.5, -0.25, 0.0, 1.0};
        ImageF car = {0.0, 0.0, 0.0, 1.0};
        CorruptionMask m = CorruptionMask::make(2, 2, 0);
        m.m = {1, 1, 0, 1};
        CHECK(contextual_loss(gen, car, m) == 0.75);
        m.m = {0, 0, 0, 0};
        CHECK(contextual_loss(gen, car, m) == 0.0);
        ImageF bad = {0.1};
        CHECK_THROWS_AS(contextual_loss(bad, car, m), Error);
    }
    SUBCASE("perceptual hits the clamp rails") {
        DiscriminatorModel half = constant_discriminator(4);
        ImageF gen(4, 0.3);
        CHECK(perceptual_loss(half, gen) == doctest::Approx(std::log(0.5)).epsilon(1e-15));

        DiscriminatorModel sure = constant_discriminator(4);
        sure.net.layers[0].b.v = {40.0};  // sigmoid(40) ~ 1: clamped to 1-1e-7
        CHECK(perceptual_loss(sure, gen) == std::log(1.0 - (1.0 - 1e-7)));

        DiscriminatorModel never = constant_discriminator(4);
        never.net.layers[0].b.v = {-40.0};  // sigmoid(-40) ~ 0: clamped to 1e-7
        CHECK(perceptual_loss(never, gen) ==
              doctest::Approx(std::log(1.0 - 1e-7)).epsilon(1e-12));
    }
    SUBCASE("message over grille positions") {
        ImageF gen = {-0.2, 0.9};
        ImageF car = {0.0, 0.0};
        CardanGrille gr;
        gr.w = 2;
        gr.h = 1;
        gr.c = {1, 0};
        gr.bpi = 1;
        CHECK(message_loss(gen, car, gr) == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("total is the lambda-weighted sum") {
        CHECK(-0.6931 + 0.75 + 0.1 * 0.2 == doctest::Approx(0.0769).epsilon(1e-12));

        GeneratorModel g;
        DiscriminatorModel d;
        init_models(g, d, 3, 3, 4, {6}, {6}, 11);
        CorruptionMask mask = CorruptionMask::make(3, 3, 1);
        mask.m[4] = 0;
        auto grille = derive_grille(key_from(5, 0.5, 2), mask);
        ImageU8 base = ImageU8::make(3, 3, 77);
        Message msg;
        msg.bits = {1, 0, 1};
        SemiStego ss = expand(msg, base, mask, grille);

        std::vector<double> z = {0.1, -0.3, 0.6, -0.9};
        double t = total_loss(g, d, z, mask, ss, grille, 0.25);
        ImageF gen = generate(g, z);
        ImageF car = dequantize(ss.image);
        double want = perceptual_loss(d, gen) + contextual_loss(gen, car, mask) +
                      0.25 * message_loss(gen, car, grille);
        CHECK(t == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("composite z-gradient matches central differences") {
    Rng rng(909);
    int checked_models = 0;
    for (int trial = 0; trial < 20; ++trial) {
        size_t h = 3 + rng.bounded(3);
        size_t w = 3 + rng.bounded(3);
        size_t latent = 2 + rng.bounded(4);
        GeneratorModel g;
        DiscriminatorModel d;
        init_models(g, d, h, w, latent, {5 + rng.bounded(6)}, {5 + rng.bounded(6)},
                    rng.next_u64());

        CorruptionMask mask = CorruptionMask::make(w, h, 0);
        for (auto& b : mask.m) b = rng.uniform01() < 0.7 ? 1 : 0;
        mask.m[0] = 1;
        auto grille = derive_grille(key_from(rng.next_u64(), 0.5, 1), mask);

        // carrier from a different latent: residuals are O(0.1), far from kinks
        std::vector<double> z_car(latent);
        for (double& v : z_car) v = rng.uniform(-1, 1);
        ImageU8 base = quantize(generate(g, z_car), w, h);
        Message msg;
        msg.bits.resize(std::min<size_t>(4, capacity(grille)));
        for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));
        SemiStego ss = expand(msg, base, mask, grille);

        std::vector<double> z(latent);
        for (double& v : z) v = rng.uniform(-0.8, 0.8);
        double lambda = 0.1 + rng.uniform01();

        auto grad = total_loss_grad(g, d, z, mask, ss, grille, lambda);
        REQUIRE(grad.size() == latent);
        ++checked_models;

        double hstep = 1e-6;
        for (size_t i = 0; i < latent; ++i) {
            auto zp = z, zm = z;
            zp[i] += hstep;
            zm[i] -= hstep;
            double num = (total_loss(g, d, zp, mask, ss, grille, lambda) -
                          total_loss(g, d, zm, mask, ss, grille, lambda)) /
                         (2 * hstep);
            double rel = std::fabs(grad[i] - num) /
                         (std::fabs(grad[i]) + std::fabs(num) + 1e-10);
            INFO("trial ", trial, " coord ", i, " analytic ", grad[i], " numeric ", num);
            CHECK(rel < 1e-4);
        }
    }
    CHECK(checked_models == 20);
}

TEST_CASE("search: convex toy settles onto the carrier value") {
    GeneratorModel g = identity_generator();
    DiscriminatorModel d = constant_discriminator(1);

    CorruptionMask mask = CorruptionMask::make(1, 1, 1);
    CardanGrille grille;
    grille.w = 1;
    grille.h = 1;
    grille.c = {1};
    grille.bpi = 1;
    ImageU8 base = ImageU8::make(1, 1, 166);
    Message msg;
    msg.bits = {0};  // 166 already has LSB 0
    SemiStego ss = expand(msg, base, mask, grille);
    REQUIRE(ss.image.px[0] == 166);
    const double target = dequantize_value(166);

    SearchConfig cfg;
    cfg.iterations = 500;
    cfg.lr = 4e-3;
    cfg.lambda = 1.0;
    cfg.seed = 3;
    cfg.snapshot_every = 0;

    SearchResult res = find_encoding(g, d, ss, grille, msg, cfg);
    REQUIRE(res.z_hat.size() == 1);
    INFO("z_hat ", res.z_hat[0], " target ", target);
    CHECK_FALSE(res.aborted);
    CHECK(std::fabs(res.z_hat[0] - target) < 1e-3);
    CHECK(res.best_total <= res.trajectory.front().total);
    // total at the best point: ln(0.5) + 2*|z-t|
    CHECK(res.best_total ==
          doctest::Approx(std::log(0.5) + 2 * std::fabs(res.z_hat[0] - target)).epsilon(1e-9));
}

TEST_CASE("search keeps z inside the unit box even at silly learning rates") {
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 4, 4, 6, {8}, {8}, 2);
    CorruptionMask mask = CorruptionMask::make(4, 4, 1);
    auto grille = derive_grille(key_from(1), mask);
    Message msg;
    msg.bits.resize(capacity(grille), 1);
    ImageU8 base = ImageU8::make(4, 4, 10);
    SemiStego ss = expand(msg, base, mask, grille);

    SearchConfig cfg;
    cfg.iterations = 50;
    cfg.lr = 5.0;
    cfg.seed = 8;
    SearchResult res = find_encoding(g, d, ss, grille, msg, cfg);
    for (double v : res.z_hat) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("lambda zero makes the message term inert") {
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 5, 5, 4, {10}, {10}, 21);
    CorruptionMask mask = CorruptionMask::make(5, 5, 1);
    mask.m[7] = 0;
    auto grille = derive_grille(key_from(9, 0.5, 1), mask);
    ImageU8 base = ImageU8::make(5, 5, 0);
    Rng rng(4);
    for (auto& p : base.px) p = static_cast<uint8_t>(rng.bounded(256));

    Message msg;
    msg.bits.resize(capacity(grille));
    for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));
    Message none;

    SemiStego with_msg = expand(msg, base, mask, grille);
    SemiStego without = expand(none, base, mask, grille);

    SearchConfig cfg;
    cfg.iterations = 40;
    cfg.lambda = 0.0;
    cfg.seed = 17;
    cfg.snapshot_every = 0;

    // same carrier => identical runs, message ignored
    SearchResult a = find_encoding(g, d, with_msg, grille, msg, cfg);
    SearchResult b = find_encoding(g, d, with_msg, grille, none, cfg);
    CHECK(a.z_hat == b.z_hat);
    CHECK(a.best_total == b.best_total);
    for (size_t i = 0; i < a.trajectory.size(); ++i) {
        CHECK(a.trajectory[i].total == b.trajectory[i].total);
        CHECK(b.trajectory[i].message == 0.0);  // empty message: identically zero
    }

    // carriers differ only in message-bit planes; keep lambda=0 and the
    // contextual pull still sees those pixels, so just check determinism
    SearchResult c = find_encoding(g, d, without, grille, none, cfg);
    SearchResult c2 = find_encoding(g, d, without, grille, none, cfg);
    CHECK(c.z_hat == c2.z_hat);
}

TEST_CASE("sub-half-step residuals always extract perfectly") {
    Rng rng(31337);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t w = 4 + rng.bounded(13);
        size_t h = 4 + rng.bounded(13);
        CorruptionMask mask = CorruptionMask::make(w, h, 0);
        size_t ones = 0;
        for (auto& b : mask.m) {
            b = rng.uniform01() < 0.6 ? 1 : 0;
            ones += b;
        }
        if (!ones) mask.m[0] = 1;
        int bpi = 1 + static_cast<int>(rng.bounded(8));
        CardanGrille grille;
        try {
            grille = derive_grille(key_from(rng.next_u64(), 0.3 + 0.7 * rng.uniform01(), bpi),
                                   mask);
        } catch (const Error&) {
            continue;
        }
        Message msg;
        msg.bits.resize(capacity(grille));
        for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));

        ImageU8 base = ImageU8::make(w, h, 0);
        for (auto& p : base.px) p = static_cast<uint8_t>(rng.bounded(256));
        SemiStego ss = expand(msg, base, mask, grille);

        ImageF gen = dequantize(ss.image);
        for (double& v : gen) v += rng.uniform(-0.999, 0.999) / 255.0;

        Message got = extract(quantize(gen, w, h), grille);
        got.bits.resize(msg.bits.size());
        REQUIRE(got.bits == msg.bits);
    }
}

TEST_CASE("wrong key reads noise") {
    Rng rng(606);
    CorruptionMask mask = gen_corruption_mask(MaskKind::strips50, 64, 64, 2);
    GrilleKey right = key_from(111, 0.9, 1);
    GrilleKey wrong = key_from(222, 0.9, 1);
    auto g_right = derive_grille(right, mask);
    auto g_wrong = derive_grille(wrong, mask);
    REQUIRE(capacity(g_right) >= 1600);

    Message msg;
    msg.bits.resize(capacity(g_right));
    for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));
    ImageU8 base = ImageU8::make(64, 64, 0);
    for (auto& p : base.px) p = static_cast<uint8_t>(rng.bounded(256));

    SemiStego ss = expand(msg, base, mask, g_right);
    Message got = extract(ss.image, g_wrong);
    size_t n = std::min(got.bits.size(), msg.bits.size());
    size_t match = 0;
    for (size_t i = 0; i < n; ++i) match += got.bits[i] == msg.bits[i];
    double acc = static_cast<double>(match) / static_cast<double>(n);
    INFO("wrong-key accuracy ", acc, " over ", n, " bits");
    CHECK(acc > 0.45);
    CHECK(acc < 0.55);
}

TEST_CASE("find_encoding validation and abort path") {
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 4, 4, 5, {6}, {6}, 1);
    CorruptionMask mask = CorruptionMask::make(4, 4, 1);
    auto grille = derive_grille(key_from(3), mask);
    Message msg;
    msg.bits.resize(capacity(grille), 0);
    ImageU8 base = ImageU8::make(4, 4, 128);
    SemiStego ss = expand(msg, base, mask, grille);

    SearchConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(find_encoding(g, d, ss, grille, msg, cfg), Error);
    cfg.iterations = 5;
    cfg.lambda = -0.1;
    CHECK_THROWS_AS(find_encoding(g, d, ss, grille, msg, cfg), Error);
    cfg.lambda = 0.1;
    Message too_long;
    too_long.bits.resize(capacity(grille) + 1, 0);
    CHECK_THROWS_AS(find_encoding(g, d, ss, grille, too_long, cfg), Error);

    SUBCASE("non-finite forward pass aborts with the trajectory kept") {
        g.net.layers[0].w.v[0] = std::nan("");
        SearchResult res = find_encoding(g, d, ss, grille, msg, cfg);
        CHECK(res.aborted);
        CHECK(res.trajectory.size() == 1);
        CHECK_FALSE(std::isfinite(res.trajectory[0].total));
    }
}

TEST_CASE("generate_stego: end-to-end determinism and snapshot bookkeeping") {
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 8, 8, 10, {24}, {24}, 77);
    CorruptionMask mask = gen_corruption_mask(MaskKind::pattern20, 8, 8, 4);
    GrilleKey key = key_from(42, 0.5, 8);
    Message msg;
    msg.bits = {1, 0, 1, 1, 0};
    ImageU8 base = ImageU8::make(8, 8, 0);
    Rng rng(12);
    for (auto& p : base.px) p = static_cast<uint8_t>(rng.bounded(256));

    SearchConfig cfg;
    cfg.iterations = 60;
    cfg.seed = 5;
    cfg.snapshot_every = 10;

    StegoResult r1 = generate_stego(g, d, msg, base, mask, key, cfg);
    StegoResult r2 = generate_stego(g, d, msg, base, mask, key, cfg);
    CHECK(r1.stego.px == r2.stego.px);
    CHECK(r1.z_hat == r2.z_hat);
    CHECK(r1.accuracy == r2.accuracy);
    CHECK(r1.trajectory.size() == 60);
    CHECK(r1.accuracy >= 0.0);
    CHECK(r1.accuracy <= 1.0);

    size_t snaps = 0;
    for (const auto& pt : r1.trajectory)
        if (pt.accuracy_snapshot >= 0.0) ++snaps;
    CHECK(snaps == 6);  // iters 0,10,...,50

    SUBCASE("csv layout") {
        std::string csv = trajectory_to_csv(r1.trajectory);
        CHECK(csv.rfind("iter,l_contextual,l_perceptual,l_message,l_total,"
                        "extraction_accuracy_snapshot\n", 0) == 0);
        size_t lines = std::count(csv.begin(), csv.end(), '\n');
        CHECK(lines == 61);
        // unsampled rows end with an empty field
        size_t second_line = csv.find('\n', csv.find('\n') + 1);
        (void)second_line;
        size_t pos = 0;
        int row = -1;  // header
        size_t blank_tails = 0;
        while ((pos = csv.find('\n', pos)) != std::string::npos) {
            if (row >= 0 && pos > 0 && csv[pos - 1] == ',') ++blank_tails;
            ++row;
            ++pos;
        }
        CHECK(blank_tails == 60 - 6);
    }
}
