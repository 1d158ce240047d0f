#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gss/gan.hpp"
#include "gss/image.hpp"
#include "gss/rng.hpp"
#include "gss/security.hpp"

using namespace gss;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path p;
    TempDir(const char* tag) {
        p = fs::temp_directory_path() / (std::string("gss_gan_") + tag + "_" +
                                         std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
    }
    ~TempDir() { fs::remove_all(p); }
};

std::vector<double> all_params(const Net& n) {
    std::vector<double> out;
    for (const auto& L : n.layers) {
        out.insert(out.end(), L.w.v.begin(), L.w.v.end());
        out.insert(out.end(), L.b.v.begin(), L.b.v.end());
    }
    return out;
}

double sample_mean(const GeneratorModel& g, size_t n, uint64_t seed) {
    auto imgs = sample_images(g, n, seed);
    double acc = 0.0;
    size_t cnt = 0;
    for (const auto& im : imgs)
        for (double v : im) {
            acc += v;
            ++cnt;
        }
    return acc / static_cast<double>(cnt);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("init_models: shapes, determinism, output ranges") {
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 4, 5, 7, {16}, {12}, 42);
    CHECK(g.h == 4);
    CHECK(g.w == 5);
    CHECK(g.latent_dim == 7);
    CHECK(g.net.in_dim() == 7);
    CHECK(g.net.out_dim() == 20);
    CHECK(d.net.in_dim() == 20);
    CHECK(d.net.out_dim() == 1);

    GeneratorModel g2;
    DiscriminatorModel d2;
    init_models(g2, d2, 4, 5, 7, {16}, {12}, 42);
    CHECK(all_params(g.net) == all_params(g2.net));
    CHECK(all_params(d.net) == all_params(d2.net));

    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> z(7);
        for (double& v : z) v = rng.uniform(-1, 1);
        ImageF im = generate(g, z);
        REQUIRE(im.size() == 20);
        for (double v : im) {
            CHECK(v > -1.0);
            CHECK(v < 1.0);  // tanh is open-interval
        }
        ForwardTrace tr;
        auto dy = net_forward(d.net, im, tr);
        CHECK(dy[0] > 0.0);
        CHECK(dy[0] < 1.0);
    }

    std::vector<double> bad(6);
    CHECK_THROWS_AS(generate(g, bad), Error);
}

TEST_CASE("sample_images: determinism, range, validation") {
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 3, 3, 5, {8}, {8}, 7);
    auto a = sample_images(g, 4, 11);
    auto b = sample_images(g, 4, 11);
    auto c = sample_images(g, 4, 12);
    REQUIRE(a.size() == 4);
    CHECK(a[0] == b[0]);
    CHECK(a[3] == b[3]);
    CHECK(a[0] != c[0]);
    CHECK(a[0] != a[1]);
    CHECK_THROWS_AS(sample_images(g, 0, 1), Error);
}

TEST_CASE("zero learning rates leave parameters untouched") {
    std::vector<ImageF> data(8, ImageF(9, 0.25));
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch = 4;
    cfg.lr_g = 0.0;
    cfg.lr_d = 0.0;
    cfg.latent_dim = 4;
    cfg.h = 3;
    cfg.w = 3;
    cfg.hidden_g = {6};
    cfg.hidden_d = {6};
    cfg.seed = 9;

    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 3, 3, 4, {6}, {6}, 9);
    auto gp = all_params(g.net);
    auto dp = all_params(d.net);
    TrainLog log = train_gan(data, g, d, cfg);
    CHECK(all_params(g.net) == gp);
    CHECK(all_params(d.net) == dp);
    CHECK(log.records.size() == 3);
}

TEST_CASE("training is deterministic per seed") {
    std::vector<ImageF> data;
    Rng rng(21);
    for (int i = 0; i < 12; ++i) {
        ImageF im(16);
        for (double& v : im) v = rng.uniform(-0.9, 0.9);
        data.push_back(im);
    }
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch = 4;
    cfg.lr_g = 1e-3;
    cfg.lr_d = 1e-3;
    cfg.latent_dim = 6;
    cfg.h = 4;
    cfg.w = 4;
    cfg.hidden_g = {10};
    cfg.hidden_d = {10};
    cfg.seed = 5;

    GeneratorModel g1, g2;
    DiscriminatorModel d1, d2;
    TrainLog l1 = train_gan(data, cfg, g1, d1);
    TrainLog l2 = train_gan(data, cfg, g2, d2);
    CHECK(l1.to_csv() == l2.to_csv());
    CHECK(all_params(g1.net) == all_params(g2.net));
    CHECK(all_params(d1.net) == all_params(d2.net));

    SUBCASE("csv layout") {
        std::string csv = l1.to_csv();
        CHECK(csv.rfind("epoch,g_loss,d_loss,d_real_mean,d_fake_mean,js_proxy\n", 0) == 0);
        size_t lines = std::count(csv.begin(), csv.end(), '\n');
        CHECK(lines == 1 + cfg.epochs);
        for (const auto& r : l1.records) {
            CHECK(r.d_real_mean > 0.0);
            CHECK(r.d_real_mean < 1.0);
            CHECK(r.js_proxy >= 0.0);
            CHECK(r.js_proxy <= 1.0);
        }
    }
}

TEST_CASE("generator drifts toward a constant target distribution") {
    // one constant image; windowed |E[G(z)] - mean| must shrink over training
    const double target = 0.6;
    std::vector<ImageF> data(4, ImageF(1, target));
    TrainConfig cfg;
    cfg.epochs = 100;
    cfg.batch = 4;
    cfg.lr_g = 5e-3;
    cfg.lr_d = 5e-3;
    cfg.latent_dim = 4;
    cfg.h = 1;
    cfg.w = 1;
    cfg.hidden_g = {8};
    cfg.hidden_d = {8};

    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 1, 1, 4, {8}, {8}, 3);
    std::vector<double> err;
    err.push_back(std::fabs(sample_mean(g, 256, 500) - target));
    for (int chunk = 0; chunk < 4; ++chunk) {
        cfg.seed = 100 + static_cast<uint64_t>(chunk);
        train_gan(data, g, d, cfg);
        err.push_back(std::fabs(sample_mean(g, 256, 500) - target));
    }
    INFO("errors ", err[0], " ", err[1], " ", err[2], " ", err[3], " ", err[4]);
    CHECK(err.back() < err.front());
    CHECK(err.back() < 0.5 * err.front());
}

TEST_CASE("training shrinks the histogram gap on a two-point distribution") {
    std::vector<ImageF> data;
    for (int i = 0; i < 100; ++i) data.push_back(ImageF(1, i % 2 ? 0.8 : -0.8));

    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.batch = 16;
    cfg.lr_g = 5e-3;
    cfg.lr_d = 5e-3;
    cfg.latent_dim = 2;
    cfg.h = 1;
    cfg.w = 1;
    cfg.hidden_g = {16};
    cfg.hidden_d = {16};
    cfg.seed = 77;

    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 1, 1, 2, {16}, {16}, 8);

    auto js_vs_data = [&](const GeneratorModel& gen) {
        auto samples = sample_images(gen, 400, 900);
        std::vector<ImageU8> gen_imgs, data_imgs;
        for (const auto& s : samples) gen_imgs.push_back(quantize(s, 1, 1));
        for (const auto& f : data) data_imgs.push_back(quantize(f, 1, 1));
        return estimate_js_images(gen_imgs, data_imgs, 16, JsStatistic::pooled_pixels);
    };

    double before = js_vs_data(g);
    train_gan(data, g, d, cfg);
    double after = js_vs_data(g);
    INFO("js before ", before, " after ", after);
    CHECK(after < before);
}

TEST_CASE("loss goes non-finite -> named error") {
    std::vector<ImageF> data(4, ImageF(4, 0.1));
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch = 2;
    cfg.latent_dim = 3;
    cfg.h = 2;
    cfg.w = 2;
    cfg.hidden_g = {4};
    cfg.hidden_d = {4};

    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 2, 2, 3, {4}, {4}, 1);
    g.net.layers[0].w.v[0] = std::nan("");
    CHECK_THROWS_WITH_AS(train_gan(data, g, d, cfg), doctest::Contains("non-finite"), Error);
}

TEST_CASE("train_gan input validation") {
    std::vector<ImageF> data(2, ImageF(4, 0.0));
    TrainConfig cfg;
    cfg.latent_dim = 3;
    cfg.h = 2;
    cfg.w = 2;
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 2, 2, 3, {4}, {4}, 1);

    std::vector<ImageF> empty;
    CHECK_THROWS_AS(train_gan(empty, g, d, cfg), Error);
    std::vector<ImageF> ragged = {ImageF(4, 0.0), ImageF(5, 0.0)};
    CHECK_THROWS_AS(train_gan(ragged, g, d, cfg), Error);
    TrainConfig wrong = cfg;
    wrong.h = 3;
    CHECK_THROWS_AS(train_gan(data, g, d, wrong), Error);
}

TEST_CASE("checkpoint: bit-exact round trip and distinct failure modes") {
    TempDir td("ckpt");
    GeneratorModel g;
    DiscriminatorModel d;
    init_models(g, d, 4, 4, 6, {12, 10}, {9}, 1234);
    fs::path f = td.p / "m.ckpt";
    save_checkpoint(f.string(), g, d);

    GeneratorModel g2;
    DiscriminatorModel d2;
    load_checkpoint(f.string(), g2, d2);
    CHECK(g2.h == 4);
    CHECK(g2.w == 4);
    CHECK(g2.latent_dim == 6);
    CHECK(all_params(g2.net) == all_params(g.net));
    CHECK(all_params(d2.net) == all_params(d.net));

    std::vector<double> z = {0.1, -0.2, 0.3, -0.4, 0.5, -0.6};
    CHECK(generate(g, z) == generate(g2, z));

    fs::path f2 = td.p / "m2.ckpt";
    save_checkpoint(f2.string(), g2, d2);
    CHECK(slurp(f) == slurp(f2));

    SUBCASE("magic check") {
        std::string blob = slurp(f);
        blob[0] = 'X';
        std::ofstream os(td.p / "bad.ckpt", std::ios::binary);
        os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        os.close();
        GeneratorModel gx;
        DiscriminatorModel dx;
        CHECK_THROWS_WITH_AS(load_checkpoint((td.p / "bad.ckpt").string(), gx, dx),
                             doctest::Contains("magic"), Error);
    }
    SUBCASE("version check") {
        std::string blob = slurp(f);
        blob[4] = 9;  // version field follows the magic
        std::ofstream os(td.p / "ver.ckpt", std::ios::binary);
        os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        os.close();
        GeneratorModel gx;
        DiscriminatorModel dx;
        CHECK_THROWS_WITH_AS(load_checkpoint((td.p / "ver.ckpt").string(), gx, dx),
                             doctest::Contains("version"), Error);
    }
    SUBCASE("truncation names the missing piece") {
        std::string blob = slurp(f);
        blob.resize(blob.size() - 7);
        std::ofstream os(td.p / "cut.ckpt", std::ios::binary);
        os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        os.close();
        GeneratorModel gx;
        DiscriminatorModel dx;
        CHECK_THROWS_WITH_AS(load_checkpoint((td.p / "cut.ckpt").string(), gx, dx),
                             doctest::Contains("truncated"), Error);
    }
    SUBCASE("missing file") {
        GeneratorModel gx;
        DiscriminatorModel dx;
        CHECK_THROWS_AS(load_checkpoint((td.p / "nope.ckpt").string(), gx, dx), Error);
    }
}
