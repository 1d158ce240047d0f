#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/net.hpp"

namespace gss {

// Flat [-1,1] pixel vector, row-major, length h*w.
using ImageF = std::vector<double>;

struct GeneratorModel {
    Net net;  // latent -> h*w, tanh output
    size_t h = 0;
    size_t w = 0;
    size_t latent_dim = 0;
};

struct DiscriminatorModel {
    Net net;  // h*w -> 1, sigmoid output
};

struct TrainConfig {
    size_t epochs = 20;
    size_t batch = 32;
    double lr_g = 2e-4;
    double lr_d = 2e-4;
    size_t latent_dim = 100;
    size_t h = 32;
    size_t w = 32;
    std::vector<size_t> hidden_g = {128};
    std::vector<size_t> hidden_d = {128};
    uint64_t seed = 1;
};

struct TrainRecord {
    size_t epoch = 0;
    double g_loss = 0.0;       // mean ln(1 - D(G(z))), the saturating objective
    double d_loss = 0.0;       // mean -[ln D(x) + ln(1 - D(G(z)))]
    double d_real_mean = 0.0;
    double d_fake_mean = 0.0;
    double js_proxy = 0.0;     // JS estimate implied by D's value function, in bits
};

struct TrainLog {
    std::vector<TrainRecord> records;
    std::string to_csv() const;
};

// Hidden layers use leaky-relu(0.2); generator ends in tanh, discriminator in
// sigmoid. Deterministic per seed.
void init_models(GeneratorModel& g, DiscriminatorModel& d, size_t h, size_t w,
                 size_t latent_dim, const std::vector<size_t>& hidden_g,
                 const std::vector<size_t>& hidden_d, uint64_t seed);

// Alternating updates, one discriminator step per generator step. `data`
// holds [-1,1] pixel vectors of length h*w. Models must match config dims.
TrainLog train_gan(const std::vector<ImageF>& data, GeneratorModel& g, DiscriminatorModel& d,
                   const TrainConfig& cfg);

// Convenience: init + train.
TrainLog train_gan(const std::vector<ImageF>& data, const TrainConfig& cfg, GeneratorModel& g,
                   DiscriminatorModel& d);

std::vector<ImageF> sample_images(const GeneratorModel& g, size_t n, uint64_t seed);

// Single forward pass for one latent vector.
ImageF generate(const GeneratorModel& g, const std::vector<double>& z);

// "GSS1" checkpoint: magic, version, dims, then both nets. Bit-exact.
void save_checkpoint(const std::string& path, const GeneratorModel& g,
                     const DiscriminatorModel& d);
void load_checkpoint(const std::string& path, GeneratorModel& g, DiscriminatorModel& d);

}  // namespace gss
