#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/gan.hpp"
#include "gss/grille.hpp"

namespace gss {

struct SearchConfig {
    size_t iterations = 1000;
    double lr = 0.03;
    double lambda = 0.1;       // message-loss weight
    uint64_t seed = 1;
    size_t snapshot_every = 30;  // extraction-accuracy sampling stride; 0 = off
};

struct TrajectoryPoint {
    size_t iter = 0;
    double contextual = 0.0;
    double perceptual = 0.0;
    double message = 0.0;
    double total = 0.0;
    double accuracy_snapshot = -1.0;  // -1 = not sampled this iteration
};

struct SearchResult {
    std::vector<double> z_hat;  // best-loss iterate
    double best_total = 0.0;
    std::vector<TrajectoryPoint> trajectory;
    bool aborted = false;  // non-finite loss cut the run short
};

struct StegoResult {
    ImageU8 stego;
    std::vector<double> z_hat;
    std::vector<TrajectoryPoint> trajectory;
    double accuracy = 0.0;  // extracted vs intended message
};

// L1 over known positions between generated pixels and the carrier.
double contextual_loss(const ImageF& gen, const ImageF& carrier, const CorruptionMask& mask);
double contextual_loss(const GeneratorModel& g, const std::vector<double>& z,
                       const CorruptionMask& mask, const SemiStego& carrier);

// ln(1 - D(gen)) with D clamped to [1e-7, 1-1e-7].
double perceptual_loss(const DiscriminatorModel& d, const ImageF& gen);
double perceptual_loss(const GeneratorModel& g, const DiscriminatorModel& d,
                       const std::vector<double>& z);

// L1 over grille positions between generated pixels and the carrier pixels
// (whose plane BPI already carries the message bits).
double message_loss(const ImageF& gen, const ImageF& carrier, const CardanGrille& grille);

// perceptual + contextual + lambda * message
double total_loss(const GeneratorModel& g, const DiscriminatorModel& d,
                  const std::vector<double>& z, const CorruptionMask& mask,
                  const SemiStego& carrier, const CardanGrille& grille, double lambda);

// d(total_loss)/dz via the composite backward pass (through both nets). The
// perceptual term contributes zero on the discriminator clamp plateau.
std::vector<double> total_loss_grad(const GeneratorModel& g, const DiscriminatorModel& d,
                                    const std::vector<double>& z, const CorruptionMask& mask,
                                    const SemiStego& carrier, const CardanGrille& grille,
                                    double lambda);

// Adam on z with componentwise clip to [-1,1] after every step; returns the
// best-total-loss iterate seen. `m` is the intended message, used only for
// the periodic accuracy snapshots.
SearchResult find_encoding(const GeneratorModel& g, const DiscriminatorModel& d,
                           const SemiStego& carrier, const CardanGrille& grille,
                           const Message& m, const SearchConfig& cfg);

// derive_grille -> expand -> find_encoding -> quantize(G(z_hat)).
StegoResult generate_stego(const GeneratorModel& g, const DiscriminatorModel& d,
                           const Message& m, const ImageU8& base, const CorruptionMask& mask,
                           const GrilleKey& key, const SearchConfig& cfg);

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& traj);

}  // namespace gss
