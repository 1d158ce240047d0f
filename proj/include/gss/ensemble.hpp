#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/image.hpp"

namespace gss {

enum class Label : uint8_t { cover = 0, stego = 1 };

// One Fisher discriminant over a random feature subspace: vote stego when
// w . x[subspace] > threshold.
struct BaseLearner {
    std::vector<uint32_t> subspace;
    std::vector<double> w;
    double threshold = 0.0;
};

struct EnsembleModel {
    size_t dim = 0;
    std::vector<BaseLearner> learners;
    uint64_t seed = 0;

    size_t l() const { return learners.size(); }
};

struct PeReport {
    double p_fa = 0.0;
    double p_md = 0.0;
    double p_e = 0.0;
    size_t n_cover = 0;
    size_t n_stego = 0;
};

// Trains L subspace FLDs; each learner's threshold minimizes
// (P_FA+P_MD)/2 on the training data. Singular scatter is handled by
// escalating ridge regularization starting at 1e-6*I.
EnsembleModel train_ensemble(const std::vector<std::vector<double>>& cover_feats,
                             const std::vector<std::vector<double>>& stego_feats, size_t l,
                             size_t d_sub, uint64_t seed);

size_t default_subspace_dim(size_t feature_dim);  // min(200, dim-1)

// Majority vote: stego iff strictly more than L/2 learners say stego.
Label ensemble_classify(const EnsembleModel& model, const std::vector<double>& feats);

PeReport compute_pe(const std::vector<Label>& predictions, const std::vector<Label>& truth);

// Overwrites the LSB of a seeded payload_bpp fraction of pixels with random
// bits; payload 0 returns the image unchanged.
ImageU8 lsb_embed_baseline(const ImageU8& im, double payload_bpp, uint64_t seed);

// Random 50/50 train/test splits (default 10), each split trains a fresh
// ensemble and scores the held-out half; returns the mean report and fills
// per_split when non-null.
PeReport split_protocol(const std::vector<std::vector<double>>& cover_feats,
                        const std::vector<std::vector<double>>& stego_feats, size_t l,
                        size_t d_sub, uint64_t seed, size_t splits = 10,
                        std::vector<PeReport>* per_split = nullptr);

std::string render_pe_report(const PeReport& r);

// CSV with one row per image: feature columns then a label column (0/1).
std::string features_to_csv(const std::vector<std::vector<double>>& feats,
                            const std::vector<Label>& labels);

}  // namespace gss
