#include "gss/spam.hpp"

#include <algorithm>

namespace gss {

size_t spam_dim(int t) {
    if (t < 1) throw config_error("spam truncation threshold must be >= 1");
    size_t q = 2 * static_cast<size_t>(t) + 1;
    return 2 * q * q * q;
}

namespace {

struct Dir {
    int dr;
    int dc;
};

// Walks one direction: difference D(p) = I(p) - I(p+step); counts the
// second-order transitions (D(p), D(p+step), D(p+2*step)).
void accumulate_dir(const ImageU8& im, Dir d, int t, std::vector<uint64_t>& counts) {
    const int h = static_cast<int>(im.h);
    const int w = static_cast<int>(im.w);
    const int q = 2 * t + 1;
    auto in_bounds = [&](int r, int c) { return r >= 0 && r < h && c >= 0 && c < w; };
    auto diff = [&](int r, int c) {
        int v = static_cast<int>(im.at(static_cast<size_t>(r), static_cast<size_t>(c))) -
                static_cast<int>(im.at(static_cast<size_t>(r + d.dr),
                                       static_cast<size_t>(c + d.dc)));
        return std::clamp(v, -t, t);
    };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            // need I at p, p+s, p+2s, p+3s for the three consecutive diffs
            int r3 = r + 3 * d.dr, c3 = c + 3 * d.dc;
            if (!in_bounds(r3, c3)) continue;
            int d1 = diff(r, c);
            int d2 = diff(r + d.dr, c + d.dc);
            int d3 = diff(r + 2 * d.dr, c + 2 * d.dc);
            size_t idx = static_cast<size_t>((d1 + t) * q * q + (d2 + t) * q + (d3 + t));
            counts[idx] += 1;
        }
    }
}

// counts -> conditional probabilities P(d3 | d1,d2); empty contexts stay 0.
void normalize_block(const std::vector<uint64_t>& counts, int t, std::vector<double>& probs) {
    const size_t q = 2 * static_cast<size_t>(t) + 1;
    probs.assign(q * q * q, 0.0);
    for (size_t ctx = 0; ctx < q * q; ++ctx) {
        uint64_t total = 0;
        for (size_t k = 0; k < q; ++k) total += counts[ctx * q + k];
        if (total == 0) continue;
        for (size_t k = 0; k < q; ++k)
            probs[ctx * q + k] =
                static_cast<double>(counts[ctx * q + k]) / static_cast<double>(total);
    }
}

}  // namespace

std::vector<double> spam_features(const ImageU8& im, int t) {
    if (t < 1 || t > 8) throw config_error("spam truncation threshold must be in 1..8");
    if (im.w < 3 || im.h < 3) throw dim_error("spam needs at least 3 pixels per axis");

    static const Dir kAxis[4] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};
    static const Dir kDiag[4] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

    const size_t q = 2 * static_cast<size_t>(t) + 1;
    const size_t block = q * q * q;
    std::vector<double> feats(2 * block, 0.0);
    std::vector<uint64_t> counts(block);
    std::vector<double> probs;

    for (int group = 0; group < 2; ++group) {
        const Dir* dirs = group == 0 ? kAxis : kDiag;
        for (int di = 0; di < 4; ++di) {
            std::fill(counts.begin(), counts.end(), 0);
            accumulate_dir(im, dirs[di], t, counts);
            normalize_block(counts, t, probs);
            for (size_t i = 0; i < block; ++i)
                feats[static_cast<size_t>(group) * block + i] += probs[i] / 4.0;
        }
    }
    return feats;
}

}  // namespace gss
