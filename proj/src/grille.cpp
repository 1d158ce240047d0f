#include "gss/grille.hpp"

#include <cmath>

#include "gss/rng.hpp"

namespace gss {

// floor with a nudge so values like 0.05*900 that land on an integer in exact
// arithmetic don't get knocked down by representation error.
static size_t stable_floor(double x) {
    return static_cast<size_t>(std::floor(x + 1e-9));
}

CardanGrille derive_grille(const GrilleKey& key, const CorruptionMask& mask) {
    if (key.seed.empty()) throw config_error("grille key seed is empty");
    if (!(key.rho > 0.0) || key.rho > 1.0) throw config_error("grille density must be in (0,1]");
    if (key.bpi < 1 || key.bpi > 8) throw config_error("bit plane index must be in 1..8");

    std::vector<uint32_t> known;
    known.reserve(mask.m.size());
    for (size_t i = 0; i < mask.m.size(); ++i)
        if (mask.m[i]) known.push_back(static_cast<uint32_t>(i));
    if (known.empty()) throw capacity_error("mask has no known pixels");

    size_t ones = stable_floor(key.rho * static_cast<double>(known.size()));
    if (ones < 1) throw capacity_error("grille density too low: zero positions selected");

    Rng rng(hash_bytes({key.seed.data(), key.seed.size()}));
    rng.shuffle(known);

    CardanGrille g;
    g.w = mask.w;
    g.h = mask.h;
    g.c.assign(mask.m.size(), 0);
    g.bpi = key.bpi;
    for (size_t i = 0; i < ones; ++i) g.c[known[i]] = 1;
    return g;
}

uint8_t set_bit_plane(uint8_t pixel, int bpi, int bit) {
    if (bpi < 1 || bpi > 8) throw config_error("bit plane index must be in 1..8");
    if (bit != 0 && bit != 1) throw config_error("bit must be 0 or 1");
    uint8_t mask = static_cast<uint8_t>(1u << (bpi - 1));
    return bit ? static_cast<uint8_t>(pixel | mask) : static_cast<uint8_t>(pixel & ~mask);
}

SemiStego expand(const Message& m, const ImageU8& base, const CorruptionMask& mask,
                 const CardanGrille& grille) {
    if (base.w != mask.w || base.h != mask.h) throw dim_error("expand: base/mask dims differ");
    if (grille.w != mask.w || grille.h != mask.h)
        throw dim_error("expand: grille/mask dims differ");
    size_t cap = grille.popcount();
    if (m.bits.size() > cap)
        throw capacity_error("message of " + std::to_string(m.bits.size()) +
                             " bits exceeds grille capacity of " + std::to_string(cap) +
                             " bits");

    SemiStego out;
    out.mask = mask;
    out.image = ImageU8::make(base.w, base.h);
    size_t bit_idx = 0;
    for (size_t i = 0; i < base.px.size(); ++i) {
        if (!mask.m[i]) continue;  // missing region stays 0
        uint8_t p = base.px[i];
        if (grille.c[i] && bit_idx < m.bits.size())
            p = set_bit_plane(p, grille.bpi, m.bits[bit_idx++] & 1);
        out.image.px[i] = p;  // grille positions past the message end keep base bits
    }
    return out;
}

Message extract(const ImageU8& image, const CardanGrille& grille) {
    if (image.w != grille.w || image.h != grille.h)
        throw dim_error("extract: image/grille dims differ");
    Message m;
    m.bits.reserve(grille.popcount());
    for (size_t i = 0; i < image.px.size(); ++i)
        if (grille.c[i]) m.bits.push_back((image.px[i] >> (grille.bpi - 1)) & 1u);
    return m;
}

size_t capacity(const CardanGrille& grille) { return grille.popcount(); }

CorruptionMask mask_from_image(const ImageU8& im) {
    CorruptionMask mk;
    mk.w = im.w;
    mk.h = im.h;
    mk.m.resize(im.px.size());
    for (size_t i = 0; i < im.px.size(); ++i) {
        if (im.px[i] != 0 && im.px[i] != 255)
            throw format_error("mask image pixels must be 0 or 255");
        mk.m[i] = im.px[i] ? 1 : 0;
    }
    return mk;
}

ImageU8 mask_to_image(const CorruptionMask& mask) {
    ImageU8 im = ImageU8::make(mask.w, mask.h);
    for (size_t i = 0; i < mask.m.size(); ++i) im.px[i] = mask.m[i] ? 255 : 0;
    return im;
}

CardanGrille grille_from_image(const ImageU8& im, int bpi) {
    if (bpi < 1 || bpi > 8) throw config_error("bit plane index must be in 1..8");
    CardanGrille g;
    g.w = im.w;
    g.h = im.h;
    g.bpi = bpi;
    g.c.resize(im.px.size());
    for (size_t i = 0; i < im.px.size(); ++i) {
        if (im.px[i] != 0 && im.px[i] != 255)
            throw format_error("grille image pixels must be 0 or 255");
        g.c[i] = im.px[i] ? 1 : 0;
    }
    return g;
}

ImageU8 grille_to_image(const CardanGrille& grille) {
    ImageU8 im = ImageU8::make(grille.w, grille.h);
    for (size_t i = 0; i < grille.c.size(); ++i) im.px[i] = grille.c[i] ? 255 : 0;
    return im;
}

}  // namespace gss
