#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/image.hpp"

namespace gss {

// Binary H×W matrix; 1 = known/keep, 0 = missing.
struct CorruptionMask {
    size_t w = 0;
    size_t h = 0;
    std::vector<uint8_t> m;  // 0/1

    static CorruptionMask make(size_t w, size_t h, uint8_t fill = 1) {
        if (w == 0 || h == 0) throw dim_error("mask dims must be positive");
        CorruptionMask mk;
        mk.w = w;
        mk.h = h;
        mk.m.assign(w * h, fill ? 1 : 0);
        return mk;
    }
    size_t popcount() const {
        size_t n = 0;
        for (uint8_t x : m) n += x;
        return n;
    }
};

// Key-derived bit-position matrix; ones always lie inside the paired mask.
struct CardanGrille {
    size_t w = 0;
    size_t h = 0;
    std::vector<uint8_t> c;  // 0/1
    int bpi = 1;             // bit plane index, 1 = LSB .. 8 = MSB

    size_t popcount() const {
        size_t n = 0;
        for (uint8_t x : c) n += x;
        return n;
    }
};

struct GrilleKey {
    std::vector<uint8_t> seed;  // nonempty secret bytes
    double rho = 0.5;           // requested density in (0,1]
    int bpi = 1;
};

struct Message {
    std::vector<uint8_t> bits;  // each 0/1
};

// Image with the missing region zeroed; grille positions carry message bits
// in plane bpi.
struct SemiStego {
    ImageU8 image;
    CorruptionMask mask;
};

// Keyed shuffle of the known positions; the first floor(rho*popcount(M)) of
// them become grille ones.
CardanGrille derive_grille(const GrilleKey& key, const CorruptionMask& mask);

// Forces bit (bpi-1) of the pixel to `bit`, leaving the rest alone.
uint8_t set_bit_plane(uint8_t pixel, int bpi, int bit);

SemiStego expand(const Message& m, const ImageU8& base, const CorruptionMask& mask,
                 const CardanGrille& grille);

// Reads plane bpi at grille positions row-major; caller truncates to the
// declared message length.
Message extract(const ImageU8& image, const CardanGrille& grille);

size_t capacity(const CardanGrille& grille);

// PGM bridging: 255 = one, 0 = zero.
CorruptionMask mask_from_image(const ImageU8& im);
ImageU8 mask_to_image(const CorruptionMask& mask);
CardanGrille grille_from_image(const ImageU8& im, int bpi);
ImageU8 grille_to_image(const CardanGrille& grille);

}  // namespace gss
