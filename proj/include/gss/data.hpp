#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/grille.hpp"
#include "gss/image.hpp"

namespace gss {

struct Dataset {
    std::vector<ImageU8> images;  // uniform dims, nonempty
    std::string tag;              // synthetic kind or source path
    uint64_t seed = 0;

    size_t w() const { return images.empty() ? 0 : images.front().w; }
    size_t h() const { return images.empty() ? 0 : images.front().h; }
};

enum class SynthKind { gradients, blobs, stripes };
enum class MaskKind { pattern20, strips50, random90 };

SynthKind synth_kind_from_name(const std::string& name);
std::string synth_kind_name(SynthKind k);
MaskKind mask_kind_from_name(const std::string& name);
std::string mask_kind_name(MaskKind k);

// Deterministic per (kind, n, dims, seed); image i uses substream i.
Dataset gen_synthetic_dataset(SynthKind kind, size_t n, size_t h, size_t w, uint64_t seed);

// pattern20: random rectangles unioned until missing >= 20%.
// strips50:  random full rows/columns unioned until missing >= 50%.
// random90:  exactly floor(0.9*H*W) missing positions via seeded shuffle.
// missing_override > 0 replaces the kind's target fraction.
CorruptionMask gen_corruption_mask(MaskKind kind, size_t h, size_t w, uint64_t seed,
                                   double missing_override = 0.0);

// Loads every *.pgm in the directory (sorted by name). Throws io_error when
// none are found or dims are mixed.
Dataset load_image_dir(const std::string& path);

// Writes img_NNNN.pgm files plus manifest.txt recording parameters and paths.
void save_dataset(const std::string& dir, const Dataset& ds);

}  // namespace gss
