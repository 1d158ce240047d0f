#pragma once

#include <cstdint>
#include <vector>

#include "gss/image.hpp"

namespace gss {

// Second-order SPAM features: adjacent-pixel differences truncated to
// [-T,T], Markov transition probabilities P(d3 | d1,d2) along 8 directions,
// averaged into an axis-aligned group and a diagonal group. Dimension is
// 2*(2T+1)^3 — 686 at T=3. Cell order within a group: d1-major, then d2,
// then d3, each offset by +T.
std::vector<double> spam_features(const ImageU8& im, int t = 3);

size_t spam_dim(int t);

}  // namespace gss
