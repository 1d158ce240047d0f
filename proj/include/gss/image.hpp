#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gss/error.hpp"

namespace gss {

// Grayscale 8-bit image, row-major.
struct ImageU8 {
    size_t w = 0;
    size_t h = 0;
    std::vector<uint8_t> px;

    static ImageU8 make(size_t w, size_t h, uint8_t fill = 0) {
        if (w == 0 || h == 0) throw dim_error("image dims must be positive");
        ImageU8 im;
        im.w = w;
        im.h = h;
        im.px.assign(w * h, fill);
        return im;
    }
    size_t size() const { return px.size(); }
    uint8_t& at(size_t y, size_t x) { return px[y * w + x]; }
    uint8_t at(size_t y, size_t x) const { return px[y * w + x]; }
};

// [-1,1] float value -> byte: round((f+1)/2 * 255) half away from zero,
// clipped to [0,255]. Inverse maps back into [-1,1] on the 255-step grid.
uint8_t quantize_value(double f);
double dequantize_value(uint8_t u);

ImageU8 quantize(const std::vector<double>& f, size_t w, size_t h);
std::vector<double> dequantize(const ImageU8& im);

// Binary PGM (P5), maxval 255 only. '#' comments in the header are honored.
ImageU8 read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ImageU8& im);

// Message file: u64 LE bit count, then the bits packed MSB-first.
std::vector<uint8_t> read_bits(const std::string& path);
void write_bits(const std::string& path, const std::vector<uint8_t>& bits);

}  // namespace gss
