#include "gss/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gss/checkpoint.hpp"

namespace gss {

uint8_t quantize_value(double f) {
    double scaled = (f + 1.0) / 2.0 * 255.0;
    double r = std::round(scaled);  // halves away from zero
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    return static_cast<uint8_t>(r);
}

double dequantize_value(uint8_t u) { return 2.0 * static_cast<double>(u) / 255.0 - 1.0; }

ImageU8 quantize(const std::vector<double>& f, size_t w, size_t h) {
    if (f.size() != w * h) throw dim_error("quantize: value count != w*h");
    ImageU8 im = ImageU8::make(w, h);
    for (size_t i = 0; i < f.size(); ++i) im.px[i] = quantize_value(f[i]);
    return im;
}

std::vector<double> dequantize(const ImageU8& im) {
    std::vector<double> f(im.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = dequantize_value(im.px[i]);
    return f;
}

namespace {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
long pgm_token(std::FILE* fp, const std::string& path, const char* what) {
    int c = std::fgetc(fp);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(fp);
        } else if (std::isspace(c)) {
            c = std::fgetc(fp);
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c))
        throw format_error(path + ": malformed PGM header (bad " + std::string(what) + ")");
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1 << 30) throw format_error(path + ": PGM header value out of range");
        c = std::fgetc(fp);
    }
    if (c != EOF) std::ungetc(c, fp);
    return v;
}

struct FileCloser {
    std::FILE* fp;
    ~FileCloser() {
        if (fp) std::fclose(fp);
    }
};

}  // namespace

ImageU8 read_pgm(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw io_error("cannot open " + path);
    FileCloser closer{fp};

    int m0 = std::fgetc(fp), m1 = std::fgetc(fp);
    if (m0 != 'P' || m1 != '5') throw format_error(path + ": not a binary PGM (missing P5)");
    long w = pgm_token(fp, path, "width");
    long h = pgm_token(fp, path, "height");
    long maxval = pgm_token(fp, path, "maxval");
    if (w <= 0 || h <= 0) throw format_error(path + ": non-positive PGM dimensions");
    if (maxval != 255)
        throw format_error(path + ": unsupported maxval " + std::to_string(maxval) +
                           " (only 255)");
    int sep = std::fgetc(fp);
    if (sep == EOF || !std::isspace(sep))
        throw format_error(path + ": malformed PGM header (missing separator)");

    ImageU8 im = ImageU8::make(static_cast<size_t>(w), static_cast<size_t>(h));
    size_t got = std::fread(im.px.data(), 1, im.px.size(), fp);
    if (got != im.px.size())
        throw format_error(path + ": truncated PGM payload (" + std::to_string(got) + " of " +
                           std::to_string(im.px.size()) + " bytes)");
    return im;
}

void write_pgm(const std::string& path, const ImageU8& im) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw io_error("cannot write " + path);
    FileCloser closer{fp};
    std::fprintf(fp, "P5\n%zu %zu\n255\n", im.w, im.h);
    if (std::fwrite(im.px.data(), 1, im.px.size(), fp) != im.px.size())
        throw io_error("short write to " + path);
}

std::vector<uint8_t> read_bits(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open " + path);
    uint64_t n = read_u64(is, "bit count in " + path);
    size_t nbytes = static_cast<size_t>((n + 7) / 8);
    std::vector<char> packed(nbytes);
    is.read(packed.data(), static_cast<std::streamsize>(nbytes));
    if (static_cast<size_t>(is.gcount()) != nbytes)
        throw format_error(path + ": truncated bit payload");
    std::vector<uint8_t> bits(static_cast<size_t>(n));
    for (size_t i = 0; i < bits.size(); ++i) {
        uint8_t byte = static_cast<uint8_t>(packed[i / 8]);
        bits[i] = (byte >> (7 - i % 8)) & 1u;
    }
    return bits;
}

void write_bits(const std::string& path, const std::vector<uint8_t>& bits) {
    std::vector<char> packed((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1) throw config_error("bits must be 0 or 1");
        if (bits[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (7 - i % 8)));
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    write_u64(os, bits.size());
    os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (!os) throw io_error("short write to " + path);
}

}  // namespace gss
