#include "gss/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gss/rng.hpp"

namespace fs = std::filesystem;

namespace gss {

SynthKind synth_kind_from_name(const std::string& name) {
    if (name == "gradients") return SynthKind::gradients;
    if (name == "blobs") return SynthKind::blobs;
    if (name == "stripes") return SynthKind::stripes;
    throw config_error("unknown dataset kind '" + name + "' (gradients|blobs|stripes)");
}

std::string synth_kind_name(SynthKind k) {
    switch (k) {
        case SynthKind::gradients: return "gradients";
        case SynthKind::blobs: return "blobs";
        case SynthKind::stripes: return "stripes";
    }
    return "?";
}

MaskKind mask_kind_from_name(const std::string& name) {
    if (name == "pattern20") return MaskKind::pattern20;
    if (name == "strips50") return MaskKind::strips50;
    if (name == "random90") return MaskKind::random90;
    throw config_error("unknown mask kind '" + name + "' (pattern20|strips50|random90)");
}

std::string mask_kind_name(MaskKind k) {
    switch (k) {
        case MaskKind::pattern20: return "pattern20";
        case MaskKind::strips50: return "strips50";
        case MaskKind::random90: return "random90";
    }
    return "?";
}

namespace {

// Stretches arbitrary real-valued fields onto the full 0..255 range.
ImageU8 normalize_to_u8(const std::vector<double>& f, size_t w, size_t h) {
    double lo = f[0], hi = f[0];
    for (double x : f) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    double span = hi - lo;
    if (span < 1e-12) span = 1.0;
    ImageU8 im = ImageU8::make(w, h);
    for (size_t i = 0; i < f.size(); ++i)
        im.px[i] = static_cast<uint8_t>(std::lround((f[i] - lo) / span * 255.0));
    return im;
}

ImageU8 synth_one(SynthKind kind, size_t h, size_t w, Rng& rng) {
    std::vector<double> f(w * h, 0.0);
    double cx = (static_cast<double>(w) - 1.0) / 2.0;
    double cy = (static_cast<double>(h) - 1.0) / 2.0;
    switch (kind) {
        case SynthKind::gradients: {
            double theta = rng.uniform(0.0, 2.0 * M_PI);
            double dx = std::cos(theta), dy = std::sin(theta);
            double bow = rng.uniform(-0.4, 0.4);  // mild curvature so images aren't pure planes
            for (size_t y = 0; y < h; ++y)
                for (size_t x = 0; x < w; ++x) {
                    double u = (static_cast<double>(x) - cx) * dx +
                               (static_cast<double>(y) - cy) * dy;
                    f[y * w + x] = u + bow * u * u / static_cast<double>(w);
                }
            break;
        }
        case SynthKind::blobs: {
            size_t k = 2 + static_cast<size_t>(rng.bounded(4));  // 2..5 blobs
            for (size_t b = 0; b < k; ++b) {
                double bx = rng.uniform(0.0, static_cast<double>(w) - 1.0);
                double by = rng.uniform(0.0, static_cast<double>(h) - 1.0);
                double sx = rng.uniform(static_cast<double>(w) / 10.0,
                                        static_cast<double>(w) / 3.0);
                double sy = rng.uniform(static_cast<double>(h) / 10.0,
                                        static_cast<double>(h) / 3.0);
                double amp = rng.uniform(0.4, 1.0) * (rng.bounded(2) ? 1.0 : -1.0);
                for (size_t y = 0; y < h; ++y)
                    for (size_t x = 0; x < w; ++x) {
                        double ddx = (static_cast<double>(x) - bx) / sx;
                        double ddy = (static_cast<double>(y) - by) / sy;
                        f[y * w + x] += amp * std::exp(-0.5 * (ddx * ddx + ddy * ddy));
                    }
            }
            break;
        }
        case SynthKind::stripes: {
            double theta = rng.uniform(0.0, M_PI);
            double period = rng.uniform(static_cast<double>(w) / 8.0,
                                        static_cast<double>(w) / 2.0);
            double phase = rng.uniform(0.0, 2.0 * M_PI);
            double kx = std::cos(theta) * 2.0 * M_PI / period;
            double ky = std::sin(theta) * 2.0 * M_PI / period;
            for (size_t y = 0; y < h; ++y)
                for (size_t x = 0; x < w; ++x)
                    f[y * w + x] = std::sin(kx * static_cast<double>(x) +
                                            ky * static_cast<double>(y) + phase);
            break;
        }
    }
    return normalize_to_u8(f, w, h);
}

size_t stable_floor(double x) { return static_cast<size_t>(std::floor(x + 1e-9)); }

}  // namespace

Dataset gen_synthetic_dataset(SynthKind kind, size_t n, size_t h, size_t w, uint64_t seed) {
    if (n == 0) throw config_error("dataset size must be >= 1");
    if (h == 0 || w == 0) throw dim_error("dataset dims must be positive");
    Dataset ds;
    ds.tag = synth_kind_name(kind);
    ds.seed = seed;
    ds.images.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, i);
        ds.images.push_back(synth_one(kind, h, w, rng));
    }
    return ds;
}

CorruptionMask gen_corruption_mask(MaskKind kind, size_t h, size_t w, uint64_t seed,
                                   double missing_override) {
    if (h == 0 || w == 0) throw dim_error("mask dims must be positive");
    if (missing_override < 0.0 || missing_override >= 1.0)
        throw config_error("missing fraction must be in [0,1)");
    size_t total = h * w;
    Rng rng(seed);
    CorruptionMask mk = CorruptionMask::make(w, h, 1);

    switch (kind) {
        case MaskKind::pattern20: {
            double target = missing_override > 0.0 ? missing_override : 0.20;
            size_t want = static_cast<size_t>(std::ceil(target * static_cast<double>(total)));
            size_t missing = 0;
            while (missing < want) {
                size_t rw = 1 + rng.bounded(std::max<uint64_t>(1, w / 4));
                size_t rh = 1 + rng.bounded(std::max<uint64_t>(1, h / 4));
                size_t x0 = rng.bounded(w - rw + 1);
                size_t y0 = rng.bounded(h - rh + 1);
                for (size_t y = y0; y < y0 + rh; ++y)
                    for (size_t x = x0; x < x0 + rw; ++x) {
                        uint8_t& cell = mk.m[y * w + x];
                        if (cell) {
                            cell = 0;
                            ++missing;
                        }
                    }
            }
            break;
        }
        case MaskKind::strips50: {
            double target = missing_override > 0.0 ? missing_override : 0.50;
            size_t want = static_cast<size_t>(std::ceil(target * static_cast<double>(total)));
            size_t missing = 0;
            while (missing < want) {
                bool row = rng.bounded(2) == 0;
                if (row) {
                    size_t y = rng.bounded(h);
                    for (size_t x = 0; x < w; ++x) {
                        uint8_t& cell = mk.m[y * w + x];
                        if (cell) {
                            cell = 0;
                            ++missing;
                        }
                    }
                } else {
                    size_t x = rng.bounded(w);
                    for (size_t y = 0; y < h; ++y) {
                        uint8_t& cell = mk.m[y * w + x];
                        if (cell) {
                            cell = 0;
                            ++missing;
                        }
                    }
                }
            }
            break;
        }
        case MaskKind::random90: {
            double target = missing_override > 0.0 ? missing_override : 0.90;
            size_t miss = stable_floor(target * static_cast<double>(total));
            std::vector<uint32_t> idx(total);
            for (size_t i = 0; i < total; ++i) idx[i] = static_cast<uint32_t>(i);
            rng.shuffle(idx);
            for (size_t i = 0; i < miss; ++i) mk.m[idx[i]] = 0;
            break;
        }
    }
    if (mk.popcount() == 0) throw capacity_error("mask came out with no known pixels");
    return mk;
}

Dataset load_image_dir(const std::string& path) {
    if (!fs::is_directory(path)) throw io_error(path + " is not a directory");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(path)) {
        if (e.is_regular_file() && e.path().extension() == ".pgm")
            files.push_back(e.path().string());
    }
    if (files.empty()) throw io_error("no .pgm files in " + path);
    std::sort(files.begin(), files.end());
    Dataset ds;
    ds.tag = path;
    for (const auto& f : files) {
        ImageU8 im = read_pgm(f);
        if (!ds.images.empty() && (im.w != ds.w() || im.h != ds.h()))
            throw dim_error(f + ": image dimensions differ from earlier images in " + path);
        ds.images.push_back(std::move(im));
    }
    return ds;
}

void save_dataset(const std::string& dir, const Dataset& ds) {
    if (ds.images.empty()) throw io_error("refusing to save empty dataset");
    fs::create_directories(dir);
    std::ofstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw io_error("cannot write manifest in " + dir);
    man << "kind=" << ds.tag << "\n"
        << "seed=" << ds.seed << "\n"
        << "count=" << ds.images.size() << "\n"
        << "height=" << ds.h() << "\n"
        << "width=" << ds.w() << "\n";
    char name[32];
    for (size_t i = 0; i < ds.images.size(); ++i) {
        std::snprintf(name, sizeof(name), "img_%04zu.pgm", i);
        write_pgm((fs::path(dir) / name).string(), ds.images[i]);
        man << name << "\n";
    }
}

}  // namespace gss
