#include "gss/checkpoint.hpp"

#include <cstring>
#include <istream>
#include <ostream>

#include "gss/error.hpp"

namespace gss {

static void write_bytes_le(std::ostream& os, const void* p, size_t n) {
    // Host is little-endian on every platform this builds for; memcpy through
    // a byte buffer keeps the aliasing rules happy.
    char buf[8];
    std::memcpy(buf, p, n);
    os.write(buf, static_cast<std::streamsize>(n));
}

static void read_bytes(std::istream& is, void* p, size_t n, const std::string& what) {
    char buf[8];
    is.read(buf, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(is.gcount()) != n)
        throw format_error("checkpoint truncated while reading " + what);
    std::memcpy(p, buf, n);
}

void write_u32(std::ostream& os, uint32_t v) { write_bytes_le(os, &v, 4); }
void write_u64(std::ostream& os, uint64_t v) { write_bytes_le(os, &v, 8); }
void write_f64(std::ostream& os, double v) { write_bytes_le(os, &v, 8); }

uint32_t read_u32(std::istream& is, const std::string& what) {
    uint32_t v;
    read_bytes(is, &v, 4, what);
    return v;
}

uint64_t read_u64(std::istream& is, const std::string& what) {
    uint64_t v;
    read_bytes(is, &v, 8, what);
    return v;
}

double read_f64(std::istream& is, const std::string& what) {
    double v;
    read_bytes(is, &v, 8, what);
    return v;
}

void write_net(std::ostream& os, const Net& net) {
    write_u32(os, static_cast<uint32_t>(net.specs.size()));
    for (const auto& s : net.specs) {
        write_u32(os, static_cast<uint32_t>(s.in));
        write_u32(os, static_cast<uint32_t>(s.out));
        write_u32(os, s.has_act ? 1u : 0u);
        write_u32(os, static_cast<uint32_t>(s.act));
        write_f64(os, s.act_slope);
    }
    for (const auto& l : net.layers) {
        for (double x : l.w.v) write_f64(os, x);
        for (double x : l.b.v) write_f64(os, x);
    }
}

Net read_net(std::istream& is) {
    uint32_t n = read_u32(is, "layer count");
    if (n == 0 || n > 64) throw format_error("checkpoint layer count out of range");
    Net net;
    net.specs.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        LayerSpec s;
        s.in = read_u32(is, "layer in dim");
        s.out = read_u32(is, "layer out dim");
        if (s.in == 0 || s.out == 0) throw format_error("checkpoint layer dim is zero");
        s.has_act = read_u32(is, "activation flag") != 0;
        uint32_t code = read_u32(is, "activation code");
        if (code > 2) throw format_error("unknown activation code " + std::to_string(code));
        s.act = static_cast<Act>(code);
        s.act_slope = read_f64(is, "activation slope");
        net.specs.push_back(s);
    }
    for (size_t i = 0; i + 1 < net.specs.size(); ++i)
        if (net.specs[i].out != net.specs[i + 1].in)
            throw format_error("checkpoint layer dims do not chain");
    net.layers.reserve(n);
    for (const auto& s : net.specs) {
        DenseLayer l;
        l.w = Tensor::zeros({s.out, s.in});
        l.b = Tensor::zeros({s.out});
        for (double& x : l.w.v) x = read_f64(is, "weight");
        for (double& x : l.b.v) x = read_f64(is, "bias");
        net.layers.push_back(std::move(l));
    }
    return net;
}

}  // namespace gss
