#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "gss/net.hpp"

namespace gss {

// Little-endian primitives for the "GSS1" checkpoint format. Reads throw
// format_error on truncation; values round-trip bit-exactly.
void write_u32(std::ostream& os, uint32_t v);
void write_u64(std::ostream& os, uint64_t v);
void write_f64(std::ostream& os, double v);
uint32_t read_u32(std::istream& is, const std::string& what);
uint64_t read_u64(std::istream& is, const std::string& what);
double read_f64(std::istream& is, const std::string& what);

// Net block: layer count, per-layer spec (in, out, has_act, act code, slope),
// then parameters in declaration order (per layer: w row-major, then b).
void write_net(std::ostream& os, const Net& net);
Net read_net(std::istream& is);

}  // namespace gss
