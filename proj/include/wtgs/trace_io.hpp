#pragma once

#include <string>

#include "wtgs/samplers.hpp"

namespace wtgs {

// Hex packing of an inclusion vector: hex digit k encodes coordinates
// 4k..4k+3, coordinate 4k+b contributing bit b. Length is ceil(P/4).
std::string pack_gamma_hex(const std::uint8_t* gamma, int P);
GammaVec unpack_gamma_hex(const std::string& hex, int P);

// Columnar CSV: a '#' metadata line (P, T, t_burn, gamma0), a header, then one
// row per iteration: t,q,flipped,rho_tilde_log,gamma_hex. Conditionals and
// subsets are in-memory quantities and are not serialized.
void write_trace_csv(const SamplerTrace& trace, const std::string& path);

// Little-endian binary journal with the same per-iteration content:
//   magic "WTGSTRC1", u32 P, u64 T, u64 t_burn, gamma0 packed bits,
//   then per iteration: u8 q, i32 flipped, f64 rho_tilde_log, packed bits
//   (ceil(P/8) bytes, coordinate j at byte j/8 bit j%8).
void write_trace_journal(const SamplerTrace& trace, const std::string& path);
SamplerTrace read_trace_journal(const std::string& path);

}  // namespace wtgs
