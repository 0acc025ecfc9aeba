#pragma once

#include "etuq/tensor.hpp"

#include <iosfwd>
#include <string>

namespace etuq {

// Container layout (version 1), shared by both encodings:
//   dims   : I_1..I_N
//   ranks  : R_0..R_N
//   cores  : per core, R_{n-1} * I_n * R_n doubles in row-major (a, i, b)
//
// Binary: magic "ETUQTT01", uint32 version, uint32 reserved, uint64 N,
// N uint64 dims, N+1 uint64 ranks, then all core payloads; little-endian.

inline constexpr int kTTFormatVersion = 1;

std::string tt_to_json(const TTTensor& tt);
TTTensor tt_from_json(const std::string& text);

void write_tt_binary(std::ostream& out, const TTTensor& tt);
TTTensor read_tt_binary(std::istream& in);

} // namespace etuq
