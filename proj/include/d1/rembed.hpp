#pragma once

#include "d1/oracle.hpp"
#include "d1/rational.hpp"

#include <optional>
#include <vector>

namespace d1 {

// Decoding side of the Turing-degree embedding R. The encoder is
// Bitstream::r_embed; a bit m of the source occupies the arithmetic
// progression {(2k+1) * 2^m}, so any oracle answering a density-1 set of
// positions must eventually answer one of them.

// First answered position of the form (2k+1)*2^m decides bit m. Probes
// are dovetailed with fuel: level t probes k = 0..t at fuel t. Throws
// oracle-integrity error if two probes at the deciding level disagree
// (impossible for sound oracles).
std::optional<bool> decode_r_bit(const PartialOracle& o, std::size_t m, const Nat& fuel);

// decode_r_bit for each m < count; unresolved positions stay nullopt.
std::vector<std::optional<bool>> decode_r_prefix(const PartialOracle& o, std::size_t count,
                                                 const Nat& fuel);

} // namespace d1
