// Line codes for inductive-coupling links: NRZ levels, bi-phase pulses, and
// the 3-bit-to-2-symbol ternary code.
//
// The ternary map takes each bit triplet b = 4*b2 + 2*b1 + b0 (MSB first),
// shifts it off zero (v = b-4 for b <= 3, v = b-3 for b >= 4, so
// v in {-4..-1, +1..+4}) and writes v as two balanced-ternary digits
// (d1, d0) with v = 3*d1 + d0.  The shift makes the map bijective onto the
// eight nonzero digit pairs, so (0,0) is never emitted and every aligned
// pair carries at least one pulse.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icl/errors.hpp"

namespace icl {

using Bits = std::vector<uint8_t>;           // elements 0/1
using Levels = std::vector<int8_t>;          // elements -1/+1
using Symbols = std::vector<int8_t>;         // elements -1/0/+1

// Encoded ternary stream plus the original bit count (padding is stripped on
// decode using payload_bits).
struct TernaryFrame {
  Symbols symbols;
  std::size_t payload_bits = 0;
};

TernaryFrame encode_ternary(const Bits& bits);
Bits decode_ternary(const TernaryFrame& frame);

Levels encode_nrz(const Bits& bits);      // 1 -> +1, 0 -> -1
Levels encode_biphase(const Bits& bits);  // 1 -> +1 pulse, 0 -> -1 pulse

// Slots where the NRZ level differs from its predecessor (or from idle_level
// at slot 0), with the sign of the change.
struct TransitionEvent {
  std::size_t slot;
  int polarity;  // +1 rising, -1 falling
};
std::vector<TransitionEvent> nrz_transition_events(const Levels& levels,
                                                   int idle_level);

std::size_t max_zero_run(const TernaryFrame& frame);

// Pseudo-random payloads: PRBS-31 (x^31 + x^28 + 1), Fibonacci form.  A zero
// seed is remapped to 1 so the register never sticks.
Bits prbs_bits(std::size_t length, uint64_t seed);

// Text forms used by the CLI: bits as '0'/'1' (whitespace and '_' ignored),
// symbols and levels as '-', '0', '+'.
Bits parse_bits(const std::string& text);
std::string format_bits(const Bits& bits);
std::string format_symbols(const Symbols& symbols);
Symbols parse_symbols(const std::string& text);

}  // namespace icl
