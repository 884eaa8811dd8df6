#include "icl/codec.hpp"

#include <array>
#include <cstddef>

namespace icl {

namespace {

// Digit pairs indexed by triplet value 0..7.
struct DigitPair {
  int8_t d1, d0;
};

constexpr std::array<DigitPair, 8> kTernaryTable = [] {
  std::array<DigitPair, 8> table{};
  for (int b = 0; b < 8; ++b) {
    int v = (b <= 3) ? b - 4 : b - 3;
    // balanced-ternary digits of v in [-4, 4], v != 0
    int d1 = (v + 4) / 3 - 1;  // round(v / 3)
    int d0 = v - 3 * d1;
    table[static_cast<std::size_t>(b)] = {static_cast<int8_t>(d1),
                                          static_cast<int8_t>(d0)};
  }
  return table;
}();

}  // namespace

TernaryFrame encode_ternary(const Bits& bits) {
  TernaryFrame frame;
  frame.payload_bits = bits.size();
  const std::size_t triplets = (bits.size() + 2) / 3;
  frame.symbols.reserve(2 * triplets);
  for (std::size_t t = 0; t < triplets; ++t) {
    int b = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t i = 3 * t + k;
      const int bit = (i < bits.size()) ? bits[i] : 0;  // zero padding
      b = (b << 1) | bit;
    }
    const DigitPair& p = kTernaryTable[static_cast<std::size_t>(b)];
    frame.symbols.push_back(p.d1);
    frame.symbols.push_back(p.d0);
  }
  return frame;
}

Bits decode_ternary(const TernaryFrame& frame) {
  const std::size_t triplets = (frame.payload_bits + 2) / 3;
  if (frame.symbols.size() != 2 * triplets)
    throw LengthMismatch("ternary frame has " +
                         std::to_string(frame.symbols.size()) +
                         " symbols, expected " + std::to_string(2 * triplets));
  Bits bits;
  bits.reserve(frame.payload_bits);
  for (std::size_t t = 0; t < triplets; ++t) {
    const int d1 = frame.symbols[2 * t];
    const int d0 = frame.symbols[2 * t + 1];
    if (d1 < -1 || d1 > 1 || d0 < -1 || d0 > 1)
      throw InvalidPair("symbol outside {-1,0,+1} at pair " + std::to_string(t));
    const int v = 3 * d1 + d0;
    if (v == 0)
      throw InvalidPair("aligned pair (0,0) at pair " + std::to_string(t));
    const int b = (v < 0) ? v + 4 : v + 3;
    for (int k = 2; k >= 0; --k) {
      if (bits.size() < frame.payload_bits)
        bits.push_back(static_cast<uint8_t>((b >> k) & 1));
    }
  }
  return bits;
}

Levels encode_nrz(const Bits& bits) {
  Levels levels;
  levels.reserve(bits.size());
  for (uint8_t bit : bits) levels.push_back(bit ? int8_t{1} : int8_t{-1});
  return levels;
}

Levels encode_biphase(const Bits& bits) {
  return encode_nrz(bits);  // same polarity map, one pulse per slot
}

std::vector<TransitionEvent> nrz_transition_events(const Levels& levels,
                                                   int idle_level) {
  std::vector<TransitionEvent> events;
  int prev = idle_level;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] != prev)
      events.push_back({i, levels[i] > prev ? +1 : -1});
    prev = levels[i];
  }
  return events;
}

std::size_t max_zero_run(const TernaryFrame& frame) {
  std::size_t best = 0, run = 0;
  for (int8_t s : frame.symbols) {
    run = (s == 0) ? run + 1 : 0;
    if (run > best) best = run;
  }
  return best;
}

Bits prbs_bits(std::size_t length, uint64_t seed) {
  uint32_t state = static_cast<uint32_t>(seed & 0x7FFFFFFFu);
  if (state == 0) state = 1;
  Bits bits;
  bits.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const uint32_t out = ((state >> 30) ^ (state >> 27)) & 1u;
    state = ((state << 1) | out) & 0x7FFFFFFFu;
    bits.push_back(static_cast<uint8_t>(out));
  }
  return bits;
}

Bits parse_bits(const std::string& text) {
  Bits bits;
  for (char c : text) {
    if (c == '0')
      bits.push_back(0);
    else if (c == '1')
      bits.push_back(1);
    else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '_')
      continue;
    else
      throw ValidationError(std::string("invalid bit character '") + c + "'");
  }
  return bits;
}

std::string format_bits(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (uint8_t b : bits) out.push_back(b ? '1' : '0');
  return out;
}

std::string format_symbols(const Symbols& symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (int8_t s : symbols) out.push_back(s < 0 ? '-' : (s > 0 ? '+' : '0'));
  return out;
}

Symbols parse_symbols(const std::string& text) {
  Symbols symbols;
  for (char c : text) {
    if (c == '-')
      symbols.push_back(-1);
    else if (c == '+')
      symbols.push_back(1);
    else if (c == '0')
      symbols.push_back(0);
    else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '_')
      continue;
    else
      throw ValidationError(std::string("invalid symbol character '") + c +
                            "'");
  }
  return symbols;
}

}  // namespace icl
