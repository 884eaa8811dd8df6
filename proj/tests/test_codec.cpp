#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "icl/codec.hpp"

using namespace icl;

namespace {

Bits bits_of(const std::string& s) { return parse_bits(s); }

// Independent oracle: longest zero run by plain scan.
std::size_t scan_zero_run(const Symbols& symbols) {
  std::size_t best = 0, run = 0;
  for (int8_t s : symbols) {
    run = (s == 0) ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

const std::string kPaperPayload = "000001010011100101110111";

}  // namespace

TEST_CASE("ternary mapping table") {
  CHECK(encode_ternary(bits_of("000")).symbols == Symbols{-1, -1});
  CHECK(encode_ternary(bits_of("111")).symbols == Symbols{+1, +1});
  CHECK(encode_ternary(bits_of("000")).payload_bits == 3);

  // paper payload: all eight triplets in order
  TernaryFrame frame = encode_ternary(bits_of(kPaperPayload));
  CHECK(frame.symbols.size() == 16);
  CHECK(frame.payload_bits == 24);
  CHECK(format_symbols(frame.symbols) == "---0-+0-0++-+0++");
}

TEST_CASE("ternary empty and ragged payloads") {
  TernaryFrame empty = encode_ternary({});
  CHECK(empty.symbols.empty());
  CHECK(empty.payload_bits == 0);
  CHECK(decode_ternary(empty).empty());

  TernaryFrame ragged = encode_ternary(bits_of("01"));  // pads to 010
  CHECK(ragged.symbols == Symbols{-1, +1});
  CHECK(ragged.payload_bits == 2);
  CHECK(decode_ternary(ragged) == bits_of("01"));
}

TEST_CASE("ternary decode errors") {
  CHECK(decode_ternary({{-1, -1}, 3}) == bits_of("000"));
  CHECK_THROWS_AS(decode_ternary({{0, 0}, 3}), InvalidPair);
  CHECK_THROWS_AS(decode_ternary({{-1, -1, 0, 0}, 6}), InvalidPair);
  CHECK_THROWS_AS(decode_ternary({{2, 0}, 3}), InvalidPair);
  CHECK_THROWS_AS(decode_ternary({{-1, -1}, 6}), LengthMismatch);
  CHECK_THROWS_AS(decode_ternary({{-1, -1, -1, 0}, 3}), LengthMismatch);

  TernaryFrame paper = encode_ternary(bits_of(kPaperPayload));
  CHECK(format_bits(decode_ternary(paper)) == kPaperPayload);
}

TEST_CASE("ternary roundtrip exhaustive n<=12") {
  for (std::size_t n = 0; n <= 12; ++n) {
    for (uint32_t word = 0; word < (1u << n); ++word) {
      Bits bits(n);
      for (std::size_t i = 0; i < n; ++i) bits[i] = (word >> i) & 1;
      TernaryFrame frame = encode_ternary(bits);
      REQUIRE(frame.symbols.size() == 2 * ((n + 2) / 3));
      REQUIRE(decode_ternary(frame) == bits);
    }
  }
}

TEST_CASE("ternary roundtrip randomized") {
  std::mt19937_64 rng(20250810);
  std::uniform_int_distribution<std::size_t> len(0, 256);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 10000; ++trial) {
    Bits bits(len(rng));
    for (auto& b : bits) b = static_cast<uint8_t>(bit(rng));
    TernaryFrame frame = encode_ternary(bits);
    REQUIRE(decode_ternary(frame) == bits);
    REQUIRE(scan_zero_run(frame.symbols) <= 2);
  }
}

TEST_CASE("ternary injectivity and pair exclusion over all triplets") {
  std::set<std::pair<int, int>> pairs;
  for (int b = 0; b < 8; ++b) {
    Bits bits = {static_cast<uint8_t>((b >> 2) & 1),
                 static_cast<uint8_t>((b >> 1) & 1),
                 static_cast<uint8_t>(b & 1)};
    TernaryFrame frame = encode_ternary(bits);
    REQUIRE(frame.symbols.size() == 2);
    CHECK_FALSE((frame.symbols[0] == 0 && frame.symbols[1] == 0));
    pairs.insert({frame.symbols[0], frame.symbols[1]});
  }
  CHECK(pairs.size() == 8);  // all distinct
}

TEST_CASE("zero-run bound over all ordered table-pair adjacencies") {
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      Bits bits = {static_cast<uint8_t>((a >> 2) & 1),
                   static_cast<uint8_t>((a >> 1) & 1),
                   static_cast<uint8_t>(a & 1),
                   static_cast<uint8_t>((b >> 2) & 1),
                   static_cast<uint8_t>((b >> 1) & 1),
                   static_cast<uint8_t>(b & 1)};
      TernaryFrame frame = encode_ternary(bits);
      CHECK(max_zero_run(frame) <= 2);
      CHECK(max_zero_run(frame) == scan_zero_run(frame.symbols));
    }
  }
}

TEST_CASE("max_zero_run examples") {
  CHECK(max_zero_run(encode_ternary(bits_of("000"))) == 0);
  // 011 100 -> (0,-1)(0,+1); runs of single zeros only
  TernaryFrame f = encode_ternary(bits_of("011100"));
  CHECK(f.symbols == Symbols{0, -1, 0, +1});
  CHECK(max_zero_run(f) == scan_zero_run(f.symbols));
  // adjacency (x,0)(0,y): 001 then 011 -> (-1,0)(0,-1) has a run of 2
  TernaryFrame g = encode_ternary(bits_of("001011"));
  CHECK(g.symbols == Symbols{-1, 0, 0, -1});
  CHECK(max_zero_run(g) == 2);
}

TEST_CASE("compression ratio") {
  for (std::size_t n : {3u, 6u, 24u, 999u}) {
    TernaryFrame frame = encode_ternary(prbs_bits(n, 7));
    CHECK(frame.symbols.size() * 3 == 2 * n);  // symbols/bits == 2/3 exactly
  }
}

TEST_CASE("nrz and biphase encodings") {
  CHECK(encode_nrz(bits_of("10")) == Levels{+1, -1});
  CHECK(encode_nrz(bits_of("0000")) == Levels{-1, -1, -1, -1});
  CHECK(encode_nrz(bits_of(kPaperPayload)).size() == 24);

  CHECK(encode_biphase(bits_of("1")) == Levels{+1});
  CHECK(encode_biphase(bits_of("00")) == Levels{-1, -1});
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Bits bits = prbs_bits(rng() % 500, rng());
    CHECK(encode_biphase(bits).size() == bits.size());  // pulse per bit
  }
}

TEST_CASE("nrz transition events") {
  auto events = nrz_transition_events({+1, -1, +1}, -1);
  REQUIRE(events.size() == 3);
  CHECK(events[0].slot == 0);
  CHECK(events[0].polarity == +1);
  CHECK(events[1].slot == 1);
  CHECK(events[1].polarity == -1);
  CHECK(events[2].slot == 2);
  CHECK(events[2].polarity == +1);

  CHECK(nrz_transition_events({-1, -1, -1}, -1).empty());

  // paper payload, idle = first level: oracle counts adjacent differing bits
  Bits payload = bits_of(kPaperPayload);
  Levels levels = encode_nrz(payload);
  std::size_t oracle = 0;
  for (std::size_t i = 1; i < payload.size(); ++i)
    if (payload[i] != payload[i - 1]) ++oracle;
  CHECK(oracle == 11);
  CHECK(nrz_transition_events(levels, levels.front()).size() == oracle);
}

TEST_CASE("text forms") {
  CHECK(parse_bits("0100 11_01") == bits_of("01001101"));
  CHECK_THROWS_AS(parse_bits("012"), ValidationError);
  CHECK(format_symbols({-1, -1}) == "--");
  CHECK(parse_symbols("-0+ +") == Symbols{-1, 0, +1, +1});
  CHECK_THROWS_AS(parse_symbols("x"), ValidationError);
  CHECK(format_bits(parse_bits("1010")) == "1010");
}

TEST_CASE("prbs determinism and balance") {
  Bits a = prbs_bits(999, 1);
  Bits b = prbs_bits(999, 1);
  CHECK(a == b);
  CHECK(prbs_bits(999, 2) != a);
  std::size_t ones = 0;
  for (uint8_t bit : prbs_bits(100000, 3)) ones += bit;
  CHECK(ones > 48000);
  CHECK(ones < 52000);
  CHECK(prbs_bits(10, 0) == prbs_bits(10, 0));  // zero seed remapped, no throw
}
