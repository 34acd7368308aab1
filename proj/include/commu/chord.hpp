#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commu/types.hpp"

namespace commu {

// Quality order is fixed; it defines the chord token layout.
enum class ChordQuality : std::uint8_t {
  Maj,
  Min,
  Aug,
  Dim,
  Dom7,
  Maj7,
  Min7,
  M7b5,
  Sus4
};

inline constexpr int kNumChordQualities = 9;
inline constexpr int kNumChordSymbols = 12 * kNumChordQualities;  // 108

// Semitone offsets from the root, one row per quality.
const std::vector<int>& chord_quality_intervals(ChordQuality q);

// Name suffix: maj, min, aug, dim, 7, maj7, min7, m7b5, sus4.
std::string_view chord_quality_suffix(ChordQuality q);

struct ChordSymbol {
  int root = 0;  // 0..11
  ChordQuality quality = ChordQuality::Maj;

  // True when pc is a chord tone, i.e. (pc - root) mod 12 lies in the
  // quality's interval set.
  bool contains_pitch_class(int pc) const;

  std::string name() const;  // "Cmaj7", "F#7", "Bsus4", ...
  static std::optional<ChordSymbol> parse(std::string_view name);

  bool operator==(const ChordSymbol&) const = default;
};

struct ChordEvent {
  int bar = 0;
  int position = 0;  // 0..127
  ChordSymbol chord;

  bool operator==(const ChordEvent&) const = default;
};

// All 108 symbols, ordered by (root, quality) to match the token layout.
std::vector<ChordSymbol> all_chord_symbols();

}  // namespace commu
