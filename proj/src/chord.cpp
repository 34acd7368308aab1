#include "commu/chord.hpp"

#include <algorithm>

namespace commu {

namespace {

const std::array<std::vector<int>, kNumChordQualities> kIntervals = {{
    {0, 4, 7},      // maj
    {0, 3, 7},      // min
    {0, 4, 8},      // aug
    {0, 3, 6},      // dim
    {0, 4, 7, 10},  // dom7
    {0, 4, 7, 11},  // maj7
    {0, 3, 7, 10},  // min7
    {0, 3, 6, 10},  // m7b5
    {0, 5, 7},      // sus4
}};

constexpr std::array<std::string_view, kNumChordQualities> kSuffixes = {
    "maj", "min", "aug", "dim", "7", "maj7", "min7", "m7b5", "sus4"};

// Longest first so "maj7" wins over "maj" and "7".
constexpr std::array<ChordQuality, kNumChordQualities> kParseOrder = {
    ChordQuality::Maj7, ChordQuality::Min7, ChordQuality::M7b5,
    ChordQuality::Sus4, ChordQuality::Maj,  ChordQuality::Min,
    ChordQuality::Aug,  ChordQuality::Dim,  ChordQuality::Dom7};

}  // namespace

const std::vector<int>& chord_quality_intervals(ChordQuality q) {
  return kIntervals[static_cast<std::size_t>(q)];
}

std::string_view chord_quality_suffix(ChordQuality q) {
  return kSuffixes[static_cast<std::size_t>(q)];
}

bool ChordSymbol::contains_pitch_class(int pc) const {
  int rel = ((pc - root) % 12 + 12) % 12;
  const auto& ivs = chord_quality_intervals(quality);
  return std::find(ivs.begin(), ivs.end(), rel) != ivs.end();
}

std::string ChordSymbol::name() const {
  return std::string(kRootNames[static_cast<std::size_t>(root)]) +
         std::string(chord_quality_suffix(quality));
}

std::optional<ChordSymbol> ChordSymbol::parse(std::string_view name) {
  int root = -1;
  std::string_view rest;
  // Two-character roots ("C#") must be tried before one-character ones.
  for (int r = 0; r < 12; ++r) {
    const auto rn = kRootNames[static_cast<std::size_t>(r)];
    if (name.starts_with(rn) &&
        (root < 0 || rn.size() > kRootNames[static_cast<std::size_t>(root)].size())) {
      root = r;
      rest = name.substr(rn.size());
    }
  }
  if (root < 0) return std::nullopt;
  for (ChordQuality q : kParseOrder) {
    if (rest == chord_quality_suffix(q)) return ChordSymbol{root, q};
  }
  return std::nullopt;
}

std::vector<ChordSymbol> all_chord_symbols() {
  std::vector<ChordSymbol> out;
  out.reserve(kNumChordSymbols);
  for (int root = 0; root < 12; ++root) {
    for (int q = 0; q < kNumChordQualities; ++q) {
      out.push_back(ChordSymbol{root, static_cast<ChordQuality>(q)});
    }
  }
  return out;
}

}  // namespace commu
