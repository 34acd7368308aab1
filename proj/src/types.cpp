#include "commu/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace commu {

namespace {

constexpr std::array<std::string_view, 3> kTimeSignatureNames = {"4/4", "3/4",
                                                                 "6/8"};
constexpr std::array<std::string_view, 7> kPitchRangeNames = {
    "very_low", "low", "mid_low", "mid", "mid_high", "high", "very_high"};
constexpr std::array<std::string_view, 8> kInstrumentNames = {
    "keyboard", "lead",   "idiophone",  "plucked_string",
    "string",   "wind",   "percussion", "others"};
constexpr std::array<std::string_view, 2> kGenreNames = {"newage", "cinematic"};
constexpr std::array<std::string_view, 6> kTrackRoleNames = {
    "main_melody", "sub_melody", "accompaniment", "bass", "pad", "riff"};
constexpr std::array<std::string_view, 2> kRhythmNames = {"standard",
                                                          "triplet"};

template <typename E, std::size_t N>
std::optional<E> parse_enum(const std::array<std::string_view, N>& names,
                            std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

// Major scale template; natural minor is its rotation from degree 6.
constexpr std::array<int, 7> kMajorSteps = {0, 2, 4, 5, 7, 9, 11};
constexpr std::array<int, 7> kNaturalMinorSteps = {0, 2, 3, 5, 7, 8, 10};

}  // namespace

std::string key_name(const Key& key) {
  std::string root(kRootNames[static_cast<std::size_t>(key.root)]);
  std::transform(root.begin(), root.end(), root.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return root + (key.mode == Mode::Major ? "major" : "minor");
}

std::optional<Key> parse_key(std::string_view name) {
  Mode mode;
  std::string_view root_part;
  if (name.ends_with("major")) {
    mode = Mode::Major;
    root_part = name.substr(0, name.size() - 5);
  } else if (name.ends_with("minor")) {
    mode = Mode::Minor;
    root_part = name.substr(0, name.size() - 5);
  } else {
    return std::nullopt;
  }
  for (int r = 0; r < 12; ++r) {
    std::string lower(kRootNames[static_cast<std::size_t>(r)]);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == root_part) return Key{r, mode};
  }
  return std::nullopt;
}

std::string_view to_string(TimeSignature v) {
  return kTimeSignatureNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(PitchRange v) {
  return kPitchRangeNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(Instrument v) {
  return kInstrumentNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(Genre v) {
  return kGenreNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(TrackRole v) {
  return kTrackRoleNames[static_cast<std::size_t>(v)];
}
std::string_view to_string(Rhythm v) {
  return kRhythmNames[static_cast<std::size_t>(v)];
}

std::optional<TimeSignature> parse_time_signature(std::string_view s) {
  return parse_enum<TimeSignature>(kTimeSignatureNames, s);
}
std::optional<PitchRange> parse_pitch_range(std::string_view s) {
  return parse_enum<PitchRange>(kPitchRangeNames, s);
}
std::optional<Instrument> parse_instrument(std::string_view s) {
  return parse_enum<Instrument>(kInstrumentNames, s);
}
std::optional<Genre> parse_genre(std::string_view s) {
  return parse_enum<Genre>(kGenreNames, s);
}
std::optional<TrackRole> parse_track_role(std::string_view s) {
  return parse_enum<TrackRole>(kTrackRoleNames, s);
}
std::optional<Rhythm> parse_rhythm(std::string_view s) {
  return parse_enum<Rhythm>(kRhythmNames, s);
}

int beats_per_bar(TimeSignature ts) {
  switch (ts) {
    case TimeSignature::FourFour: return 4;
    case TimeSignature::ThreeFour: return 3;
    case TimeSignature::SixEight: return 3;
  }
  return 4;
}

std::pair<int, int> pitch_range_bounds(PitchRange r) {
  return kPitchRangeBounds[static_cast<std::size_t>(r)];
}

PitchRange classify_mean_pitch(double mean_pitch) {
  int p = static_cast<int>(std::floor(mean_pitch));
  p = std::clamp(p, 0, 127);
  for (std::size_t i = 0; i < kPitchRangeBounds.size(); ++i) {
    if (p <= kPitchRangeBounds[i].second) return static_cast<PitchRange>(i);
  }
  return PitchRange::VeryHigh;
}

std::array<int, 7> scale_pitch_classes(const Key& key) {
  const auto& steps =
      key.mode == Mode::Major ? kMajorSteps : kNaturalMinorSteps;
  std::array<int, 7> classes{};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    classes[i] = (key.root + steps[i]) % 12;
  }
  std::sort(classes.begin(), classes.end());
  return classes;
}

bool in_scale(const Key& key, int pitch_class) {
  const auto classes = scale_pitch_classes(key);
  return std::find(classes.begin(), classes.end(), ((pitch_class % 12) + 12) % 12) !=
         classes.end();
}

}  // namespace commu
