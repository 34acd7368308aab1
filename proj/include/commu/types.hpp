#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace commu {

// Every bar is divided into 128 grid steps, regardless of time signature.
inline constexpr int kGridPerBar = 128;

// Chromatic roots numbered 0..11 from C. Spelling uses sharps only.
inline constexpr std::array<std::string_view, 12> kRootNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

enum class Mode : std::uint8_t { Major, Minor };

struct Key {
  int root = 0;  // 0..11
  Mode mode = Mode::Major;

  bool operator==(const Key&) const = default;
};

// "cmajor", "f#minor", ... (lowercase root, then mode)
std::string key_name(const Key& key);
std::optional<Key> parse_key(std::string_view name);

enum class TimeSignature : std::uint8_t { FourFour, ThreeFour, SixEight };
enum class PitchRange : std::uint8_t {
  VeryLow,
  Low,
  MidLow,
  Mid,
  MidHigh,
  High,
  VeryHigh
};
enum class Instrument : std::uint8_t {
  Keyboard,
  Lead,
  Idiophone,
  PluckedString,
  String,
  Wind,
  Percussion,
  Others
};
enum class Genre : std::uint8_t { NewAge, Cinematic };
enum class TrackRole : std::uint8_t {
  MainMelody,
  SubMelody,
  Accompaniment,
  Bass,
  Pad,
  Riff
};
enum class Rhythm : std::uint8_t { Standard, Triplet };

std::string_view to_string(TimeSignature v);
std::string_view to_string(PitchRange v);
std::string_view to_string(Instrument v);
std::string_view to_string(Genre v);
std::string_view to_string(TrackRole v);
std::string_view to_string(Rhythm v);

std::optional<TimeSignature> parse_time_signature(std::string_view s);
std::optional<PitchRange> parse_pitch_range(std::string_view s);
std::optional<Instrument> parse_instrument(std::string_view s);
std::optional<Genre> parse_genre(std::string_view s);
std::optional<TrackRole> parse_track_role(std::string_view s);
std::optional<Rhythm> parse_rhythm(std::string_view s);

// Beats per bar on the quarter-note tick grid: 4/4 -> 4, 3/4 -> 3, 6/8 -> 3
// (six eighths span three quarters).
int beats_per_bar(TimeSignature ts);

// MIDI velocity 0..127. The token alphabet halves it into 64 bins; decoding
// yields the odd representative 2*bin+1, so roundtrips hold at bin level.
// Velocity <= 1 marks keyswitch notes, which carry no musical content.
struct Velocity {
  int value = 0;

  int bin() const { return value / 2; }
  bool is_keyswitch() const { return value <= 1; }
  static Velocity from_bin(int bin) { return Velocity{2 * bin + 1}; }

  bool operator==(const Velocity&) const = default;
};

struct Note {
  int bar = 0;
  int position = 0;  // 0..127
  int pitch = 0;     // 0..127, pitch 0 = C-2 (so C3 = 60, G8 = 127)
  Velocity velocity;
  int duration = 1;  // 1..128 grid steps

  bool operator==(const Note&) const = default;
};

// The 11 scalar metadata. Fields other than num_measures may be absent,
// matching the per-category "unknown" tokens of the vocabulary; num_measures
// has no unknown slot and must be 4, 8 or 16 to encode.
struct MetadataSet {
  std::optional<int> bpm;  // multiple of 5 in 5..200
  std::optional<Key> key;
  std::optional<TimeSignature> time_signature;
  std::optional<PitchRange> pitch_range;
  int num_measures = 0;
  std::optional<Instrument> instrument;
  std::optional<Genre> genre;
  std::optional<Velocity> min_velocity;
  std::optional<Velocity> max_velocity;
  std::optional<TrackRole> track_role;
  std::optional<Rhythm> rhythm;

  bool operator==(const MetadataSet&) const = default;
};

inline bool is_valid_num_measures(int n) { return n == 4 || n == 8 || n == 16; }

// Inclusive MIDI pitch interval per range category; together they partition
// 0..127. Classification uses the mean pitch of a sample's notes.
inline constexpr std::array<std::pair<int, int>, 7> kPitchRangeBounds = {{
    {0, 35},    // very_low  (C-2..B0)
    {36, 47},   // low       (C1..B1)
    {48, 59},   // mid_low   (C2..B2)
    {60, 71},   // mid       (C3..B3)
    {72, 83},   // mid_high  (C4..B4)
    {84, 95},   // high      (C5..B5)
    {96, 127},  // very_high (C6..G8)
}};

std::pair<int, int> pitch_range_bounds(PitchRange r);
PitchRange classify_mean_pitch(double mean_pitch);

// Pitch classes of the key's scale, sorted ascending. Major uses the major
// scale, minor the natural minor.
std::array<int, 7> scale_pitch_classes(const Key& key);
bool in_scale(const Key& key, int pitch_class);

// Absolute grid index of a (bar, position) point.
inline std::int64_t grid_index(int bar, int position) {
  return static_cast<std::int64_t>(bar) * kGridPerBar + position;
}

}  // namespace commu
