#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commu/sample.hpp"
#include "commu/types.hpp"

namespace commu {

inline constexpr int kDefaultDivision = 480;

struct MidiNote {
  std::int64_t tick = 0;      // onset
  std::int64_t duration = 1;  // ticks
  int pitch = 0;
  int velocity = 0;

  bool operator==(const MidiNote&) const = default;
};

struct MidiTrackData {
  std::string name;
  int program = 0;
  std::vector<MidiNote> notes;

  bool operator==(const MidiTrackData&) const = default;
};

// Key- or time-signature meta event, in file order; slice() cuts at these.
struct MetaChange {
  enum class Kind { KeySignature, TimeSignatureChange };

  std::int64_t tick = 0;
  Kind kind = Kind::KeySignature;
  std::optional<Key> key;            // key-signature payload
  std::optional<TimeSignature> ts;   // nullopt when not 4/4, 3/4 or 6/8
  int raw_numerator = 0;
  int raw_denominator = 0;
};

struct MidiFile {
  int division = kDefaultDivision;
  std::optional<int> bpm;                       // from the first tempo event
  std::optional<TimeSignature> time_signature;  // from the first 0xFF58
  std::optional<Key> key;                       // from the first 0xFF59
  std::vector<MidiTrackData> tracks;
  std::vector<MetaChange> meta_changes;
  std::int64_t max_tick = 0;
  std::vector<std::string> warnings;
};

// Reads SMF format 0/1. Supported events: note on/off (velocity-0 on counts
// as off), program change, tempo, time signature, key signature, track name,
// end of track; everything else is skipped. Unmatched note-ons close at the
// track end with a warning. Chunks carrying no notes, name or program (e.g.
// a bare conductor track) are dropped. Throws std::runtime_error on
// malformed input.
MidiFile read_midi(std::span<const std::uint8_t> bytes);

// Writes SMF format 1: a conductor chunk with tempo and time signature at
// tick 0, then one chunk per track (name, program change, notes, channel =
// track index mod 16). No running status; simultaneous events ordered
// (note-off first, then pitch): identical input gives identical bytes, and
// write -> read -> write is byte-stable.
std::vector<std::uint8_t> write_midi(std::span<const MidiTrackData> tracks,
                                     int bpm, TimeSignature time_signature,
                                     int division = kDefaultDivision);

std::int64_t bar_ticks(TimeSignature ts, int division);

// Grid -> tick conversion: position and duration scale by bar_ticks/128,
// rounded to nearest, duration at least 1 tick. The track takes its name
// from "<track_role>/<instrument>" and its program from the instrument
// category. An unknown time signature renders as 4/4.
MidiTrackData sample_to_ticks(const Sample& sample,
                              int division = kDefaultDivision);

}  // namespace commu
