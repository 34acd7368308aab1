#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "commu/midi_io.hpp"
#include "commu/sample.hpp"

namespace commu {

inline constexpr int kDefaultGapBars = 2;

// The 60 corpus variants of one sample: bpm offsets {-10,-5,0,+5,+10}
// (clamped into 5..200) crossed with the 12 chromatic target roots, mode
// preserved. Transposition takes the shortest signed semitone path from the
// source root to the target (ties broken downward); pitches leaving 0..127
// are octave-folded back in. Grid durations are untouched; absolute time
// shifts through the bpm token alone. Requires known bpm and key.
std::vector<Sample> augment(const Sample& sample);

// One homogeneous stretch of a MIDI file between key/time-signature meta
// events. Ticks are rebased to the segment start; notes are clipped at the
// segment end and keyswitch notes dropped.
struct Segment {
  std::optional<Key> key;
  std::optional<TimeSignature> time_signature;  // nullopt: unsupported meter
  int bpm = 120;
  int division = kDefaultDivision;
  std::int64_t length_ticks = 0;
  std::vector<MidiTrackData> tracks;
};

// Cuts at every key- or time-signature change; segments without notes are
// dropped.
std::vector<Segment> slice(const MidiFile& file);

// A bar-aligned run of one track where notes actually sound.
struct Chunk {
  std::optional<Key> key;
  std::optional<TimeSignature> time_signature;
  int bpm = 120;
  int division = kDefaultDivision;
  int program = 0;
  int num_bars = 0;
  std::vector<MidiNote> notes;  // ticks rebased to the chunk start
};

// Splits each track at silent gaps of at least gap_bars bars and trims
// leading/trailing silence to bar boundaries. A bar counts as sounding when
// any note overlaps it. Unsupported meters yield no chunks.
std::vector<Chunk> chunk(const Segment& segment, int gap_bars = kDefaultGapBars);

// Greedy split into 16/8/4-bar samples, remainder under 4 bars dropped.
// Notes are quantised onto the 128 grid; pitch range, min/max velocity and
// instrument category are derived, genre/track-role/rhythm stay unknown.
std::vector<Sample> parse_bars(const Chunk& chunk);

// ---------------------------------------------------------------------------
// Pipeline runner
// ---------------------------------------------------------------------------

// Manifest JSON: {"input": <glob>, "output_dir": <dir>,
//                 "augment": <bool, default false>,
//                 "gap_bars": <int, default 2>}
struct PipelineManifest {
  std::string input;
  std::filesystem::path output_dir;
  bool augment_enabled = false;
  int gap_bars = kDefaultGapBars;
};

PipelineManifest load_manifest(const std::filesystem::path& path);

struct IngestResult {
  std::vector<std::filesystem::path> inputs;
  std::size_t samples_written = 0;
  std::vector<std::string> warnings;
};

// Runs slice/chunk/parse (plus augmentation when enabled) over every file
// matched by the manifest glob, writing <name>.json and <name>.tok pairs
// into output_dir. Deterministic: inputs are processed in sorted path order.
IngestResult run_pipeline(const PipelineManifest& manifest);

// Ingest core for one already-parsed file; exposed for tests and bindings.
std::vector<Sample> ingest_midi(const MidiFile& file, int gap_bars,
                                std::vector<std::string>* warnings = nullptr);

// Shell-style glob over one directory component: '*' and '?' in the
// filename part only. A plain directory matches every *.mid/*.midi in it.
std::vector<std::filesystem::path> expand_input_glob(const std::string& pattern);

}  // namespace commu
