#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "commu/midi_io.hpp"
#include "test_util.hpp"

using namespace commu;

namespace {

MidiTrackData simple_track() {
  MidiTrackData t;
  t.name = "main_melody/keyboard";
  t.program = 0;
  t.notes = {MidiNote{0, 480, 60, 80}, MidiNote{480, 240, 64, 90},
             MidiNote{480, 240, 67, 90}, MidiNote{960, 960, 72, 70}};
  return t;
}

}  // namespace

TEST_CASE("write then read preserves note events") {
  const std::vector<MidiTrackData> tracks = {simple_track()};
  const auto bytes = write_midi(tracks, 120, TimeSignature::FourFour, 480);
  const MidiFile file = read_midi(bytes);
  CHECK(file.division == 480);
  CHECK(file.bpm == 120);
  CHECK(file.time_signature == TimeSignature::FourFour);
  REQUIRE(file.tracks.size() == 1);
  CHECK(file.tracks[0].name == "main_melody/keyboard");
  CHECK(file.tracks[0].program == 0);
  CHECK(file.tracks[0].notes == tracks[0].notes);
}

TEST_CASE("tempo event bytes") {
  // 120 bpm -> 500000 us per quarter = 0x07 0xA1 0x20
  const auto bytes = write_midi({}, 120, TimeSignature::FourFour, 480);
  bool found = false;
  for (std::size_t i = 0; i + 5 < bytes.size(); ++i) {
    if (bytes[i] == 0xff && bytes[i + 1] == 0x51 && bytes[i + 2] == 3 &&
        bytes[i + 3] == 0x07 && bytes[i + 4] == 0xa1 && bytes[i + 5] == 0x20) {
      found = true;
    }
  }
  CHECK(found);
  CHECK(read_midi(bytes).bpm == 120);
}

TEST_CASE("three tracks produce four chunks") {
  const std::vector<MidiTrackData> tracks = {simple_track(), simple_track(),
                                             simple_track()};
  const auto bytes = write_midi(tracks, 100, TimeSignature::ThreeFour, 480);
  int chunks = 0;
  for (std::size_t i = 0; i + 3 < bytes.size(); ++i) {
    if (bytes[i] == 'M' && bytes[i + 1] == 'T' && bytes[i + 2] == 'r' &&
        bytes[i + 3] == 'k') {
      ++chunks;
    }
  }
  CHECK(chunks == 4);
}

TEST_CASE("write read write is byte stable") {
  std::mt19937_64 rng(17);
  std::vector<MidiTrackData> tracks;
  for (int i = 0; i < 3; ++i) {
    tracks.push_back(sample_to_ticks(testutil::random_sample(rng)));
  }
  const auto first = write_midi(tracks, 95, TimeSignature::SixEight, 480);
  const MidiFile file = read_midi(first);
  const auto second =
      write_midi(file.tracks, *file.bpm, *file.time_signature, file.division);
  CHECK(first == second);
}

TEST_CASE("empty track chunk reads as zero notes") {
  // Header + one MTrk holding only end-of-track.
  std::vector<std::uint8_t> bytes = {
      'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xe0,
      'M', 'T', 'r', 'k', 0, 0, 0, 4, 0x00, 0xff, 0x2f, 0x00};
  const MidiFile file = read_midi(bytes);
  CHECK(file.tracks.empty());
  std::size_t total_notes = 0;
  for (const auto& t : file.tracks) total_notes += t.notes.size();
  CHECK(total_notes == 0);
}

TEST_CASE("running status and velocity-0 offs are understood") {
  // One track: 0x90 60 80, then running-status 60 0 (off), meta EOT.
  std::vector<std::uint8_t> track_body = {
      0x00, 0x90, 60, 80,
      0x60, 60, 0,        // delta 96, running status note-off
      0x00, 0xff, 0x2f, 0x00};
  std::vector<std::uint8_t> bytes = {'M', 'T', 'h', 'd', 0, 0, 0, 6,
                                     0, 0, 0, 1, 0x01, 0xe0,
                                     'M', 'T', 'r', 'k', 0, 0, 0,
                                     static_cast<std::uint8_t>(track_body.size())};
  bytes.insert(bytes.end(), track_body.begin(), track_body.end());
  const MidiFile file = read_midi(bytes);
  REQUIRE(file.tracks.size() == 1);
  REQUIRE(file.tracks[0].notes.size() == 1);
  CHECK(file.tracks[0].notes[0].tick == 0);
  CHECK(file.tracks[0].notes[0].duration == 96);
}

TEST_CASE("unmatched note-on closes at track end with a warning") {
  std::vector<std::uint8_t> track_body = {
      0x00, 0x90, 60, 80,
      0x40, 0x90, 64, 80,
      0x40, 0x80, 64, 0,
      0x00, 0xff, 0x2f, 0x00};
  std::vector<std::uint8_t> bytes = {'M', 'T', 'h', 'd', 0, 0, 0, 6,
                                     0, 0, 0, 1, 0x01, 0xe0,
                                     'M', 'T', 'r', 'k', 0, 0, 0,
                                     static_cast<std::uint8_t>(track_body.size())};
  bytes.insert(bytes.end(), track_body.begin(), track_body.end());
  const MidiFile file = read_midi(bytes);
  REQUIRE(file.tracks.size() == 1);
  CHECK(file.tracks[0].notes.size() == 2);
  CHECK(!file.warnings.empty());
}

TEST_CASE("malformed headers are rejected") {
  CHECK_THROWS(read_midi(std::vector<std::uint8_t>{'M', 'T', 'h', 'x'}));
  CHECK_THROWS(read_midi(std::vector<std::uint8_t>{}));
  // format 2
  CHECK_THROWS(read_midi(std::vector<std::uint8_t>{
      'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 2, 0, 0, 0x01, 0xe0}));
}

TEST_CASE("grid to tick conversion") {
  CHECK(bar_ticks(TimeSignature::FourFour, 480) == 1920);
  CHECK(bar_ticks(TimeSignature::ThreeFour, 480) == 1440);
  CHECK(bar_ticks(TimeSignature::SixEight, 480) == 1440);

  Sample s = testutil::basic_sample();
  s.notes = {Note{0, 64, 60, Velocity{64}, 32}, Note{1, 0, 62, Velocity{64}, 1}};
  const MidiTrackData t = sample_to_ticks(s, 480);
  REQUIRE(t.notes.size() == 2);
  CHECK(t.notes[0].tick == 960);
  CHECK(t.notes[0].duration == 480);
  CHECK(t.notes[1].tick == 1920);

  // Oracle for the shortest duration: round(1/128 * 1920) = 15.
  const std::int64_t oracle =
      std::llround(1.0 / kGridPerBar * bar_ticks(TimeSignature::FourFour, 480));
  CHECK(t.notes[1].duration == oracle);
  CHECK(t.notes[1].duration == 15);
}

TEST_CASE("track name encodes role and instrument") {
  Sample s = testutil::basic_sample();
  CHECK(sample_to_ticks(s).name == "main_melody/keyboard");
  s.metadata.track_role = std::nullopt;
  CHECK(sample_to_ticks(s).name == "unknown/keyboard");
}

TEST_CASE("tick mapping is monotone and collision-free at full resolution") {
  auto tick_of = [](TimeSignature ts, int division, int bar, int pos) {
    const std::int64_t bt = bar_ticks(ts, division);
    return bar * bt + std::llround(static_cast<double>(pos) * bt / kGridPerBar);
  };
  for (TimeSignature ts : {TimeSignature::FourFour, TimeSignature::ThreeFour,
                           TimeSignature::SixEight}) {
    for (int division : {32, 48, 96, 480}) {
      std::int64_t prev = -1;
      bool injective_expected =
          static_cast<std::int64_t>(beats_per_bar(ts)) * division >= kGridPerBar;
      std::set<std::int64_t> seen;
      for (int bar = 0; bar < 2; ++bar) {
        for (int pos = 0; pos < kGridPerBar; ++pos) {
          const std::int64_t tick = tick_of(ts, division, bar, pos);
          CHECK(tick >= prev);  // monotone always
          prev = tick;
          seen.insert(tick);
        }
      }
      if (injective_expected) {
        CHECK(seen.size() == 2 * kGridPerBar);
      }
    }
  }
}
