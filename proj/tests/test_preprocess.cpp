#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "commu/gm_programs.hpp"
#include "commu/preprocess.hpp"
#include "commu/token_codec.hpp"
#include "test_util.hpp"

using namespace commu;

namespace {

// A single-track MidiFile built by hand, with optional meta changes.
MidiFile make_file(std::vector<MidiNote> notes,
                   std::vector<MetaChange> changes = {}, int division = 480) {
  MidiFile f;
  f.division = division;
  f.bpm = 120;
  f.time_signature = TimeSignature::FourFour;
  MidiTrackData t;
  t.name = "t";
  t.program = 0;
  t.notes = std::move(notes);
  for (const MidiNote& n : t.notes) {
    f.max_tick = std::max(f.max_tick, n.tick + n.duration);
  }
  f.meta_changes = std::move(changes);
  for (const MetaChange& c : f.meta_changes) {
    f.max_tick = std::max(f.max_tick, c.tick);
  }
  MetaChange ts0;
  ts0.tick = 0;
  ts0.kind = MetaChange::Kind::TimeSignatureChange;
  ts0.ts = TimeSignature::FourFour;
  f.meta_changes.insert(f.meta_changes.begin(), ts0);
  f.tracks.push_back(std::move(t));
  return f;
}

// Fills bars [from, to) with one quarter note per beat.
std::vector<MidiNote> bars_of_notes(int from, int to, int pitch = 60,
                                    int velocity = 80) {
  std::vector<MidiNote> notes;
  for (int bar = from; bar < to; ++bar) {
    for (int beat = 0; beat < 4; ++beat) {
      notes.push_back(
          MidiNote{bar * 1920 + beat * 480, 480, pitch, velocity});
    }
  }
  return notes;
}

}  // namespace

TEST_CASE("augment yields the 60 published variants") {
  std::mt19937_64 rng(1);
  Sample s = testutil::random_sample(rng);
  s.metadata.bpm = 60;
  const auto variants = augment(s);
  REQUIRE(variants.size() == 60);

  std::set<int> bpms;
  std::set<std::string> keys;
  for (const Sample& v : variants) {
    bpms.insert(*v.metadata.bpm);
    keys.insert(key_name(*v.metadata.key));
    CHECK(validate_sample(v).empty());
  }
  CHECK(bpms == std::set<int>{50, 55, 60, 65, 70});
  CHECK(keys.size() == 12);
}

TEST_CASE("identity variant equals the input exactly once") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Sample s = testutil::random_sample(rng);
    int equal = 0;
    for (const Sample& v : augment(s)) {
      if (equal_at_bin_level(v, s)) ++equal;
    }
    CHECK(equal == 1);
  }
}

TEST_CASE("cmajor to dmajor shifts pitches and chords up two semitones") {
  Sample s = testutil::basic_sample();  // cmajor
  const auto variants = augment(s);
  const Sample* dmajor = nullptr;
  for (const Sample& v : variants) {
    if (*v.metadata.key == Key{2, Mode::Major} && *v.metadata.bpm == 120) {
      dmajor = &v;
    }
  }
  REQUIRE(dmajor != nullptr);
  REQUIRE(dmajor->notes.size() == s.notes.size());
  for (std::size_t i = 0; i < s.notes.size(); ++i) {
    CHECK(dmajor->notes[i].pitch == s.notes[i].pitch + 2);
  }
  CHECK(dmajor->chords[0].chord == ChordSymbol{2, ChordQuality::Maj});
  CHECK(dmajor->chords[1].chord == ChordSymbol{9, ChordQuality::Dom7});
}

TEST_CASE("transposition preserves intervals") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Sample s = testutil::random_sample(rng);  // fold-free pitch window
    for (const Sample& v : augment(s)) {
      REQUIRE(v.notes.size() == s.notes.size());
      for (std::size_t a = 1; a < s.notes.size(); ++a) {
        CHECK(v.notes[a].pitch - v.notes[0].pitch ==
              s.notes[a].pitch - s.notes[0].pitch);
      }
    }
  }
}

TEST_CASE("augmented samples stay encodable") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    for (const Sample& v : augment(testutil::random_sample(rng))) {
      CHECK(validate_grammar(encode(v)).empty());
    }
  }
}

TEST_CASE("bpm clamps to the representation range") {
  std::mt19937_64 rng(5);
  Sample s = testutil::random_sample(rng);
  s.metadata.bpm = 5;
  for (const Sample& v : augment(s)) {
    CHECK(*v.metadata.bpm >= 5);
    CHECK(*v.metadata.bpm % 5 == 0);
  }
  s.metadata.bpm = 200;
  for (const Sample& v : augment(s)) CHECK(*v.metadata.bpm <= 200);
}

TEST_CASE("augment requires known bpm and key") {
  Sample s = testutil::basic_sample();
  s.metadata.key = std::nullopt;
  CHECK_THROWS_AS(augment(s), std::invalid_argument);
}

TEST_CASE("slice keeps a single-meter file whole") {
  const MidiFile f = make_file(bars_of_notes(0, 8));
  const auto segments = slice(f);
  REQUIRE(segments.size() == 1);
  CHECK(segments[0].time_signature == TimeSignature::FourFour);
  CHECK(segments[0].tracks[0].notes.size() == 32);
}

TEST_CASE("slice cuts at a mid-file time-signature change") {
  // 16 bars of 4/4; a redundant 4/4 meta at bar 9 still forces a cut.
  MetaChange change;
  change.tick = 8 * 1920;
  change.kind = MetaChange::Kind::TimeSignatureChange;
  change.ts = TimeSignature::FourFour;
  const MidiFile f = make_file(bars_of_notes(0, 16), {change});
  const auto segments = slice(f);
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].length_ticks == 8 * 1920);
  CHECK(segments[0].tracks[0].notes.size() == 32);
  CHECK(segments[1].tracks[0].notes.size() == 32);
  // Ticks rebased to the segment start.
  CHECK(segments[1].tracks[0].notes[0].tick == 0);
}

TEST_CASE("slice drops noteless spans and counts change points") {
  MetaChange key_change;
  key_change.tick = 4 * 1920;
  key_change.kind = MetaChange::Kind::KeySignature;
  key_change.key = Key{7, Mode::Major};
  MetaChange ts_change;
  ts_change.tick = 8 * 1920;
  ts_change.kind = MetaChange::Kind::TimeSignatureChange;
  ts_change.ts = TimeSignature::ThreeFour;
  MetaChange ts_change2;
  ts_change2.tick = 12 * 1920;
  ts_change2.kind = MetaChange::Kind::TimeSignatureChange;
  ts_change2.ts = TimeSignature::FourFour;
  // Notes only in bars 0..8; the last two segments are silent.
  const MidiFile f =
      make_file(bars_of_notes(0, 8), {key_change, ts_change, ts_change2});
  const auto segments = slice(f);
  CHECK(segments.size() == 2);
  CHECK(segments[1].key == Key{7, Mode::Major});
}

TEST_CASE("keyswitch notes are dropped while slicing") {
  auto notes = bars_of_notes(0, 4);
  notes.push_back(MidiNote{0, 480, 24, 1});
  const MidiFile f = make_file(std::move(notes));
  const auto segments = slice(f);
  REQUIRE(segments.size() == 1);
  CHECK(segments[0].tracks[0].notes.size() == 16);
}

TEST_CASE("chunk splits on long silences") {
  SUBCASE("continuous eight bars stay one chunk") {
    const MidiFile f = make_file(bars_of_notes(0, 8));
    const auto chunks = chunk(slice(f)[0], 2);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].num_bars == 8);
  }

  SUBCASE("three silent bars split two four-bar runs") {
    auto notes = bars_of_notes(0, 4);
    auto tail = bars_of_notes(7, 11);
    notes.insert(notes.end(), tail.begin(), tail.end());
    const MidiFile f = make_file(std::move(notes));
    const auto chunks = chunk(slice(f)[0], 2);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].num_bars == 4);
    CHECK(chunks[1].num_bars == 4);
    CHECK(chunks[1].notes[0].tick == 0);
  }

  SUBCASE("short gaps stay inside one chunk") {
    auto notes = bars_of_notes(0, 4);
    auto tail = bars_of_notes(5, 9);
    notes.insert(notes.end(), tail.begin(), tail.end());
    const MidiFile f = make_file(std::move(notes));
    const auto chunks = chunk(slice(f)[0], 2);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].num_bars == 9);
  }

  SUBCASE("an all-silent track yields nothing") {
    Segment seg;
    seg.time_signature = TimeSignature::FourFour;
    seg.length_ticks = 8 * 1920;
    seg.tracks.push_back(MidiTrackData{});
    CHECK(chunk(seg, 2).empty());
  }

  SUBCASE("a sustained note keeps its bars sounding") {
    // One whole note spanning bars 1..2 of 4: no split despite no onsets.
    std::vector<MidiNote> notes = {MidiNote{0, 4 * 1920, 48, 70}};
    const MidiFile f = make_file(std::move(notes));
    const auto chunks = chunk(slice(f)[0], 2);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].num_bars == 4);
  }
}

TEST_CASE("parse_bars splits greedily into 16/8/4") {
  auto run = [](int bars) {
    Chunk c;
    c.key = Key{0, Mode::Major};
    c.time_signature = TimeSignature::FourFour;
    c.bpm = 120;
    c.division = 480;
    c.program = 0;
    c.num_bars = bars;
    for (int b = 0; b < bars; ++b) {
      c.notes.push_back(MidiNote{b * 1920, 480, 60 + (b % 12), 70});
    }
    return parse_bars(c);
  };

  SUBCASE("20 bars give 16 + 4") {
    const auto samples = run(20);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].metadata.num_measures == 16);
    CHECK(samples[1].metadata.num_measures == 4);
  }

  SUBCASE("7 bars give one 4-bar sample") {
    const auto samples = run(7);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].metadata.num_measures == 4);
    CHECK(samples[0].notes.size() == 4);
  }

  SUBCASE("3 bars give nothing") { CHECK(run(3).empty()); }

  SUBCASE("12 bars give 8 + 4") {
    const auto samples = run(12);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].metadata.num_measures == 8);
    CHECK(samples[1].metadata.num_measures == 4);
  }
}

TEST_CASE("parse_bars derives metadata") {
  Chunk c;
  c.key = Key{7, Mode::Major};
  c.time_signature = TimeSignature::FourFour;
  c.bpm = 95;
  c.division = 480;
  c.program = 33;  // electric bass
  c.num_bars = 4;
  c.notes = {MidiNote{0, 480, 64, 30}, MidiNote{1920, 480, 66, 90},
             MidiNote{3840, 480, 65, 60}};
  const auto samples = parse_bars(c);
  REQUIRE(samples.size() == 1);
  const MetadataSet& m = samples[0].metadata;
  CHECK(m.bpm == 95);
  CHECK(m.key == Key{7, Mode::Major});
  // Mean pitch (64+66+65)/3 = 65 -> mid, same as the bounds-table oracle.
  CHECK(m.pitch_range == PitchRange::Mid);
  CHECK(m.pitch_range == classify_mean_pitch(65.0));
  CHECK(m.instrument == Instrument::PluckedString);
  CHECK(m.min_velocity == Velocity{30});
  CHECK(m.max_velocity == Velocity{90});
  CHECK(!m.genre.has_value());
  CHECK(!m.track_role.has_value());
  CHECK(!m.rhythm.has_value());
  CHECK(validate_sample(samples[0]).empty());
}

TEST_CASE("ingested samples survive encoding") {
  std::vector<MidiNote> notes;
  std::mt19937_64 rng(9);
  for (int bar = 0; bar < 19; ++bar) {
    for (int k = 0; k < 3; ++k) {
      notes.push_back(MidiNote{bar * 1920 + k * 600, 300,
                               testutil::rand_int(rng, 30, 90),
                               testutil::rand_int(rng, 2, 127)});
    }
  }
  const MidiFile f = make_file(std::move(notes));
  const auto samples = ingest_midi(f, 2);
  CHECK(!samples.empty());
  for (const Sample& s : samples) {
    CHECK(validate_sample(s).empty());
    CHECK(validate_grammar(encode(s)).empty());
  }
}

TEST_CASE("program category map covers all 128 programs") {
  std::map<Instrument, int> counts;
  for (int p = 0; p < 128; ++p) counts[instrument_category(p)] += 1;
  CHECK(counts.size() == 8);  // every category inhabited
  CHECK(instrument_category(0) == Instrument::Keyboard);
  CHECK(instrument_category(25) == Instrument::PluckedString);
  CHECK(instrument_category(33) == Instrument::PluckedString);
  CHECK(instrument_category(48) == Instrument::String);
  CHECK(instrument_category(73) == Instrument::Wind);
  CHECK(instrument_category(81) == Instrument::Lead);
  CHECK(instrument_category(10) == Instrument::Idiophone);
  CHECK(instrument_category(115) == Instrument::Percussion);
  CHECK(instrument_category(123) == Instrument::Others);
  CHECK_THROWS(instrument_category(128));
  for (int i = 0; i < 8; ++i) {
    const auto inst = static_cast<Instrument>(i);
    CHECK(instrument_category(representative_program(inst)) == inst);
  }
}

TEST_CASE("glob expansion") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "commu_glob_test";
  fs::create_directories(dir);
  for (const char* name : {"a.mid", "b.mid", "c.midi", "d.txt"}) {
    std::ofstream(dir / name) << "x";
  }
  auto paths = expand_input_glob((dir / "*.mid").string());
  CHECK(paths.size() == 2);
  paths = expand_input_glob(dir.string());
  CHECK(paths.size() == 3);  // directory: *.mid and *.midi
  paths = expand_input_glob((dir / "?.mid").string());
  CHECK(paths.size() == 2);
  fs::remove_all(dir);
}
