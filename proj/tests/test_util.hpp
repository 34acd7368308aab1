#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "commu/sample.hpp"
#include "commu/vocabulary.hpp"

namespace commu::testutil {

struct SampleGenOptions {
  // Clamp-free bpm window keeps the augmentation identity variant unique.
  int min_bpm = 15;
  int max_bpm = 190;
  // Fold-free pitch window: +/-6 semitone transposition stays in 0..127.
  int min_pitch = 12;
  int max_pitch = 115;
  int max_notes = 24;
  int max_chords = 6;
};

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// A random sample that satisfies every validator invariant.
inline Sample random_sample(std::mt19937_64& rng,
                            const SampleGenOptions& opt = {}) {
  Sample s;
  MetadataSet& m = s.metadata;
  m.bpm = rand_int(rng, opt.min_bpm / 5, opt.max_bpm / 5) * 5;
  m.key = Key{rand_int(rng, 0, 11),
              rng() % 2 == 0 ? Mode::Major : Mode::Minor};
  m.time_signature = static_cast<TimeSignature>(rand_int(rng, 0, 2));
  m.pitch_range = static_cast<PitchRange>(rand_int(rng, 0, 6));
  m.num_measures = std::array<int, 3>{4, 8, 16}[rand_int(rng, 0, 2)];
  m.instrument = static_cast<Instrument>(rand_int(rng, 0, 7));
  m.genre = static_cast<Genre>(rand_int(rng, 0, 1));
  const int va = rand_int(rng, 2, 127);
  const int vb = rand_int(rng, 2, 127);
  m.min_velocity = Velocity{std::min(va, vb)};
  m.max_velocity = Velocity{std::max(va, vb)};
  m.track_role = static_cast<TrackRole>(rand_int(rng, 0, 5));
  m.rhythm = static_cast<Rhythm>(rand_int(rng, 0, 1));

  std::set<std::pair<int, int>> chord_points;
  const int num_chords = rand_int(rng, 1, opt.max_chords);
  for (int i = 0; i < num_chords; ++i) {
    chord_points.insert({rand_int(rng, 0, m.num_measures - 1),
                         rand_int(rng, 0, kGridPerBar - 1)});
  }
  for (const auto& [bar, pos] : chord_points) {
    s.chords.push_back(
        ChordEvent{bar, pos,
                   ChordSymbol{rand_int(rng, 0, 11),
                               static_cast<ChordQuality>(rand_int(rng, 0, 8))}});
  }

  std::set<std::tuple<int, int, int>> note_points;
  const int num_notes = rand_int(rng, 1, opt.max_notes);
  for (int i = 0; i < num_notes; ++i) {
    note_points.insert({rand_int(rng, 0, m.num_measures - 1),
                        rand_int(rng, 0, kGridPerBar - 1),
                        rand_int(rng, opt.min_pitch, opt.max_pitch)});
  }
  for (const auto& [bar, pos, pitch] : note_points) {
    s.notes.push_back(Note{bar, pos, pitch,
                           Velocity{rand_int(rng, 2, 127)},
                           rand_int(rng, 1, kGridPerBar)});
  }
  return s;
}

// A random grammar-valid token sequence built directly at token level —
// an independent route from Sample + encode.
inline TokenSequence random_canonical_tokens(std::mt19937_64& rng) {
  TokenSequence t;
  t.push_back(static_cast<Token>(rand_int(rng, 560, 600)));  // bpm
  t.push_back(static_cast<Token>(rand_int(rng, 601, 625)));  // key
  t.push_back(static_cast<Token>(rand_int(rng, 626, 629)));  // time signature
  t.push_back(static_cast<Token>(rand_int(rng, 630, 637)));  // pitch range
  const Token nm = static_cast<Token>(rand_int(rng, 638, 640));
  t.push_back(nm);
  t.push_back(static_cast<Token>(rand_int(rng, 641, 649)));  // instrument
  t.push_back(static_cast<Token>(rand_int(rng, 650, 652)));  // genre
  t.push_back(static_cast<Token>(rand_int(rng, 653, 717)));  // min velocity
  t.push_back(static_cast<Token>(rand_int(rng, 653, 717)));  // max velocity;
                                                             // 718 is never
                                                             // emitted
  t.push_back(static_cast<Token>(rand_int(rng, 719, 725)));  // track role
  t.push_back(static_cast<Token>(rand_int(rng, 726, 728)));  // rhythm

  const int bars = nm == 638 ? 4 : nm == 639 ? 8 : 16;
  for (int b = 0; b < bars; ++b) {
    t.push_back(kBarToken);
    int pos = 0;
    bool chord_here = false;
    int last_pitch = -1;
    const int events = rand_int(rng, 0, 6);
    for (int e = 0; e < events; ++e) {
      const int p = pos + rand_int(rng, 0, 40);
      if (p > 127) break;
      if (p > pos) {
        pos = p;
        chord_here = false;
        last_pitch = -1;
      }
      if (!chord_here && last_pitch < 0 && rng() % 4 == 0) {
        t.push_back(static_cast<Token>(432 + pos));
        t.push_back(static_cast<Token>(rand_int(rng, 196, 303)));
        chord_here = true;
      } else {
        if (last_pitch >= 127) continue;
        const int pitch = rand_int(rng, last_pitch + 1, 127);
        t.push_back(static_cast<Token>(432 + pos));
        t.push_back(static_cast<Token>(rand_int(rng, 131, 194)));
        t.push_back(static_cast<Token>(3 + pitch));
        t.push_back(static_cast<Token>(rand_int(rng, 304, 431)));
        last_pitch = pitch;
      }
    }
  }
  t.push_back(kEosToken);
  return t;
}

// Minimal deterministic sample for example-based tests.
inline Sample basic_sample() {
  Sample s;
  s.metadata.bpm = 120;
  s.metadata.key = Key{0, Mode::Major};
  s.metadata.time_signature = TimeSignature::FourFour;
  s.metadata.pitch_range = PitchRange::Mid;
  s.metadata.num_measures = 4;
  s.metadata.instrument = Instrument::Keyboard;
  s.metadata.genre = Genre::NewAge;
  s.metadata.min_velocity = Velocity{40};
  s.metadata.max_velocity = Velocity{80};
  s.metadata.track_role = TrackRole::MainMelody;
  s.metadata.rhythm = Rhythm::Standard;
  s.chords = {ChordEvent{0, 0, ChordSymbol{0, ChordQuality::Maj}},
              ChordEvent{2, 0, ChordSymbol{7, ChordQuality::Dom7}}};
  s.notes = {Note{0, 0, 60, Velocity{64}, 32},
             Note{0, 64, 64, Velocity{64}, 32},
             Note{1, 0, 67, Velocity{70}, 64},
             Note{2, 0, 62, Velocity{60}, 32},
             Note{3, 0, 60, Velocity{66}, 128}};
  return s;
}

}  // namespace commu::testutil
