#include "commu/vocabulary.hpp"

#include <stdexcept>
#include <string>

namespace commu {

namespace {

[[noreturn]] void bad_value(const std::string& what) {
  throw std::invalid_argument("vocabulary: " + what);
}

void require_category(Token t, TokenCategory c) {
  if (!in_category(t, c)) {
    bad_value("token " + std::to_string(t) + " not in category " +
              std::string(to_string(c)));
  }
}

constexpr std::array<std::string_view, 19> kCategoryNames = {
    "pad",           "eos",
    "bar",           "note_pitch",
    "note_velocity", "chord",
    "note_duration", "position",
    "bpm",           "key",
    "time_signature","pitch_range",
    "num_measures",  "instrument",
    "genre",         "min_velocity",
    "max_velocity",  "track_role",
    "rhythm"};

}  // namespace

std::string_view to_string(TokenCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

CategoryRange category_range(TokenCategory c) {
  return kCategoryRanges[static_cast<std::size_t>(c)];
}

bool in_category(Token t, TokenCategory c) {
  const CategoryRange r = category_range(c);
  return t >= r.lo && t <= r.hi;
}

std::vector<TokenCategory> categories_of(Token t) {
  std::vector<TokenCategory> out;
  for (const CategoryRange& r : kCategoryRanges) {
    if (t >= r.lo && t <= r.hi) out.push_back(r.category);
  }
  return out;
}

Token token_for_bpm(std::optional<int> bpm) {
  if (!bpm) return 560;
  if (*bpm < 5 || *bpm > 200 || *bpm % 5 != 0) {
    bad_value("bpm must be a multiple of 5 in 5..200: " + std::to_string(*bpm));
  }
  return static_cast<Token>(560 + *bpm / 5);
}

std::optional<int> bpm_from_token(Token t) {
  require_category(t, TokenCategory::Bpm);
  if (t == 560) return std::nullopt;
  return (t - 560) * 5;
}

Token token_for_key(std::optional<Key> key) {
  if (!key) return 601;
  const int index = key->root + (key->mode == Mode::Minor ? 12 : 0);
  return static_cast<Token>(601 + 1 + index);
}

std::optional<Key> key_from_token(Token t) {
  require_category(t, TokenCategory::Key);
  if (t == 601) return std::nullopt;
  const int index = t - 602;
  return Key{index % 12, index < 12 ? Mode::Major : Mode::Minor};
}

Token token_for_time_signature(std::optional<TimeSignature> ts) {
  if (!ts) return 626;
  return static_cast<Token>(627 + static_cast<int>(*ts));
}

std::optional<TimeSignature> time_signature_from_token(Token t) {
  require_category(t, TokenCategory::TimeSignature);
  if (t == 626) return std::nullopt;
  return static_cast<TimeSignature>(t - 627);
}

Token token_for_pitch_range(std::optional<PitchRange> r) {
  if (!r) return 630;
  return static_cast<Token>(631 + static_cast<int>(*r));
}

std::optional<PitchRange> pitch_range_from_token(Token t) {
  require_category(t, TokenCategory::PitchRange);
  if (t == 630) return std::nullopt;
  return static_cast<PitchRange>(t - 631);
}

Token token_for_num_measures(int n) {
  switch (n) {
    case 4: return 638;
    case 8: return 639;
    case 16: return 640;
  }
  bad_value("num_measures must be 4, 8 or 16: " + std::to_string(n));
}

int num_measures_from_token(Token t) {
  require_category(t, TokenCategory::NumMeasures);
  switch (t) {
    case 638: return 4;
    case 639: return 8;
    default: return 16;
  }
}

Token token_for_instrument(std::optional<Instrument> i) {
  if (!i) return 641;
  return static_cast<Token>(642 + static_cast<int>(*i));
}

std::optional<Instrument> instrument_from_token(Token t) {
  require_category(t, TokenCategory::Instrument);
  if (t == 641) return std::nullopt;
  return static_cast<Instrument>(t - 642);
}

Token token_for_genre(std::optional<Genre> g) {
  if (!g) return 650;
  return static_cast<Token>(651 + static_cast<int>(*g));
}

std::optional<Genre> genre_from_token(Token t) {
  require_category(t, TokenCategory::Genre);
  if (t == 650) return std::nullopt;
  return static_cast<Genre>(t - 651);
}

namespace {

Token velocity_meta_token(std::optional<Velocity> v, const char* what) {
  if (!v) return 653;
  if (v->value < 0 || v->value > 127) {
    bad_value(std::string(what) + " out of range: " + std::to_string(v->value));
  }
  return static_cast<Token>(654 + v->bin());
}

}  // namespace

Token token_for_min_velocity(std::optional<Velocity> v) {
  return velocity_meta_token(v, "min velocity");
}

std::optional<Velocity> min_velocity_from_token(Token t) {
  require_category(t, TokenCategory::MinVelocity);
  if (t == 653) return std::nullopt;
  return Velocity::from_bin(t - 654);
}

Token token_for_max_velocity(std::optional<Velocity> v) {
  return velocity_meta_token(v, "max velocity");
}

std::optional<Velocity> max_velocity_from_token(Token t) {
  require_category(t, TokenCategory::MaxVelocity);
  if (t == 653) return std::nullopt;
  // 718 is the dictionary's extra max-velocity slot: never emitted, decoded
  // as the top of the range.
  if (t == 718) return Velocity{127};
  return Velocity::from_bin(t - 654);
}

Token token_for_track_role(std::optional<TrackRole> r) {
  if (!r) return 719;
  return static_cast<Token>(720 + static_cast<int>(*r));
}

std::optional<TrackRole> track_role_from_token(Token t) {
  require_category(t, TokenCategory::TrackRole);
  if (t == 719) return std::nullopt;
  return static_cast<TrackRole>(t - 720);
}

Token token_for_rhythm(std::optional<Rhythm> r) {
  if (!r) return 726;
  return static_cast<Token>(727 + static_cast<int>(*r));
}

std::optional<Rhythm> rhythm_from_token(Token t) {
  require_category(t, TokenCategory::Rhythm);
  if (t == 726) return std::nullopt;
  return static_cast<Rhythm>(t - 727);
}

Token token_for_pitch(int pitch) {
  if (pitch < 0 || pitch > 127) {
    bad_value("pitch out of range: " + std::to_string(pitch));
  }
  return static_cast<Token>(3 + pitch);
}

int pitch_from_token(Token t) {
  require_category(t, TokenCategory::NotePitch);
  return t - 3;
}

Token token_for_note_velocity(Velocity v) {
  if (v.value < 0 || v.value > 127) {
    bad_value("velocity out of range: " + std::to_string(v.value));
  }
  return static_cast<Token>(131 + v.bin());
}

Velocity note_velocity_from_token(Token t) {
  require_category(t, TokenCategory::NoteVelocity);
  return Velocity::from_bin(t - 131);
}

Token token_for_duration(int duration) {
  if (duration < 1 || duration > 128) {
    bad_value("duration out of range: " + std::to_string(duration));
  }
  return static_cast<Token>(304 + duration - 1);
}

int duration_from_token(Token t) {
  require_category(t, TokenCategory::NoteDuration);
  return t - 304 + 1;
}

Token token_for_position(int position) {
  if (position < 0 || position > 127) {
    bad_value("position out of range: " + std::to_string(position));
  }
  return static_cast<Token>(432 + position);
}

int position_from_token(Token t) {
  require_category(t, TokenCategory::Position);
  return t - 432;
}

Token token_for_chord(const ChordSymbol& c) {
  if (c.root < 0 || c.root > 11) {
    bad_value("chord root out of range: " + std::to_string(c.root));
  }
  return static_cast<Token>(196 + kNumChordQualities * c.root +
                            static_cast<int>(c.quality));
}

std::optional<ChordSymbol> chord_from_token(Token t) {
  require_category(t, TokenCategory::Chord);
  if (t == kUnknownChordToken) return std::nullopt;
  const int index = t - 196;
  return ChordSymbol{index / kNumChordQualities,
                     static_cast<ChordQuality>(index % kNumChordQualities)};
}

}  // namespace commu
