#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "commu/chord.hpp"
#include "commu/types.hpp"

namespace commu {

using Token = std::uint16_t;
using TokenSequence = std::vector<Token>;

inline constexpr int kVocabularySize = 729;
inline constexpr int kVocabularyVersion = 1;

inline constexpr Token kPadToken = 0;
inline constexpr Token kEosToken = 1;
inline constexpr Token kBarToken = 2;
inline constexpr Token kUnknownChordToken = 195;

// Metadata prefix order: bpm, key, time signature, pitch range, num
// measures, instrument, genre, min velocity, max velocity, track role,
// rhythm.
inline constexpr int kMetadataTokenCount = 11;

enum class TokenCategory : std::uint8_t {
  Pad,
  Eos,
  Bar,
  NotePitch,
  NoteVelocity,
  Chord,
  NoteDuration,
  Position,
  Bpm,
  Key,
  TimeSignature,
  PitchRange,
  NumMeasures,
  Instrument,
  Genre,
  MinVelocity,
  MaxVelocity,
  TrackRole,
  Rhythm
};

struct CategoryRange {
  TokenCategory category;
  Token lo;
  Token hi;  // inclusive
};

// The encoding dictionary. Min and max velocity intentionally share
// 653..717; 718 is a max-velocity-only value accepted on input but never
// emitted (decoded as the bin-64 alias of velocity 127).
inline constexpr std::array<CategoryRange, 19> kCategoryRanges = {{
    {TokenCategory::Pad, 0, 0},
    {TokenCategory::Eos, 1, 1},
    {TokenCategory::Bar, 2, 2},
    {TokenCategory::NotePitch, 3, 130},
    {TokenCategory::NoteVelocity, 131, 194},
    {TokenCategory::Chord, 195, 303},
    {TokenCategory::NoteDuration, 304, 431},
    {TokenCategory::Position, 432, 559},
    {TokenCategory::Bpm, 560, 600},
    {TokenCategory::Key, 601, 625},
    {TokenCategory::TimeSignature, 626, 629},
    {TokenCategory::PitchRange, 630, 637},
    {TokenCategory::NumMeasures, 638, 640},
    {TokenCategory::Instrument, 641, 649},
    {TokenCategory::Genre, 650, 652},
    {TokenCategory::MinVelocity, 653, 717},
    {TokenCategory::MaxVelocity, 653, 718},
    {TokenCategory::TrackRole, 719, 725},
    {TokenCategory::Rhythm, 726, 728},
}};

std::string_view to_string(TokenCategory c);
CategoryRange category_range(TokenCategory c);
bool in_category(Token t, TokenCategory c);

// Every token belongs to exactly one category except 653..717 (min and max
// velocity), for which both are returned.
std::vector<TokenCategory> categories_of(Token t);

// ---------------------------------------------------------------------------
// Value <-> token maps. Encoders throw std::invalid_argument on values
// outside the dictionary; std::nullopt metadata maps to the category's
// unknown token. Decoders throw when the token is outside the category.
// ---------------------------------------------------------------------------

Token token_for_bpm(std::optional<int> bpm);
std::optional<int> bpm_from_token(Token t);

Token token_for_key(std::optional<Key> key);
std::optional<Key> key_from_token(Token t);

Token token_for_time_signature(std::optional<TimeSignature> ts);
std::optional<TimeSignature> time_signature_from_token(Token t);

Token token_for_pitch_range(std::optional<PitchRange> r);
std::optional<PitchRange> pitch_range_from_token(Token t);

Token token_for_num_measures(int n);  // no unknown slot; n must be 4/8/16
int num_measures_from_token(Token t);

Token token_for_instrument(std::optional<Instrument> i);
std::optional<Instrument> instrument_from_token(Token t);

Token token_for_genre(std::optional<Genre> g);
std::optional<Genre> genre_from_token(Token t);

Token token_for_min_velocity(std::optional<Velocity> v);
std::optional<Velocity> min_velocity_from_token(Token t);

Token token_for_max_velocity(std::optional<Velocity> v);
std::optional<Velocity> max_velocity_from_token(Token t);

Token token_for_track_role(std::optional<TrackRole> r);
std::optional<TrackRole> track_role_from_token(Token t);

Token token_for_rhythm(std::optional<Rhythm> r);
std::optional<Rhythm> rhythm_from_token(Token t);

Token token_for_pitch(int pitch);  // 0..127
int pitch_from_token(Token t);

Token token_for_note_velocity(Velocity v);
Velocity note_velocity_from_token(Token t);  // bin representative 2*bin+1

Token token_for_duration(int duration);  // 1..128
int duration_from_token(Token t);

Token token_for_position(int position);  // 0..127
int position_from_token(Token t);

Token token_for_chord(const ChordSymbol& c);
// 195, the unknown chord, yields std::nullopt.
std::optional<ChordSymbol> chord_from_token(Token t);

}  // namespace commu
