#include "commu/token_codec.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

namespace commu {

namespace {

std::string token_str(Token t) { return std::to_string(t); }

// Shared parser behind decode and validate_grammar. Walks the sequence,
// builds the sample, and stops at the first grammar violation.
struct ParseResult {
  Sample sample;
  bool ok = true;
  std::size_t error_index = 0;
  std::string error;
};

void fail(ParseResult& r, std::size_t index, const std::string& message) {
  r.ok = false;
  r.error_index = index;
  r.error = message;
}

ParseResult parse_tokens(const TokenSequence& tokens) {
  ParseResult r;
  Sample& s = r.sample;

  if (tokens.size() < kMetadataTokenCount) {
    fail(r, tokens.size(), "truncated metadata prefix (metadata has 11 tokens)");
    return r;
  }

  // Metadata prefix; slot position decides the category, which also
  // disambiguates the shared min/max velocity range.
  try {
    std::size_t i = 0;
    s.metadata.bpm = bpm_from_token(tokens[i++]);
    s.metadata.key = key_from_token(tokens[i++]);
    s.metadata.time_signature = time_signature_from_token(tokens[i++]);
    s.metadata.pitch_range = pitch_range_from_token(tokens[i++]);
    s.metadata.num_measures = num_measures_from_token(tokens[i++]);
    s.metadata.instrument = instrument_from_token(tokens[i++]);
    s.metadata.genre = genre_from_token(tokens[i++]);
    s.metadata.min_velocity = min_velocity_from_token(tokens[i++]);
    s.metadata.max_velocity = max_velocity_from_token(tokens[i++]);
    s.metadata.track_role = track_role_from_token(tokens[i++]);
    s.metadata.rhythm = rhythm_from_token(tokens[i++]);
  } catch (const std::invalid_argument& e) {
    // Re-scan to find the offending slot for a precise index.
    for (std::size_t i = 0; i < kMetadataTokenCount; ++i) {
      static constexpr std::array<TokenCategory, kMetadataTokenCount> slots = {
          TokenCategory::Bpm,          TokenCategory::Key,
          TokenCategory::TimeSignature, TokenCategory::PitchRange,
          TokenCategory::NumMeasures,  TokenCategory::Instrument,
          TokenCategory::Genre,        TokenCategory::MinVelocity,
          TokenCategory::MaxVelocity,  TokenCategory::TrackRole,
          TokenCategory::Rhythm};
      if (!in_category(tokens[i], slots[i])) {
        fail(r, i,
             "metadata slot " + std::to_string(i) + " expects " +
                 std::string(to_string(slots[i])) + ", got " +
                 token_str(tokens[i]));
        return r;
      }
    }
    fail(r, 0, e.what());
    return r;
  }

  const int num_measures = s.metadata.num_measures;

  enum class Phase { AtBoundary, NeedVelocity, NeedPitch, NeedDuration };
  Phase phase = Phase::AtBoundary;
  int bar_count = 0;
  int cur_pos = 0;
  int last_pitch = -1;  // last note pitch at cur_pos; -1 = none yet
  int pending_position = 0;
  Velocity pending_velocity;
  int pending_pitch = 0;
  bool saw_eos = false;

  for (std::size_t i = kMetadataTokenCount; i < tokens.size(); ++i) {
    const Token t = tokens[i];
    if (saw_eos) {
      fail(r, i, "token after eos: " + token_str(t));
      return r;
    }
    switch (phase) {
      case Phase::AtBoundary: {
        if (t >= 560) {
          fail(r, i, "metadata overrun: metadata-category token " +
                         token_str(t) + " in body (12th token in metadata slot range)");
          return r;
        }
        if (t == kBarToken) {
          if (bar_count >= num_measures) {
            fail(r, i, "bar count exceeds num_measures (" +
                           std::to_string(num_measures) + ")");
            return r;
          }
          ++bar_count;
          cur_pos = 0;
          last_pitch = -1;
          break;
        }
        if (t == kEosToken) {
          if (bar_count != num_measures) {
            fail(r, i, "eos with " + std::to_string(bar_count) +
                           " bars, expected " + std::to_string(num_measures));
            return r;
          }
          saw_eos = true;
          break;
        }
        if (in_category(t, TokenCategory::Position)) {
          if (bar_count == 0) {
            fail(r, i, "position token before first bar token");
            return r;
          }
          const int p = position_from_token(t);
          if (p < cur_pos) {
            fail(r, i, "position moves backwards within bar: " +
                           std::to_string(p) + " < " + std::to_string(cur_pos));
            return r;
          }
          pending_position = p;
          phase = Phase::NeedVelocity;
          break;
        }
        fail(r, i, "expected bar, position or eos token, got " + token_str(t));
        return r;
      }
      case Phase::NeedVelocity: {
        if (in_category(t, TokenCategory::Chord)) {
          // Chord event: position token followed directly by a chord token.
          const int p = pending_position;
          if (p == cur_pos && last_pitch >= 0) {
            fail(r, i, "chord after note at the same grid point");
            return r;
          }
          if (!s.chords.empty()) {
            const ChordEvent& prev = s.chords.back();
            if (std::tuple(prev.bar, prev.position) ==
                std::tuple(bar_count - 1, p)) {
              fail(r, i, "duplicate chord at one grid point");
              return r;
            }
          }
          auto chord = chord_from_token(t);
          if (!chord) {
            fail(r, i, "unknown-chord token 195 is not decodable");
            return r;
          }
          if (p > cur_pos) last_pitch = -1;
          cur_pos = p;
          s.chords.push_back(ChordEvent{bar_count - 1, p, *chord});
          phase = Phase::AtBoundary;
          break;
        }
        if (in_category(t, TokenCategory::NoteVelocity)) {
          pending_velocity = note_velocity_from_token(t);
          phase = Phase::NeedPitch;
          break;
        }
        fail(r, i, "expected velocity or chord token after position, got " +
                       token_str(t));
        return r;
      }
      case Phase::NeedPitch: {
        if (!in_category(t, TokenCategory::NotePitch)) {
          fail(r, i, "expected pitch token, got " + token_str(t));
          return r;
        }
        const int pitch = pitch_from_token(t);
        if (pending_position == cur_pos && last_pitch >= 0 &&
            pitch <= last_pitch) {
          fail(r, i, "notes at one position must have strictly ascending pitch");
          return r;
        }
        pending_pitch = pitch;
        phase = Phase::NeedDuration;
        break;
      }
      case Phase::NeedDuration: {
        if (!in_category(t, TokenCategory::NoteDuration)) {
          fail(r, i, "expected duration token, got " + token_str(t));
          return r;
        }
        const int duration = duration_from_token(t);
        if (pending_position > cur_pos) last_pitch = -1;
        cur_pos = pending_position;
        last_pitch = pending_pitch;
        s.notes.push_back(Note{bar_count - 1, pending_position, pending_pitch,
                               pending_velocity, duration});
        phase = Phase::AtBoundary;
        break;
      }
    }
  }

  if (!saw_eos) {
    if (phase != Phase::AtBoundary) {
      fail(r, tokens.size(), "truncated note event (missing eos)");
    } else {
      fail(r, tokens.size(), "missing eos");
    }
  }
  return r;
}

}  // namespace

TokenSequence encode_metadata(const MetadataSet& m) {
  try {
    return TokenSequence{
        token_for_bpm(m.bpm),
        token_for_key(m.key),
        token_for_time_signature(m.time_signature),
        token_for_pitch_range(m.pitch_range),
        token_for_num_measures(m.num_measures),
        token_for_instrument(m.instrument),
        token_for_genre(m.genre),
        token_for_min_velocity(m.min_velocity),
        token_for_max_velocity(m.max_velocity),
        token_for_track_role(m.track_role),
        token_for_rhythm(m.rhythm),
    };
  } catch (const std::invalid_argument& e) {
    throw CodecError(CodecError::npos, e.what());
  }
}

TokenSequence encode_body(std::span<const ChordEvent> chords,
                          std::span<const Note> notes, int num_measures) {
  if (!is_valid_num_measures(num_measures)) {
    throw CodecError(CodecError::npos, "num_measures must be 4, 8 or 16");
  }

  std::vector<ChordEvent> cs(chords.begin(), chords.end());
  std::vector<Note> ns(notes.begin(), notes.end());
  std::sort(cs.begin(), cs.end(), [](const ChordEvent& a, const ChordEvent& b) {
    return std::tuple(a.bar, a.position) < std::tuple(b.bar, b.position);
  });
  std::sort(ns.begin(), ns.end(), [](const Note& a, const Note& b) {
    return std::tuple(a.bar, a.position, a.pitch) <
           std::tuple(b.bar, b.position, b.pitch);
  });

  auto check_event = [&](int bar, int position, const char* what) {
    if (bar < 0 || bar >= num_measures) {
      throw CodecError(CodecError::npos,
                       std::string(what) + " beyond num_measures: bar " +
                           std::to_string(bar));
    }
    if (position < 0 || position >= kGridPerBar) {
      throw CodecError(CodecError::npos,
                       std::string(what) + " position off the 128 grid: " +
                           std::to_string(position));
    }
  };
  for (std::size_t i = 0; i < cs.size(); ++i) {
    check_event(cs[i].bar, cs[i].position, "chord");
    if (i > 0 && std::tuple(cs[i - 1].bar, cs[i - 1].position) ==
                     std::tuple(cs[i].bar, cs[i].position)) {
      throw CodecError(CodecError::npos, "duplicate chord at one grid point");
    }
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    check_event(ns[i].bar, ns[i].position, "note");
    if (i > 0 && std::tuple(ns[i - 1].bar, ns[i - 1].position, ns[i - 1].pitch) ==
                     std::tuple(ns[i].bar, ns[i].position, ns[i].pitch)) {
      throw CodecError(CodecError::npos,
                       "duplicate note at one (bar, position, pitch)");
    }
  }

  TokenSequence out;
  out.reserve(1 + cs.size() * 2 + ns.size() * 4 + num_measures);

  std::size_t ci = 0;
  std::size_t ni = 0;
  try {
    for (int bar = 0; bar < num_measures; ++bar) {
      out.push_back(kBarToken);
      while (true) {
        const bool chord_here = ci < cs.size() && cs[ci].bar == bar;
        const bool note_here = ni < ns.size() && ns[ni].bar == bar;
        if (!chord_here && !note_here) break;
        // Chord first at equal positions.
        bool take_chord = chord_here;
        if (chord_here && note_here &&
            ns[ni].position < cs[ci].position) {
          take_chord = false;
        }
        if (take_chord) {
          out.push_back(token_for_position(cs[ci].position));
          out.push_back(token_for_chord(cs[ci].chord));
          ++ci;
        } else {
          out.push_back(token_for_position(ns[ni].position));
          out.push_back(token_for_note_velocity(ns[ni].velocity));
          out.push_back(token_for_pitch(ns[ni].pitch));
          out.push_back(token_for_duration(ns[ni].duration));
          ++ni;
        }
      }
    }
  } catch (const std::invalid_argument& e) {
    throw CodecError(CodecError::npos, e.what());
  }
  out.push_back(kEosToken);
  return out;
}

TokenSequence encode(const Sample& sample) {
  TokenSequence out = encode_metadata(sample.metadata);
  TokenSequence body =
      encode_body(sample.chords, sample.notes, sample.metadata.num_measures);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Sample decode(const TokenSequence& tokens) {
  ParseResult r = parse_tokens(tokens);
  if (!r.ok) throw CodecError(r.error_index, r.error);
  return std::move(r.sample);
}

std::vector<std::string> validate_grammar(const TokenSequence& tokens) {
  ParseResult r = parse_tokens(tokens);
  if (r.ok) return {};
  return {"[token " + std::to_string(r.error_index) + "] " + r.error};
}

}  // namespace commu
