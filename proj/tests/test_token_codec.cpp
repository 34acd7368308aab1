#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <nlohmann/json.hpp>

#include "commu/sample_json.hpp"
#include "commu/token_codec.hpp"
#include "commu/token_io.hpp"
#include "test_util.hpp"

using namespace commu;

TEST_CASE("dictionary ranges match the published table") {
  auto range = [](TokenCategory c) { return category_range(c); };
  CHECK(range(TokenCategory::Pad).lo == 0);
  CHECK(range(TokenCategory::Pad).hi == 0);
  CHECK(range(TokenCategory::Eos).lo == 1);
  CHECK(range(TokenCategory::Bar).lo == 2);
  CHECK(range(TokenCategory::NotePitch).lo == 3);
  CHECK(range(TokenCategory::NotePitch).hi == 130);
  CHECK(range(TokenCategory::NoteVelocity).lo == 131);
  CHECK(range(TokenCategory::NoteVelocity).hi == 194);
  CHECK(range(TokenCategory::Chord).lo == 195);
  CHECK(range(TokenCategory::Chord).hi == 303);
  CHECK(range(TokenCategory::NoteDuration).lo == 304);
  CHECK(range(TokenCategory::NoteDuration).hi == 431);
  CHECK(range(TokenCategory::Position).lo == 432);
  CHECK(range(TokenCategory::Position).hi == 559);
  CHECK(range(TokenCategory::Bpm).lo == 560);
  CHECK(range(TokenCategory::Bpm).hi == 600);
  CHECK(range(TokenCategory::Key).lo == 601);
  CHECK(range(TokenCategory::Key).hi == 625);
  CHECK(range(TokenCategory::TimeSignature).lo == 626);
  CHECK(range(TokenCategory::TimeSignature).hi == 629);
  CHECK(range(TokenCategory::PitchRange).lo == 630);
  CHECK(range(TokenCategory::PitchRange).hi == 637);
  CHECK(range(TokenCategory::NumMeasures).lo == 638);
  CHECK(range(TokenCategory::NumMeasures).hi == 640);
  CHECK(range(TokenCategory::Instrument).lo == 641);
  CHECK(range(TokenCategory::Instrument).hi == 649);
  CHECK(range(TokenCategory::Genre).lo == 650);
  CHECK(range(TokenCategory::Genre).hi == 652);
  CHECK(range(TokenCategory::MinVelocity).lo == 653);
  CHECK(range(TokenCategory::MinVelocity).hi == 717);
  CHECK(range(TokenCategory::MaxVelocity).lo == 653);
  CHECK(range(TokenCategory::MaxVelocity).hi == 718);
  CHECK(range(TokenCategory::TrackRole).lo == 719);
  CHECK(range(TokenCategory::TrackRole).hi == 725);
  CHECK(range(TokenCategory::Rhythm).lo == 726);
  CHECK(range(TokenCategory::Rhythm).hi == 728);
}

TEST_CASE("every token belongs to exactly one category modulo the velocity overlap") {
  for (int t = 0; t < kVocabularySize; ++t) {
    const auto cats = categories_of(static_cast<Token>(t));
    if (t >= 653 && t <= 717) {
      REQUIRE(cats.size() == 2);
      CHECK(cats[0] == TokenCategory::MinVelocity);
      CHECK(cats[1] == TokenCategory::MaxVelocity);
    } else {
      REQUIRE(cats.size() == 1);
    }
  }
  CHECK(categories_of(718) ==
        std::vector<TokenCategory>{TokenCategory::MaxVelocity});
}

TEST_CASE("metadata token examples") {
  CHECK(kBarToken == 2);
  CHECK(token_for_bpm(130) == 586);
  CHECK(token_for_key(Key{9, Mode::Major}) == 611);  // amajor
  CHECK(token_for_min_velocity(Velocity{40}) == 674);
  CHECK(token_for_bpm(std::nullopt) == 560);
  CHECK(token_for_bpm(5) == 561);
  CHECK(token_for_bpm(200) == 600);
  CHECK(token_for_key(Key{0, Mode::Major}) == 602);
  CHECK(token_for_key(Key{11, Mode::Minor}) == 625);
  CHECK(token_for_num_measures(4) == 638);
  CHECK(token_for_num_measures(16) == 640);
  CHECK_THROWS_AS(token_for_num_measures(9), std::invalid_argument);
  CHECK_THROWS_AS(token_for_bpm(131), std::invalid_argument);
  CHECK(token_for_rhythm(Rhythm::Triplet) == 728);
  CHECK(token_for_track_role(TrackRole::Riff) == 725);
}

TEST_CASE("body token examples") {
  CHECK(token_for_position(64) == 496);  // beat 3 of a 4/4 bar
  CHECK(token_for_chord(ChordSymbol{0, ChordQuality::Maj}) == 196);
  CHECK(token_for_chord(ChordSymbol{11, ChordQuality::Sus4}) == 303);
  CHECK(token_for_duration(32) == 335);  // quarter note in 4/4
  CHECK(pitch_from_token(130) == 127);   // G8
  CHECK(token_for_pitch(0) == 3);
  CHECK(note_velocity_from_token(131).value == 1);
  CHECK(note_velocity_from_token(131 + 32).value == 65);
}

TEST_CASE("chord tokens cover 196..303 bijectively") {
  std::map<Token, ChordSymbol> seen;
  for (const ChordSymbol& c : all_chord_symbols()) {
    const Token t = token_for_chord(c);
    CHECK(t >= 196);
    CHECK(t <= 303);
    CHECK(!seen.count(t));
    seen[t] = c;
  }
  CHECK(seen.size() == 108);
  for (Token t = 196; t <= 303; ++t) {
    const auto c = chord_from_token(t);
    REQUIRE(c.has_value());
    CHECK(token_for_chord(*c) == t);
  }
  CHECK(!chord_from_token(kUnknownChordToken).has_value());
}

TEST_CASE("metadata prefix layout") {
  const Sample s = testutil::basic_sample();
  const TokenSequence meta = encode_metadata(s.metadata);
  REQUIRE(meta.size() == 11);
  CHECK(meta[0] == 584);  // bpm 120
  CHECK(meta[1] == 602);  // cmajor
  CHECK(meta[2] == 627);  // 4/4
  CHECK(meta[3] == 634);  // mid
  CHECK(meta[4] == 638);  // 4 measures
  CHECK(meta[5] == 642);  // keyboard
  CHECK(meta[6] == 651);  // newage
  CHECK(meta[7] == 674);  // min velocity 40
  CHECK(meta[8] == 694);  // max velocity 80
  CHECK(meta[9] == 720);  // main melody
  CHECK(meta[10] == 727); // standard
}

TEST_CASE("unknown metadata round-trips through the unknown tokens") {
  Sample s = testutil::basic_sample();
  s.metadata.genre = std::nullopt;
  s.metadata.track_role = std::nullopt;
  s.metadata.bpm = std::nullopt;
  const TokenSequence tokens = encode(s);
  CHECK(tokens[0] == 560);
  CHECK(tokens[6] == 650);
  CHECK(tokens[9] == 719);
  const Sample back = decode(tokens);
  CHECK(!back.metadata.bpm.has_value());
  CHECK(!back.metadata.genre.has_value());
  CHECK(!back.metadata.track_role.has_value());
  CHECK(back.metadata.num_measures == 4);
}

TEST_CASE("decode inverts encode at bin level") {
  const Sample s = testutil::basic_sample();
  const Sample back = decode(encode(s));
  CHECK(equal_at_bin_level(back, s));
  CHECK(back.metadata.min_velocity->bin() == s.metadata.min_velocity->bin());
  CHECK(back.chords == s.chords);
}

TEST_CASE("randomised roundtrips") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    const Sample s = testutil::random_sample(rng);
    const TokenSequence tokens = encode(s);
    CHECK(validate_grammar(tokens).empty());
    CHECK(equal_at_bin_level(decode(tokens), s));
  }
  for (int i = 0; i < 300; ++i) {
    const TokenSequence t = testutil::random_canonical_tokens(rng);
    REQUIRE(validate_grammar(t).empty());
    CHECK(encode(decode(t)) == t);
  }
}

TEST_CASE("emitted position tokens stay on the grid") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    for (Token t : encode(testutil::random_sample(rng))) {
      if (in_category(t, TokenCategory::Position)) {
        CHECK(t - 432 >= 0);
        CHECK(t - 432 <= 127);
      }
    }
  }
}

TEST_CASE("grammar violations") {
  const Sample s = testutil::basic_sample();
  TokenSequence good = encode(s);

  SUBCASE("missing eos") {
    TokenSequence t = good;
    t.pop_back();
    const auto report = validate_grammar(t);
    REQUIRE(!report.empty());
    CHECK(report[0].find("missing eos") != std::string::npos);
  }

  SUBCASE("velocity followed by duration reports expected pitch") {
    // bar, position, velocity, duration
    TokenSequence t(good.begin(), good.begin() + 11);
    t.push_back(kBarToken);
    t.push_back(432);
    t.push_back(150);
    t.push_back(310);
    const auto report = validate_grammar(t);
    REQUIRE(!report.empty());
    CHECK(report[0].find("expected pitch") != std::string::npos);
  }

  SUBCASE("12th metadata-range token reports overrun") {
    TokenSequence t(good.begin(), good.begin() + 11);
    t.push_back(600);
    const auto report = validate_grammar(t);
    REQUIRE(!report.empty());
    CHECK(report[0].find("metadata overrun") != std::string::npos);
  }

  SUBCASE("bar count must match num_measures") {
    TokenSequence t(good.begin(), good.begin() + 11);
    t.push_back(kBarToken);
    t.push_back(kEosToken);
    CHECK(!validate_grammar(t).empty());
  }

  SUBCASE("positions cannot move backwards") {
    TokenSequence t(good.begin(), good.begin() + 11);
    for (int b = 0; b < 4; ++b) t.push_back(kBarToken);
    t.push_back(432 + 50);
    t.push_back(150);
    t.push_back(60 + 3);
    t.push_back(310);
    t.push_back(432 + 10);  // backwards
    t.push_back(150);
    t.push_back(61 + 3);
    t.push_back(310);
    t.push_back(kEosToken);
    CHECK(!validate_grammar(t).empty());
  }

  SUBCASE("decode reports the first offending index") {
    TokenSequence t = good;
    t[5] = 300;  // chord token in the instrument slot
    try {
      decode(t);
      FAIL("expected CodecError");
    } catch (const CodecError& e) {
      CHECK(e.index() == 5);
    }
  }

  SUBCASE("pad token is rejected in the body") {
    TokenSequence t(good.begin(), good.begin() + 11);
    t.push_back(kBarToken);
    t.push_back(kPadToken);
    CHECK(!validate_grammar(t).empty());
  }
}

TEST_CASE("max-velocity anomaly token 718 decodes but is never emitted") {
  TokenSequence t = encode(testutil::basic_sample());
  t[8] = 718;
  REQUIRE(validate_grammar(t).empty());
  const Sample s = decode(t);
  CHECK(s.metadata.max_velocity->value == 127);
  CHECK(encode(s)[8] == 717);
}

TEST_CASE("token text and binary formats") {
  std::mt19937_64 rng(5);
  std::vector<TokenSequence> corpus;
  for (int i = 0; i < 8; ++i) {
    corpus.push_back(encode(testutil::random_sample(rng)));
  }
  CHECK(tokens_from_text(tokens_to_text(corpus)) == corpus);
  CHECK(tokens_from_binary(tokens_to_binary(corpus)) == corpus);
  CHECK_THROWS(tokens_from_text("12 99x 3\n"));
  CHECK_THROWS(tokens_from_text("12 729\n"));
}

TEST_CASE("sample json roundtrip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Sample s = testutil::random_sample(rng);
    CHECK(sample_from_json(sample_to_json(s)) == s);
  }
  Sample unknowns = testutil::basic_sample();
  unknowns.metadata.key = std::nullopt;
  unknowns.metadata.genre = std::nullopt;
  CHECK(sample_from_json(sample_to_json(unknowns)) == unknowns);
}
