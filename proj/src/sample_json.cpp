#include "commu/sample_json.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

#include "commu/token_io.hpp"

namespace commu {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw std::runtime_error("sample json: " + what);
}

int require_int(const json& j, const char* field, int lo, int hi) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    schema_error(std::string("missing or non-integer field '") + field + "'");
  }
  const int v = j[field].get<int>();
  if (v < lo || v > hi) {
    schema_error(std::string("field '") + field + "' out of range: " +
                 std::to_string(v));
  }
  return v;
}

// Unknown = null or absent.
template <typename T, typename Parse>
std::optional<T> optional_enum(const json& m, const char* field, Parse parse) {
  if (!m.contains(field) || m[field].is_null()) return std::nullopt;
  if (!m[field].is_string()) {
    schema_error(std::string("field '") + field + "' must be a string or null");
  }
  auto v = parse(m[field].template get<std::string>());
  if (!v) {
    schema_error(std::string("bad value for '") + field + "': " +
                 m[field].template get<std::string>());
  }
  return v;
}

std::optional<int> optional_int(const json& m, const char* field) {
  if (!m.contains(field) || m[field].is_null()) return std::nullopt;
  if (!m[field].is_number_integer()) {
    schema_error(std::string("field '") + field +
                 "' must be an integer or null");
  }
  return m[field].get<int>();
}

}  // namespace

json sample_to_json(const Sample& sample) {
  const MetadataSet& m = sample.metadata;
  json meta;
  meta["bpm"] = m.bpm ? json(*m.bpm) : json(nullptr);
  meta["key"] = m.key ? json(key_name(*m.key)) : json(nullptr);
  meta["time_signature"] =
      m.time_signature ? json(to_string(*m.time_signature)) : json(nullptr);
  meta["pitch_range"] =
      m.pitch_range ? json(to_string(*m.pitch_range)) : json(nullptr);
  meta["num_measures"] = m.num_measures;
  meta["instrument"] =
      m.instrument ? json(to_string(*m.instrument)) : json(nullptr);
  meta["genre"] = m.genre ? json(to_string(*m.genre)) : json(nullptr);
  meta["min_velocity"] =
      m.min_velocity ? json(m.min_velocity->value) : json(nullptr);
  meta["max_velocity"] =
      m.max_velocity ? json(m.max_velocity->value) : json(nullptr);
  meta["track_role"] =
      m.track_role ? json(to_string(*m.track_role)) : json(nullptr);
  meta["rhythm"] = m.rhythm ? json(to_string(*m.rhythm)) : json(nullptr);

  json chords = json::array();
  for (const ChordEvent& c : sample.chords) {
    chords.push_back(
        {{"bar", c.bar}, {"position", c.position}, {"chord", c.chord.name()}});
  }
  json notes = json::array();
  for (const Note& n : sample.notes) {
    notes.push_back({{"bar", n.bar},
                     {"position", n.position},
                     {"pitch", n.pitch},
                     {"velocity", n.velocity.value},
                     {"duration", n.duration}});
  }
  return json{{"metadata", meta}, {"chords", chords}, {"notes", notes}};
}

Sample sample_from_json(const json& j) {
  if (!j.is_object() || !j.contains("metadata")) {
    schema_error("expected an object with a 'metadata' field");
  }
  const json& meta = j["metadata"];
  Sample s;
  MetadataSet& m = s.metadata;
  m.bpm = optional_int(meta, "bpm");
  m.key = optional_enum<Key>(meta, "key",
                             [](const std::string& v) { return parse_key(v); });
  m.time_signature = optional_enum<TimeSignature>(
      meta, "time_signature",
      [](const std::string& v) { return parse_time_signature(v); });
  m.pitch_range = optional_enum<PitchRange>(
      meta, "pitch_range",
      [](const std::string& v) { return parse_pitch_range(v); });
  m.num_measures = require_int(meta, "num_measures", 0, 1 << 20);
  m.instrument = optional_enum<Instrument>(
      meta, "instrument",
      [](const std::string& v) { return parse_instrument(v); });
  m.genre = optional_enum<Genre>(
      meta, "genre", [](const std::string& v) { return parse_genre(v); });
  if (auto v = optional_int(meta, "min_velocity")) m.min_velocity = Velocity{*v};
  if (auto v = optional_int(meta, "max_velocity")) m.max_velocity = Velocity{*v};
  m.track_role = optional_enum<TrackRole>(
      meta, "track_role",
      [](const std::string& v) { return parse_track_role(v); });
  m.rhythm = optional_enum<Rhythm>(
      meta, "rhythm", [](const std::string& v) { return parse_rhythm(v); });

  if (j.contains("chords")) {
    if (!j["chords"].is_array()) schema_error("'chords' must be an array");
    for (const json& c : j["chords"]) {
      ChordEvent ev;
      ev.bar = require_int(c, "bar", 0, 1 << 20);
      ev.position = require_int(c, "position", 0, kGridPerBar - 1);
      if (!c.contains("chord") || !c["chord"].is_string()) {
        schema_error("chord event missing 'chord' name");
      }
      auto sym = ChordSymbol::parse(c["chord"].get<std::string>());
      if (!sym) schema_error("bad chord name: " + c["chord"].get<std::string>());
      ev.chord = *sym;
      s.chords.push_back(ev);
    }
  }
  if (j.contains("notes")) {
    if (!j["notes"].is_array()) schema_error("'notes' must be an array");
    for (const json& n : j["notes"]) {
      Note note;
      note.bar = require_int(n, "bar", 0, 1 << 20);
      note.position = require_int(n, "position", 0, kGridPerBar - 1);
      note.pitch = require_int(n, "pitch", 0, 127);
      note.velocity = Velocity{require_int(n, "velocity", 0, 127)};
      note.duration = require_int(n, "duration", 1, kGridPerBar);
      s.notes.push_back(note);
    }
  }
  return s;
}

std::vector<Sample> samples_from_json(const json& j) {
  std::vector<Sample> out;
  if (j.is_array()) {
    for (const json& item : j) out.push_back(sample_from_json(item));
  } else {
    out.push_back(sample_from_json(j));
  }
  return out;
}

Sample load_sample_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return sample_from_json(json::parse(bytes.begin(), bytes.end()));
}

std::vector<Sample> load_samples_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return samples_from_json(json::parse(bytes.begin(), bytes.end()));
}

void save_sample_file(const std::filesystem::path& path, const Sample& sample) {
  write_file_atomic(path, sample_to_json(sample).dump(2) + "\n");
}

}  // namespace commu
