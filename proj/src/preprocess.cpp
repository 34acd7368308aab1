#include "commu/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <tuple>

#include "commu/gm_programs.hpp"
#include "commu/sample_json.hpp"
#include "commu/token_codec.hpp"
#include "commu/token_io.hpp"

namespace commu {

namespace {

constexpr std::array<int, 5> kBpmOffsets = {-10, -5, 0, 5, 10};

int clamp_bpm(int bpm) { return std::clamp(bpm, 5, 200); }

// Shortest signed semitone path from one root to another, distance-6 ties
// broken downward.
int semitone_delta(int from_root, int to_root) {
  const int up = ((to_root - from_root) % 12 + 12) % 12;
  if (up <= 5) return up;
  return up - 12;
}

int fold_pitch(int pitch) {
  while (pitch > 127) pitch -= 12;
  while (pitch < 0) pitch += 12;
  return pitch;
}

int quantize_bpm(double bpm) {
  const int q = static_cast<int>(std::llround(bpm / 5.0)) * 5;
  return clamp_bpm(q);
}

}  // namespace

std::vector<Sample> augment(const Sample& sample) {
  if (!sample.metadata.bpm || !sample.metadata.key) {
    throw std::invalid_argument("augment requires known bpm and key");
  }
  const int src_bpm = *sample.metadata.bpm;
  const Key src_key = *sample.metadata.key;

  std::vector<Sample> out;
  out.reserve(kBpmOffsets.size() * 12);
  for (const int offset : kBpmOffsets) {
    for (int target_root = 0; target_root < 12; ++target_root) {
      const int delta = semitone_delta(src_key.root, target_root);
      Sample v = sample;
      v.metadata.bpm = clamp_bpm(src_bpm + offset);
      v.metadata.key = Key{target_root, src_key.mode};
      for (Note& n : v.notes) n.pitch = fold_pitch(n.pitch + delta);
      for (ChordEvent& c : v.chords) {
        c.chord.root = ((c.chord.root + delta) % 12 + 12) % 12;
      }
      // Folding can reorder equal-position pitches; restore canonical order.
      std::sort(v.notes.begin(), v.notes.end(),
                [](const Note& a, const Note& b) {
                  return std::tuple(a.bar, a.position, a.pitch, a.velocity.value,
                                    a.duration) <
                         std::tuple(b.bar, b.position, b.pitch, b.velocity.value,
                                    b.duration);
                });
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Segment> slice(const MidiFile& file) {
  // Cut points: tick 0 plus every key/time-signature meta event.
  std::set<std::int64_t> cuts = {0};
  for (const MetaChange& ch : file.meta_changes) cuts.insert(ch.tick);
  std::vector<std::int64_t> bounds(cuts.begin(), cuts.end());
  bounds.push_back(std::max(file.max_tick, bounds.back() + 1));

  std::vector<Segment> out;
  for (std::size_t si = 0; si + 1 < bounds.size(); ++si) {
    const std::int64_t start = bounds[si];
    const std::int64_t end = bounds[si + 1];

    Segment seg;
    seg.division = file.division;
    seg.bpm = quantize_bpm(file.bpm.value_or(120));
    seg.length_ticks = end - start;
    // Effective key/meter at the segment start: the latest change at or
    // before it. No time-signature meta at all means the SMF default 4/4;
    // no key signature means unknown key.
    seg.key = std::nullopt;
    seg.time_signature = TimeSignature::FourFour;
    for (const MetaChange& ch : file.meta_changes) {
      if (ch.tick > start) break;
      if (ch.kind == MetaChange::Kind::TimeSignatureChange) {
        seg.time_signature = ch.ts;
      } else {
        seg.key = ch.key;
      }
    }

    bool any_notes = false;
    for (const MidiTrackData& track : file.tracks) {
      MidiTrackData t;
      t.name = track.name;
      t.program = track.program;
      for (const MidiNote& n : track.notes) {
        if (n.tick < start || n.tick >= end) continue;
        if (n.velocity <= 1) continue;  // keyswitch
        MidiNote m = n;
        m.tick -= start;
        m.duration = std::min(m.duration, end - start - m.tick);
        if (m.duration < 1) continue;
        t.notes.push_back(m);
      }
      if (!t.notes.empty()) any_notes = true;
      seg.tracks.push_back(std::move(t));
    }
    if (any_notes) out.push_back(std::move(seg));
  }
  return out;
}

std::vector<Chunk> chunk(const Segment& segment, int gap_bars) {
  std::vector<Chunk> out;
  if (!segment.time_signature) return out;  // unsupported meter
  if (gap_bars < 1) gap_bars = 1;
  const std::int64_t bt = bar_ticks(*segment.time_signature, segment.division);
  const int total_bars =
      static_cast<int>((segment.length_ticks + bt - 1) / bt);
  if (total_bars <= 0) return out;

  for (const MidiTrackData& track : segment.tracks) {
    if (track.notes.empty()) continue;

    // A bar sounds when any note overlaps it.
    std::vector<bool> sounding(static_cast<std::size_t>(total_bars), false);
    for (const MidiNote& n : track.notes) {
      const int first = static_cast<int>(n.tick / bt);
      const int last =
          static_cast<int>(std::min<std::int64_t>(total_bars - 1,
                                                  (n.tick + n.duration - 1) / bt));
      for (int b = first; b <= last && b >= 0; ++b) {
        sounding[static_cast<std::size_t>(b)] = true;
      }
    }

    // Runs of sounding bars separated by >= gap_bars empty bars.
    int bar = 0;
    while (bar < total_bars) {
      while (bar < total_bars && !sounding[static_cast<std::size_t>(bar)]) {
        ++bar;
      }
      if (bar >= total_bars) break;
      const int run_start = bar;
      int last_sounding = bar;
      int b = bar + 1;
      while (b < total_bars) {
        if (sounding[static_cast<std::size_t>(b)]) {
          last_sounding = b;
          ++b;
          continue;
        }
        int gap = 0;
        while (b + gap < total_bars &&
               !sounding[static_cast<std::size_t>(b + gap)]) {
          ++gap;
        }
        if (gap >= gap_bars || b + gap >= total_bars) break;
        b += gap;
      }
      bar = last_sounding + 1;

      Chunk c;
      c.key = segment.key;
      c.time_signature = segment.time_signature;
      c.bpm = segment.bpm;
      c.division = segment.division;
      c.program = track.program;
      c.num_bars = last_sounding - run_start + 1;
      const std::int64_t chunk_start = static_cast<std::int64_t>(run_start) * bt;
      const std::int64_t chunk_end =
          static_cast<std::int64_t>(last_sounding + 1) * bt;
      for (const MidiNote& n : track.notes) {
        if (n.tick < chunk_start || n.tick >= chunk_end) continue;
        MidiNote m = n;
        m.tick -= chunk_start;
        c.notes.push_back(m);
      }
      if (!c.notes.empty()) out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Sample> parse_bars(const Chunk& chunk) {
  std::vector<Sample> out;
  if (!chunk.time_signature || chunk.num_bars < 4) return out;
  const std::int64_t bt = bar_ticks(*chunk.time_signature, chunk.division);

  int bar_cursor = 0;
  while (chunk.num_bars - bar_cursor >= 4) {
    int piece_bars = 4;
    for (const int len : {16, 8}) {
      if (chunk.num_bars - bar_cursor >= len) {
        piece_bars = len;
        break;
      }
    }

    const std::int64_t start = static_cast<std::int64_t>(bar_cursor) * bt;
    const std::int64_t end =
        static_cast<std::int64_t>(bar_cursor + piece_bars) * bt;

    Sample s;
    for (const MidiNote& n : chunk.notes) {
      if (n.tick < start || n.tick >= end) continue;
      const std::int64_t rel = n.tick - start;
      int bar = static_cast<int>(rel / bt);
      int pos = static_cast<int>(
          std::llround(static_cast<double>(rel % bt) * kGridPerBar / bt));
      if (pos >= kGridPerBar) {
        // Rounded past the barline; carry into the next bar.
        pos = 0;
        ++bar;
        if (bar >= piece_bars) continue;
      }
      int dur = static_cast<int>(
          std::llround(static_cast<double>(n.duration) * kGridPerBar / bt));
      dur = std::clamp(dur, 1, kGridPerBar);
      s.notes.push_back(Note{bar, pos, n.pitch, Velocity{n.velocity}, dur});
    }
    bar_cursor += piece_bars;
    if (s.notes.empty()) continue;

    std::sort(s.notes.begin(), s.notes.end(), [](const Note& a, const Note& b) {
      return std::tuple(a.bar, a.position, a.pitch, a.velocity.value,
                        a.duration) <
             std::tuple(b.bar, b.position, b.pitch, b.velocity.value,
                        b.duration);
    });
    // Quantisation can merge notes onto one grid point; keep the first.
    s.notes.erase(std::unique(s.notes.begin(), s.notes.end(),
                              [](const Note& a, const Note& b) {
                                return a.bar == b.bar &&
                                       a.position == b.position &&
                                       a.pitch == b.pitch;
                              }),
                  s.notes.end());

    double pitch_sum = 0;
    int vmin = 127;
    int vmax = 0;
    for (const Note& n : s.notes) {
      pitch_sum += n.pitch;
      vmin = std::min(vmin, n.velocity.value);
      vmax = std::max(vmax, n.velocity.value);
    }
    MetadataSet& m = s.metadata;
    m.bpm = chunk.bpm;
    m.key = chunk.key;
    m.time_signature = chunk.time_signature;
    m.num_measures = piece_bars;
    m.pitch_range =
        classify_mean_pitch(pitch_sum / static_cast<double>(s.notes.size()));
    m.instrument = instrument_category(chunk.program);
    m.min_velocity = Velocity{vmin};
    m.max_velocity = Velocity{vmax};
    // genre, track_role, rhythm stay unknown: not derivable from raw MIDI.
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sample> ingest_midi(const MidiFile& file, int gap_bars,
                                std::vector<std::string>* warnings) {
  std::vector<Sample> out;
  for (const Segment& seg : slice(file)) {
    if (!seg.time_signature) {
      if (warnings) {
        warnings->push_back("segment with unsupported meter skipped");
      }
      continue;
    }
    for (const Chunk& c : chunk(seg, gap_bars)) {
      for (Sample& s : parse_bars(c)) out.push_back(std::move(s));
    }
  }
  return out;
}

PipelineManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end());
  if (!j.is_object() || !j.contains("input") || !j.contains("output_dir")) {
    throw std::runtime_error(path.string() +
                             ": manifest needs 'input' and 'output_dir'");
  }
  PipelineManifest m;
  m.input = j["input"].get<std::string>();
  m.output_dir = j["output_dir"].get<std::string>();
  m.augment_enabled = j.value("augment", false);
  m.gap_bars = j.value("gap_bars", kDefaultGapBars);
  if (m.gap_bars < 1) throw std::runtime_error("gap_bars must be >= 1");
  return m;
}

namespace {

bool glob_match(std::string_view pattern, std::string_view name) {
  // Iterative '*'/'?' matcher.
  std::size_t p = 0, n = 0;
  std::size_t star = std::string_view::npos, star_n = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      star_n = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++star_n;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

std::vector<std::filesystem::path> expand_input_glob(
    const std::string& pattern) {
  namespace fs = std::filesystem;
  std::vector<fs::path> out;
  const fs::path as_path(pattern);

  if (fs::is_directory(as_path)) {
    for (const auto& entry : fs::directory_iterator(as_path)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension();
      if (ext == ".mid" || ext == ".midi") out.push_back(entry.path());
    }
  } else if (pattern.find('*') == std::string::npos &&
             pattern.find('?') == std::string::npos) {
    if (fs::exists(as_path)) out.push_back(as_path);
  } else {
    const fs::path dir =
        as_path.has_parent_path() ? as_path.parent_path() : fs::path(".");
    const std::string name_pattern = as_path.filename().string();
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (glob_match(name_pattern, entry.path().filename().string())) {
          out.push_back(entry.path());
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

IngestResult run_pipeline(const PipelineManifest& manifest) {
  namespace fs = std::filesystem;
  IngestResult result;
  result.inputs = expand_input_glob(manifest.input);
  if (result.inputs.empty()) {
    throw std::runtime_error("no inputs match '" + manifest.input + "'");
  }
  fs::create_directories(manifest.output_dir);

  for (const fs::path& input : result.inputs) {
    MidiFile file;
    try {
      file = read_midi(read_file_bytes(input));
    } catch (const std::exception& e) {
      result.warnings.push_back(input.string() + ": " + e.what());
      continue;
    }
    for (const std::string& w : file.warnings) {
      result.warnings.push_back(input.string() + ": " + w);
    }

    const std::vector<Sample> samples =
        ingest_midi(file, manifest.gap_bars, &result.warnings);
    std::size_t index = 0;
    for (const Sample& base : samples) {
      std::vector<Sample> emit;
      if (manifest.augment_enabled) {
        if (base.metadata.key) {
          emit = augment(base);
        } else {
          result.warnings.push_back(input.string() +
                                    ": no key signature, augmentation skipped");
          emit.push_back(base);
        }
      } else {
        emit.push_back(base);
      }
      for (std::size_t vi = 0; vi < emit.size(); ++vi) {
        std::string name = input.stem().string() + "_p" + std::to_string(index);
        if (manifest.augment_enabled && emit.size() > 1) {
          name += "_a" + std::to_string(vi);
        }
        save_sample_file(manifest.output_dir / (name + ".json"), emit[vi]);
        save_token_file(manifest.output_dir / (name + ".tok"),
                        {encode(emit[vi])});
        ++result.samples_written;
      }
      ++index;
    }
  }
  return result;
}

}  // namespace commu
