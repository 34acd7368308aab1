#include "commu/combiner.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <tuple>

#include "commu/sample_json.hpp"

namespace commu {

namespace {

std::string label(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "unknown";
}

}  // namespace

std::vector<std::string> check_compatibility(std::span<const Sample> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("check_compatibility needs >= 2 samples");
  }
  std::vector<std::string> report;
  const Sample& ref = samples[0];
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const std::string tag = "sample " + std::to_string(i) + ": ";
    if (s.metadata.bpm != ref.metadata.bpm) {
      report.push_back(tag + "bpm mismatch (" + label(ref.metadata.bpm) +
                       " vs " + label(s.metadata.bpm) + ")");
    }
    if (s.metadata.key != ref.metadata.key) {
      report.push_back(tag + "key mismatch");
    }
    if (s.metadata.time_signature != ref.metadata.time_signature) {
      report.push_back(tag + "time signature mismatch");
    }
    if (s.metadata.num_measures != ref.metadata.num_measures) {
      report.push_back(tag + "num_measures mismatch (" +
                       std::to_string(ref.metadata.num_measures) + " vs " +
                       std::to_string(s.metadata.num_measures) + ")");
    }
    if (s.chords.size() != ref.chords.size()) {
      report.push_back(tag + "chord progression length mismatch");
      continue;
    }
    for (std::size_t c = 0; c < s.chords.size(); ++c) {
      if (!(s.chords[c] == ref.chords[c])) {
        report.push_back(tag + "chord mismatch at bar " +
                         std::to_string(ref.chords[c].bar) + " (" +
                         ref.chords[c].chord.name() + " vs " +
                         s.chords[c].chord.name() + ")");
      }
    }
  }
  return report;
}

CombineResult combine(std::span<const Sample> samples, int division,
                      bool force) {
  if (samples.empty()) {
    throw std::invalid_argument("combine: empty input");
  }
  if (samples.size() >= 2 && !force) {
    const auto report = check_compatibility(samples);
    if (!report.empty()) {
      std::string what = "combine: incompatible samples";
      for (const std::string& r : report) what += "\n  " + r;
      throw std::runtime_error(what);
    }
  }

  // Track order: role enum (unknown last), then instrument, then note
  // content, so the output depends only on the input set.
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto sort_key = [&samples](std::size_t i) {
    const Sample& s = samples[i];
    const int role = s.metadata.track_role
                         ? static_cast<int>(*s.metadata.track_role)
                         : static_cast<int>(TrackRole::Riff) + 1;
    const int inst = s.metadata.instrument
                         ? static_cast<int>(*s.metadata.instrument)
                         : static_cast<int>(Instrument::Others) + 1;
    return std::tuple(role, inst, sample_to_json(s).dump());
  };
  std::stable_sort(order.begin(), order.end(),
                   [&sort_key](std::size_t a, std::size_t b) {
                     return sort_key(a) < sort_key(b);
                   });

  const MetadataSet& ref = samples[0].metadata;
  const int bpm = ref.bpm.value_or(120);
  const TimeSignature ts =
      ref.time_signature.value_or(TimeSignature::FourFour);

  std::vector<MidiTrackData> tracks;
  nlohmann::json manifest_tracks = nlohmann::json::array();
  tracks.reserve(samples.size());
  for (const std::size_t idx : order) {
    const Sample& s = samples[idx];
    MidiTrackData track = sample_to_ticks(s, division);
    manifest_tracks.push_back({{"name", track.name},
                               {"program", track.program},
                               {"input_index", idx},
                               {"num_notes", s.notes.size()},
                               {"metadata", sample_to_json(s)["metadata"]}});
    tracks.push_back(std::move(track));
  }

  CombineResult result;
  result.midi_bytes = write_midi(tracks, bpm, ts, division);
  nlohmann::json manifest{{"bpm", bpm},
                          {"time_signature", to_string(ts)},
                          {"division", division},
                          {"num_measures", ref.num_measures},
                          {"tracks", manifest_tracks}};
  result.manifest_json = manifest.dump(2) + "\n";
  return result;
}

std::vector<std::string> stack_plan(const std::map<TrackRole, int>& wanted) {
  std::vector<std::string> warnings;
  int main_count = 0;
  if (auto it = wanted.find(TrackRole::MainMelody); it != wanted.end()) {
    main_count = it->second;
  }
  if (main_count == 0) {
    warnings.push_back("no main melody in the plan");
  } else if (main_count > 1) {
    warnings.push_back("multiple main melodies (" +
                       std::to_string(main_count) + ")");
  }
  for (const auto& [role, count] : wanted) {
    if (count < 0) {
      warnings.push_back(std::string("negative count for ") +
                         std::string(to_string(role)));
    }
  }
  return warnings;
}

}  // namespace commu
