#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "commu/sample.hpp"

namespace commu {

// Canonical sample JSON:
//   {"metadata": {"bpm": 120, "key": "cmajor", "time_signature": "4/4",
//                 "pitch_range": "mid", "num_measures": 8,
//                 "instrument": "keyboard", "genre": "newage",
//                 "min_velocity": 40, "max_velocity": 80,
//                 "track_role": "main_melody", "rhythm": "standard"},
//    "chords": [{"bar": 0, "position": 0, "chord": "Cmaj7"}, ...],
//    "notes":  [{"bar": 0, "position": 0, "pitch": 60, "velocity": 64,
//                "duration": 32}, ...]}
// Unknown metadata is null (or simply absent); num_measures is required.
nlohmann::json sample_to_json(const Sample& sample);
Sample sample_from_json(const nlohmann::json& j);

// Loads either a single sample object or an array of them.
std::vector<Sample> samples_from_json(const nlohmann::json& j);

Sample load_sample_file(const std::filesystem::path& path);
std::vector<Sample> load_samples_file(const std::filesystem::path& path);
void save_sample_file(const std::filesystem::path& path, const Sample& sample);

}  // namespace commu
