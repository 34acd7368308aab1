#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "commu/midi_io.hpp"
#include "commu/sample.hpp"

namespace commu {

// Empty iff all samples (>= 2) share bpm, key, time signature, num_measures
// and an identical chord progression; otherwise one line per mismatch.
std::vector<std::string> check_compatibility(std::span<const Sample> samples);

struct CombineResult {
  std::vector<std::uint8_t> midi_bytes;
  std::string manifest_json;
};

// Merges compatible samples into one format-1 SMF, one track per sample.
// Track order is (track-role enum order, instrument, note content), which
// makes the output a function of the input set rather than its order;
// unknown roles sort last. Set force to combine despite an incompatibility
// report. Throws on empty input or (without force) on incompatible samples.
CombineResult combine(std::span<const Sample> samples,
                      int division = kDefaultDivision, bool force = false);

// Sanity warnings for a planned stack of track roles: exactly one main
// melody is the expected shape. Never errors.
std::vector<std::string> stack_plan(const std::map<TrackRole, int>& wanted);

}  // namespace commu
