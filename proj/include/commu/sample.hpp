#pragma once

#include <string>
#include <vector>

#include "commu/chord.hpp"
#include "commu/types.hpp"

namespace commu {

// One metadata-conditioned track sample: the unit the whole toolkit moves
// around. Chords and notes are kept in canonical order, strictly increasing
// by (bar, position) resp. (bar, position, pitch).
struct Sample {
  MetadataSet metadata;
  std::vector<ChordEvent> chords;
  std::vector<Note> notes;

  bool operator==(const Sample&) const = default;
};

// Empty report iff all invariants hold: field ranges, min <= max velocity,
// num_measures in {4,8,16}, events inside the measure count, canonical
// ordering, no keyswitch notes. Unknown metadata other than num_measures is
// acceptable (the vocabulary has unknown tokens for those fields).
std::vector<std::string> validate_sample(const Sample& sample);

// Equality with velocities compared at bin level (notes and min/max
// metadata); everything else exact. This is the identity the token codec
// preserves.
bool equal_at_bin_level(const Sample& a, const Sample& b);

}  // namespace commu
