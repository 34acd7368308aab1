#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commu/sample.hpp"

namespace commu {

// Pitch-class onset counts (not duration-weighted).
std::array<double, 12> chroma_vector(const Sample& sample);

// In-bar onset-position counts, summed over all bars.
std::array<double, kGridPerBar> groove_vector(const Sample& sample);

// CP: share of notes whose pitch lies inside the sample's pitch-range
// category. Requires pitch_range metadata and at least one note.
double controllability_pitch(const Sample& sample);

// CV: share of notes with min_velocity <= velocity <= max_velocity,
// comparing raw values (decoded samples carry bin representatives).
double controllability_velocity(const Sample& sample);

// CH: share of notes that are consonant. A note is consonant when its pitch
// class is in the key's scale, or else is a chord tone of every chord
// segment it overlaps. A chord is active from its event to the next event
// (the last one to the end of the sample); a note that overlaps no chord
// segment and is out of scale counts as dissonant. Requires a known key and
// at least one chord and note.
double controllability_harmony(const Sample& sample);

// Cosine similarities of the respective vectors; two zero vectors give 1,
// exactly one zero gives 0.
double chroma_similarity(const Sample& a, const Sample& b);
double groove_similarity(const Sample& a, const Sample& b);

// sqrt(((1-sim_chr)^2 + (1-sim_grv)^2) / 2)
double distance(const Sample& a, const Sample& b);

// Mean pairwise distance over all i < j; needs n >= 2.
double diversity(std::span<const Sample> samples);

double note_density(const Sample& sample);  // notes per bar
double note_length(const Sample& sample);   // mean duration, grid units

struct GroupStats {
  std::string group;
  std::size_t n = 0;
  double density_mean = 0;
  double density_std = 0;  // population std
  double length_mean = 0;
  double length_std = 0;
  std::vector<std::size_t> density_hist;
  std::vector<std::size_t> length_hist;
  double density_hist_lo = 0, density_hist_width = 0;
  double length_hist_lo = 0, length_hist_width = 0;
};

inline constexpr std::array<std::string_view, 11> kMetadataFields = {
    "bpm",          "key",          "time_signature", "pitch_range",
    "num_measures", "instrument",   "genre",          "min_velocity",
    "max_velocity", "track_role",   "rhythm"};

// Metadata field rendered as a grouping label ("unknown" when absent).
std::string metadata_field_value(const MetadataSet& metadata,
                                 std::string_view field);

// Density/length statistics per group, rows sorted by group label. Samples
// without notes are skipped. Throws on an unknown group field.
std::vector<GroupStats> corpus_stats(std::span<const Sample> samples,
                                     std::string_view group_field);

// Co-occurrence counts between two metadata fields.
std::map<std::pair<std::string, std::string>, std::size_t> cooccurrence(
    std::span<const Sample> samples, std::string_view field_a,
    std::string_view field_b);

}  // namespace commu
