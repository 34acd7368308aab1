#include "commu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace commu {

namespace {

void require_notes(const Sample& s, const char* op) {
  if (s.notes.empty()) {
    throw std::invalid_argument(std::string(op) + ": sample has no notes");
  }
}

template <std::size_t N>
double cosine(const std::array<double, N>& a, const std::array<double, N>& b) {
  if (a == b) {
    // Exact on equal count vectors, so dist(x, x) is exactly 0.
    for (double v : a) {
      if (v != 0) return 1.0;
    }
    return 1.0;  // both zero
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < N; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;  // exactly one zero vector
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

struct MeanStd {
  double mean = 0;
  double std_dev = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  double sum = 0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - r.mean) * (x - r.mean);
  r.std_dev = std::sqrt(var / static_cast<double>(xs.size()));
  return r;
}

constexpr std::size_t kHistBins = 8;

void fill_hist(const std::vector<double>& xs, std::vector<std::size_t>& hist,
               double& lo, double& width) {
  hist.assign(kHistBins, 0);
  if (xs.empty()) return;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  lo = *mn;
  width = (*mx - *mn) / static_cast<double>(kHistBins);
  if (width == 0) {
    hist[0] = xs.size();
    return;
  }
  for (double x : xs) {
    auto bin = static_cast<std::size_t>((x - lo) / width);
    hist[std::min(bin, kHistBins - 1)] += 1;
  }
}

}  // namespace

std::array<double, 12> chroma_vector(const Sample& sample) {
  std::array<double, 12> v{};
  for (const Note& n : sample.notes) v[static_cast<std::size_t>(n.pitch % 12)] += 1;
  return v;
}

std::array<double, kGridPerBar> groove_vector(const Sample& sample) {
  std::array<double, kGridPerBar> v{};
  for (const Note& n : sample.notes) {
    v[static_cast<std::size_t>(n.position % kGridPerBar)] += 1;
  }
  return v;
}

double controllability_pitch(const Sample& sample) {
  require_notes(sample, "controllability_pitch");
  if (!sample.metadata.pitch_range) {
    throw std::invalid_argument("controllability_pitch: unknown pitch_range");
  }
  const auto [lo, hi] = pitch_range_bounds(*sample.metadata.pitch_range);
  std::size_t inside = 0;
  for (const Note& n : sample.notes) {
    if (n.pitch >= lo && n.pitch <= hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(sample.notes.size());
}

double controllability_velocity(const Sample& sample) {
  require_notes(sample, "controllability_velocity");
  if (!sample.metadata.min_velocity || !sample.metadata.max_velocity) {
    throw std::invalid_argument(
        "controllability_velocity: unknown min/max velocity");
  }
  const int lo = sample.metadata.min_velocity->value;
  const int hi = sample.metadata.max_velocity->value;
  std::size_t inside = 0;
  for (const Note& n : sample.notes) {
    if (n.velocity.value >= lo && n.velocity.value <= hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(sample.notes.size());
}

double controllability_harmony(const Sample& sample) {
  require_notes(sample, "controllability_harmony");
  if (!sample.metadata.key) {
    throw std::invalid_argument("controllability_harmony: unknown key");
  }
  if (sample.chords.empty()) {
    throw std::invalid_argument("controllability_harmony: no chord events");
  }
  const Key key = *sample.metadata.key;

  // Chord segments on the absolute grid; the last one runs to the end.
  struct Segment {
    std::int64_t start;
    std::int64_t end;
    const ChordSymbol* chord;
  };
  std::vector<Segment> segments;
  segments.reserve(sample.chords.size());
  for (std::size_t i = 0; i < sample.chords.size(); ++i) {
    const ChordEvent& c = sample.chords[i];
    const std::int64_t start = grid_index(c.bar, c.position);
    std::int64_t end;
    if (i + 1 < sample.chords.size()) {
      const ChordEvent& nx = sample.chords[i + 1];
      end = grid_index(nx.bar, nx.position);
    } else {
      end = std::numeric_limits<std::int64_t>::max();
    }
    segments.push_back(Segment{start, end, &c.chord});
  }

  std::size_t consonant = 0;
  for (const Note& n : sample.notes) {
    const int pc = n.pitch % 12;
    if (in_scale(key, pc)) {
      ++consonant;
      continue;
    }
    const std::int64_t on = grid_index(n.bar, n.position);
    const std::int64_t off = on + n.duration;
    bool overlapped = false;
    bool ok = true;
    for (const Segment& seg : segments) {
      if (seg.end <= on || seg.start >= off) continue;
      overlapped = true;
      if (!seg.chord->contains_pitch_class(pc)) {
        ok = false;
        break;
      }
    }
    if (overlapped && ok) ++consonant;
  }
  return static_cast<double>(consonant) /
         static_cast<double>(sample.notes.size());
}

double chroma_similarity(const Sample& a, const Sample& b) {
  return cosine(chroma_vector(a), chroma_vector(b));
}

double groove_similarity(const Sample& a, const Sample& b) {
  return cosine(groove_vector(a), groove_vector(b));
}

double distance(const Sample& a, const Sample& b) {
  const double dc = 1.0 - chroma_similarity(a, b);
  const double dg = 1.0 - groove_similarity(a, b);
  return std::sqrt((dc * dc + dg * dg) / 2.0);
}

double diversity(std::span<const Sample> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("diversity needs at least 2 samples");
  }
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      sum += distance(samples[i], samples[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double note_density(const Sample& sample) {
  require_notes(sample, "note_density");
  if (!is_valid_num_measures(sample.metadata.num_measures)) {
    throw std::invalid_argument("note_density: bad num_measures");
  }
  return static_cast<double>(sample.notes.size()) /
         static_cast<double>(sample.metadata.num_measures);
}

double note_length(const Sample& sample) {
  require_notes(sample, "note_length");
  double sum = 0;
  for (const Note& n : sample.notes) sum += n.duration;
  return sum / static_cast<double>(sample.notes.size());
}

std::string metadata_field_value(const MetadataSet& m, std::string_view field) {
  auto opt_str = [](const auto& opt) -> std::string {
    if (!opt) return "unknown";
    return std::string(to_string(*opt));
  };
  if (field == "bpm") return m.bpm ? std::to_string(*m.bpm) : "unknown";
  if (field == "key") return m.key ? key_name(*m.key) : "unknown";
  if (field == "time_signature") return opt_str(m.time_signature);
  if (field == "pitch_range") return opt_str(m.pitch_range);
  if (field == "num_measures") return std::to_string(m.num_measures);
  if (field == "instrument") return opt_str(m.instrument);
  if (field == "genre") return opt_str(m.genre);
  if (field == "min_velocity") {
    return m.min_velocity ? std::to_string(m.min_velocity->value) : "unknown";
  }
  if (field == "max_velocity") {
    return m.max_velocity ? std::to_string(m.max_velocity->value) : "unknown";
  }
  if (field == "track_role") return opt_str(m.track_role);
  if (field == "rhythm") return opt_str(m.rhythm);
  throw std::invalid_argument("unknown metadata field: " + std::string(field));
}

std::vector<GroupStats> corpus_stats(std::span<const Sample> samples,
                                     std::string_view group_field) {
  std::map<std::string, std::vector<const Sample*>> groups;
  for (const Sample& s : samples) {
    if (s.notes.empty()) continue;
    groups[metadata_field_value(s.metadata, group_field)].push_back(&s);
  }
  std::vector<GroupStats> out;
  out.reserve(groups.size());
  for (const auto& [label, members] : groups) {
    GroupStats g;
    g.group = label;
    g.n = members.size();
    std::vector<double> densities, lengths;
    densities.reserve(members.size());
    lengths.reserve(members.size());
    for (const Sample* s : members) {
      densities.push_back(note_density(*s));
      lengths.push_back(note_length(*s));
    }
    const MeanStd d = mean_std(densities);
    const MeanStd l = mean_std(lengths);
    g.density_mean = d.mean;
    g.density_std = d.std_dev;
    g.length_mean = l.mean;
    g.length_std = l.std_dev;
    fill_hist(densities, g.density_hist, g.density_hist_lo,
              g.density_hist_width);
    fill_hist(lengths, g.length_hist, g.length_hist_lo, g.length_hist_width);
    out.push_back(std::move(g));
  }
  return out;
}

std::map<std::pair<std::string, std::string>, std::size_t> cooccurrence(
    std::span<const Sample> samples, std::string_view field_a,
    std::string_view field_b) {
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (const Sample& s : samples) {
    counts[{metadata_field_value(s.metadata, field_a),
            metadata_field_value(s.metadata, field_b)}] += 1;
  }
  return counts;
}

}  // namespace commu
