#include "commu/sample.hpp"

#include <string>
#include <tuple>

namespace commu {

namespace {

void check_range(std::vector<std::string>& out, const std::string& what,
                 int value, int lo, int hi) {
  if (value < lo || value > hi) {
    out.push_back(what + " out of range [" + std::to_string(lo) + "," +
                  std::to_string(hi) + "]: " + std::to_string(value));
  }
}

}  // namespace

std::vector<std::string> validate_sample(const Sample& sample) {
  std::vector<std::string> v;
  const MetadataSet& m = sample.metadata;

  if (m.bpm) {
    if (*m.bpm < 5 || *m.bpm > 200 || *m.bpm % 5 != 0) {
      v.push_back("bpm must be a multiple of 5 in 5..200: " +
                  std::to_string(*m.bpm));
    }
  }
  if (!is_valid_num_measures(m.num_measures)) {
    v.push_back("num_measures must be 4, 8 or 16: " +
                std::to_string(m.num_measures));
  }
  if (m.min_velocity) check_range(v, "min_velocity", m.min_velocity->value, 0, 127);
  if (m.max_velocity) check_range(v, "max_velocity", m.max_velocity->value, 0, 127);
  if (m.min_velocity && m.max_velocity &&
      m.min_velocity->value > m.max_velocity->value) {
    v.push_back("min > max velocity: " + std::to_string(m.min_velocity->value) +
                " > " + std::to_string(m.max_velocity->value));
  }

  const bool have_measures = is_valid_num_measures(m.num_measures);
  for (std::size_t i = 0; i < sample.notes.size(); ++i) {
    const Note& n = sample.notes[i];
    const std::string tag = "note[" + std::to_string(i) + "] ";
    if (n.bar < 0) v.push_back(tag + "negative bar");
    check_range(v, tag + "position", n.position, 0, 127);
    check_range(v, tag + "pitch", n.pitch, 0, 127);
    check_range(v, tag + "velocity", n.velocity.value, 0, 127);
    check_range(v, tag + "duration", n.duration, 1, 128);
    if (n.velocity.value >= 0 && n.velocity.is_keyswitch()) {
      v.push_back(tag + "keyswitch note (velocity <= 1)");
    }
    if (have_measures && n.bar >= m.num_measures) {
      v.push_back(tag + "note beyond measure count: bar " +
                  std::to_string(n.bar) + " >= " +
                  std::to_string(m.num_measures));
    }
    if (i > 0) {
      const Note& p = sample.notes[i - 1];
      auto key = [](const Note& x) {
        return std::tuple(x.bar, x.position, x.pitch);
      };
      if (!(key(p) < key(n))) {
        v.push_back(tag + "notes not strictly ordered by (bar,position,pitch)");
      }
    }
  }

  for (std::size_t i = 0; i < sample.chords.size(); ++i) {
    const ChordEvent& c = sample.chords[i];
    const std::string tag = "chord[" + std::to_string(i) + "] ";
    if (c.bar < 0) v.push_back(tag + "negative bar");
    check_range(v, tag + "position", c.position, 0, 127);
    if (have_measures && c.bar >= m.num_measures) {
      v.push_back(tag + "chord beyond measure count: bar " +
                  std::to_string(c.bar) + " >= " +
                  std::to_string(m.num_measures));
    }
    if (i > 0) {
      const ChordEvent& p = sample.chords[i - 1];
      if (!(std::tuple(p.bar, p.position) < std::tuple(c.bar, c.position))) {
        v.push_back(tag + "chords not strictly ordered by (bar,position)");
      }
    }
  }

  return v;
}

bool equal_at_bin_level(const Sample& a, const Sample& b) {
  MetadataSet ma = a.metadata;
  MetadataSet mb = b.metadata;
  auto rebin = [](std::optional<Velocity>& v) {
    if (v) v = Velocity::from_bin(v->bin());
  };
  rebin(ma.min_velocity);
  rebin(mb.min_velocity);
  rebin(ma.max_velocity);
  rebin(mb.max_velocity);
  if (!(ma == mb)) return false;
  if (a.chords != b.chords) return false;
  if (a.notes.size() != b.notes.size()) return false;
  for (std::size_t i = 0; i < a.notes.size(); ++i) {
    Note na = a.notes[i];
    Note nb = b.notes[i];
    na.velocity = Velocity::from_bin(na.velocity.bin());
    nb.velocity = Velocity::from_bin(nb.velocity.bin());
    if (!(na == nb)) return false;
  }
  return true;
}

}  // namespace commu
