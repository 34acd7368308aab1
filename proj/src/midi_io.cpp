#include "commu/midi_io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>
#include <tuple>

#include "commu/gm_programs.hpp"

namespace commu {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("midi: " + what);
}

struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos >= data.size()) malformed("unexpected end of file");
    return data[pos++];
  }

  std::uint32_t be(int nbytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < nbytes; ++i) v = (v << 8) | u8();
    return v;
  }

  std::uint32_t vlq() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7f);
      if (!(b & 0x80)) return v;
    }
    malformed("variable-length quantity longer than 4 bytes");
  }

  void skip(std::size_t n) {
    if (pos + n > data.size()) malformed("unexpected end of file");
    pos += n;
  }

  std::string text(std::size_t n) {
    if (pos + n > data.size()) malformed("unexpected end of file");
    std::string s(reinterpret_cast<const char*>(data.data() + pos), n);
    pos += n;
    return s;
  }
};

std::optional<TimeSignature> time_signature_from_meta(int nn, int dd) {
  if (nn == 4 && dd == 2) return TimeSignature::FourFour;
  if (nn == 3 && dd == 2) return TimeSignature::ThreeFour;
  if (nn == 6 && dd == 3) return TimeSignature::SixEight;
  return std::nullopt;
}

Key key_from_signature(int sf, int mi) {
  // sf sharps (negative = flats); the major root walks the circle of fifths.
  const int major_root = ((7 * sf) % 12 + 12) % 12;
  if (mi == 0) return Key{major_root, Mode::Major};
  return Key{(major_root + 9) % 12, Mode::Minor};
}

void append_be(std::vector<std::uint8_t>& out, std::uint32_t v, int nbytes) {
  for (int i = nbytes - 1; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
}

void append_vlq(std::vector<std::uint8_t>& out, std::int64_t v) {
  if (v < 0) malformed("negative delta time");
  std::uint8_t buf[5];
  int n = 0;
  do {
    buf[n++] = static_cast<std::uint8_t>(v & 0x7f);
    v >>= 7;
  } while (v > 0);
  for (int i = n - 1; i >= 0; --i) {
    out.push_back(i == 0 ? buf[i] : static_cast<std::uint8_t>(buf[i] | 0x80));
  }
}

}  // namespace

MidiFile read_midi(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  if (r.text(4) != "MThd") malformed("missing MThd header");
  const std::uint32_t header_len = r.be(4);
  if (header_len < 6) malformed("bad MThd length");
  const int format = static_cast<int>(r.be(2));
  const int ntrks = static_cast<int>(r.be(2));
  const std::uint32_t division_raw = r.be(2);
  r.skip(header_len - 6);
  if (format != 0 && format != 1) {
    malformed("unsupported SMF format " + std::to_string(format));
  }
  if (division_raw & 0x8000) malformed("SMPTE division not supported");

  MidiFile file;
  file.division = static_cast<int>(division_raw);
  if (file.division <= 0) malformed("division must be positive");

  for (int trk = 0; trk < ntrks; ++trk) {
    if (r.text(4) != "MTrk") malformed("missing MTrk chunk");
    const std::uint32_t len = r.be(4);
    const std::size_t track_end = r.pos + len;
    if (track_end > bytes.size()) malformed("track chunk overruns file");

    MidiTrackData track;
    bool saw_name = false;
    bool saw_program = false;
    std::int64_t tick = 0;
    std::uint8_t running = 0;
    // FIFO per (channel, pitch): first note-on matches first note-off.
    std::map<std::pair<int, int>, std::deque<std::pair<std::int64_t, int>>>
        open_notes;

    while (r.pos < track_end) {
      tick += r.vlq();
      std::uint8_t status = r.u8();
      if (status < 0x80) {
        if (running == 0) malformed("data byte without running status");
        --r.pos;
        status = running;
      }
      if (status == 0xff) {
        const std::uint8_t type = r.u8();
        const std::uint32_t mlen = r.vlq();
        const std::size_t body = r.pos;
        switch (type) {
          case 0x03:
            if (!saw_name) {
              track.name = r.text(mlen);
              saw_name = true;
            }
            break;
          case 0x51: {
            if (mlen != 3) malformed("bad tempo meta length");
            const std::uint32_t usec = r.be(3);
            if (usec == 0) break;
            const int bpm = static_cast<int>(std::llround(60000000.0 / usec));
            if (!file.bpm) {
              file.bpm = bpm;
            } else if (*file.bpm != bpm) {
              file.warnings.push_back("tempo change at tick " +
                                      std::to_string(tick) + " ignored");
            }
            break;
          }
          case 0x58: {
            if (mlen < 2) malformed("bad time-signature meta length");
            const int nn = r.u8();
            const int dd = r.u8();
            MetaChange ch;
            ch.tick = tick;
            ch.kind = MetaChange::Kind::TimeSignatureChange;
            ch.ts = time_signature_from_meta(nn, dd);
            ch.raw_numerator = nn;
            ch.raw_denominator = 1 << dd;
            file.meta_changes.push_back(ch);
            if (!file.time_signature && ch.ts) file.time_signature = ch.ts;
            break;
          }
          case 0x59: {
            if (mlen < 2) malformed("bad key-signature meta length");
            const int sf = static_cast<std::int8_t>(r.u8());
            const int mi = r.u8();
            MetaChange ch;
            ch.tick = tick;
            ch.kind = MetaChange::Kind::KeySignature;
            ch.key = key_from_signature(sf, mi);
            file.meta_changes.push_back(ch);
            if (!file.key) file.key = ch.key;
            break;
          }
          default:
            break;
        }
        r.pos = body;
        r.skip(mlen);
        continue;
      }
      if (status == 0xf0 || status == 0xf7) {
        running = 0;
        r.skip(r.vlq());
        continue;
      }

      running = status;
      const int kind = status >> 4;
      const int channel = status & 0x0f;
      switch (kind) {
        case 0x8:
        case 0x9: {
          const int pitch = r.u8() & 0x7f;
          const int velocity = r.u8() & 0x7f;
          const bool is_on = kind == 0x9 && velocity > 0;
          if (is_on) {
            open_notes[{channel, pitch}].push_back({tick, velocity});
          } else {
            auto it = open_notes.find({channel, pitch});
            if (it == open_notes.end() || it->second.empty()) {
              file.warnings.push_back("unmatched note-off at tick " +
                                      std::to_string(tick));
            } else {
              const auto [on_tick, on_vel] = it->second.front();
              it->second.pop_front();
              track.notes.push_back(
                  MidiNote{on_tick, std::max<std::int64_t>(1, tick - on_tick),
                           pitch, on_vel});
            }
          }
          break;
        }
        case 0xc: {
          const int program = r.u8() & 0x7f;
          if (!saw_program) {
            track.program = program;
            saw_program = true;
          }
          break;
        }
        case 0xd:
          r.skip(1);
          break;
        case 0xa:
        case 0xb:
        case 0xe:
          r.skip(2);
          break;
        default:
          malformed("unexpected status byte");
      }
      file.max_tick = std::max(file.max_tick, tick);
    }
    r.pos = track_end;

    // Close notes left hanging at the end of the track.
    for (auto& [chpitch, queue] : open_notes) {
      for (const auto& [on_tick, on_vel] : queue) {
        file.warnings.push_back("note-on without note-off (pitch " +
                                std::to_string(chpitch.second) +
                                "), closed at track end");
        track.notes.push_back(MidiNote{on_tick,
                                       std::max<std::int64_t>(1, tick - on_tick),
                                       chpitch.second, on_vel});
      }
    }
    std::sort(track.notes.begin(), track.notes.end(),
              [](const MidiNote& a, const MidiNote& b) {
                return std::tuple(a.tick, a.pitch, a.duration, a.velocity) <
                       std::tuple(b.tick, b.pitch, b.duration, b.velocity);
              });
    for (const MidiNote& n : track.notes) {
      file.max_tick = std::max(file.max_tick, n.tick + n.duration);
    }

    const bool keep = !track.notes.empty() || saw_name || saw_program;
    if (keep) file.tracks.push_back(std::move(track));
  }

  std::stable_sort(file.meta_changes.begin(), file.meta_changes.end(),
                   [](const MetaChange& a, const MetaChange& b) {
                     return a.tick < b.tick;
                   });
  return file;
}

std::vector<std::uint8_t> write_midi(std::span<const MidiTrackData> tracks,
                                     int bpm, TimeSignature time_signature,
                                     int division) {
  if (bpm <= 0) malformed("bpm must be positive");
  if (division <= 0 || division > 0x7fff) malformed("bad division");

  std::vector<std::uint8_t> out;
  out.reserve(64 + tracks.size() * 64);
  append_be(out, 0x4d546864u, 4);  // MThd
  append_be(out, 6, 4);
  append_be(out, 1, 2);  // format 1
  append_be(out, static_cast<std::uint32_t>(tracks.size() + 1), 2);
  append_be(out, static_cast<std::uint32_t>(division), 2);

  auto emit_chunk = [&out](const std::vector<std::uint8_t>& body) {
    append_be(out, 0x4d54726bu, 4);  // MTrk
    append_be(out, static_cast<std::uint32_t>(body.size()), 4);
    out.insert(out.end(), body.begin(), body.end());
  };

  // Conductor chunk: tempo, then time signature, both at tick 0.
  {
    std::vector<std::uint8_t> body;
    const std::uint32_t usec =
        static_cast<std::uint32_t>(std::llround(60000000.0 / bpm));
    body.push_back(0);
    body.push_back(0xff);
    body.push_back(0x51);
    body.push_back(3);
    append_be(body, usec, 3);
    const int nn = time_signature == TimeSignature::SixEight   ? 6
                   : time_signature == TimeSignature::ThreeFour ? 3
                                                                : 4;
    const int dd = time_signature == TimeSignature::SixEight ? 3 : 2;
    body.push_back(0);
    body.push_back(0xff);
    body.push_back(0x58);
    body.push_back(4);
    body.push_back(static_cast<std::uint8_t>(nn));
    body.push_back(static_cast<std::uint8_t>(dd));
    body.push_back(24);
    body.push_back(8);
    body.push_back(0);
    body.push_back(0xff);
    body.push_back(0x2f);
    body.push_back(0);
    emit_chunk(body);
  }

  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    const MidiTrackData& track = tracks[ti];
    const int channel = static_cast<int>(ti % 16);
    std::vector<std::uint8_t> body;

    body.push_back(0);
    body.push_back(0xff);
    body.push_back(0x03);
    append_vlq(body, static_cast<std::int64_t>(track.name.size()));
    body.insert(body.end(), track.name.begin(), track.name.end());

    body.push_back(0);
    body.push_back(static_cast<std::uint8_t>(0xc0 | channel));
    body.push_back(static_cast<std::uint8_t>(track.program & 0x7f));

    struct Event {
      std::int64_t tick;
      int on;  // offs sort before ons at equal ticks
      int pitch;
      int velocity;
    };
    std::vector<Event> events;
    events.reserve(track.notes.size() * 2);
    for (const MidiNote& n : track.notes) {
      if (n.tick < 0 || n.duration < 1) malformed("bad note timing");
      if (n.pitch < 0 || n.pitch > 127 || n.velocity < 0 || n.velocity > 127) {
        malformed("note pitch/velocity out of range");
      }
      events.push_back(Event{n.tick, 1, n.pitch, n.velocity});
      events.push_back(Event{n.tick + n.duration, 0, n.pitch, n.velocity});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) {
                return std::tuple(a.tick, a.on, a.pitch, a.velocity) <
                       std::tuple(b.tick, b.on, b.pitch, b.velocity);
              });

    std::int64_t last_tick = 0;
    for (const Event& e : events) {
      append_vlq(body, e.tick - last_tick);
      last_tick = e.tick;
      if (e.on) {
        body.push_back(static_cast<std::uint8_t>(0x90 | channel));
        body.push_back(static_cast<std::uint8_t>(e.pitch));
        body.push_back(static_cast<std::uint8_t>(e.velocity));
      } else {
        body.push_back(static_cast<std::uint8_t>(0x80 | channel));
        body.push_back(static_cast<std::uint8_t>(e.pitch));
        body.push_back(0);
      }
    }
    body.push_back(0);
    body.push_back(0xff);
    body.push_back(0x2f);
    body.push_back(0);
    emit_chunk(body);
  }

  return out;
}

std::int64_t bar_ticks(TimeSignature ts, int division) {
  return static_cast<std::int64_t>(beats_per_bar(ts)) * division;
}

MidiTrackData sample_to_ticks(const Sample& sample, int division) {
  const TimeSignature ts =
      sample.metadata.time_signature.value_or(TimeSignature::FourFour);
  const std::int64_t bt = bar_ticks(ts, division);

  MidiTrackData track;
  const std::string role =
      sample.metadata.track_role
          ? std::string(to_string(*sample.metadata.track_role))
          : "unknown";
  const std::string inst =
      sample.metadata.instrument
          ? std::string(to_string(*sample.metadata.instrument))
          : "unknown";
  track.name = role + "/" + inst;
  track.program = representative_program(
      sample.metadata.instrument.value_or(Instrument::Others));

  track.notes.reserve(sample.notes.size());
  for (const Note& n : sample.notes) {
    MidiNote mn;
    mn.tick = static_cast<std::int64_t>(n.bar) * bt +
              std::llround(static_cast<double>(n.position) * bt / kGridPerBar);
    mn.duration = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(n.duration) * bt / kGridPerBar));
    mn.pitch = n.pitch;
    mn.velocity = n.velocity.value;
    track.notes.push_back(mn);
  }
  std::sort(track.notes.begin(), track.notes.end(),
            [](const MidiNote& a, const MidiNote& b) {
              return std::tuple(a.tick, a.pitch, a.duration, a.velocity) <
                     std::tuple(b.tick, b.pitch, b.duration, b.velocity);
            });
  return track;
}

}  // namespace commu
