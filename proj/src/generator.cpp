#include "commu/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "commu/token_codec.hpp"
#include "commu/token_io.hpp"

namespace commu {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 53-bit uniform in [0, 1); mt19937_64 output is portable across platforms.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Top-k draw over possibly masked (-inf) logits. Returns kVocabularySize
// when no probability mass survives.
Token masked_sample(std::span<const double> logits, const SamplerConfig& cfg,
                    std::mt19937_64& rng) {
  if (logits.size() != kVocabularySize) {
    throw std::invalid_argument("sample_next expects 729 logits");
  }
  if (cfg.top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  if (!(cfg.temperature > 0)) {
    throw std::invalid_argument("temperature must be positive");
  }

  double max_logit = kNegInf;
  for (double l : logits) {
    if (std::isnan(l)) throw std::invalid_argument("NaN logit");
    max_logit = std::max(max_logit, l);
  }
  if (max_logit == kNegInf) return kVocabularySize;

  // Temperature softmax, stabilised around the max.
  std::vector<double> probs(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = logits[i] == kNegInf
                   ? 0.0
                   : std::exp((logits[i] - max_logit) / cfg.temperature);
  }

  const std::size_t k =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k), probs.size());
  std::vector<int> ids(probs.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::nth_element(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   ids.end(), [&probs](int a, int b) {
                     return std::tuple(-probs[a], a) < std::tuple(-probs[b], b);
                   });
  ids.resize(k);
  std::sort(ids.begin(), ids.end());

  double total = 0;
  for (int id : ids) total += probs[static_cast<std::size_t>(id)];
  if (!(total > 0) || !std::isfinite(total)) return kVocabularySize;

  const double u = uniform01(rng) * total;
  double cum = 0;
  for (int id : ids) {
    cum += probs[static_cast<std::size_t>(id)];
    if (u < cum) return static_cast<Token>(id);
  }
  return static_cast<Token>(ids.back());
}

}  // namespace

// ---------------------------------------------------------------------------
// CountModel
// ---------------------------------------------------------------------------

CountModel::CountModel(int order, double alpha) : order_(order), alpha_(alpha) {
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
}

std::uint64_t CountModel::context_hash(std::span<const Token> context) {
  // FNV-1a over the token bytes, seeded with the context length so contexts
  // of different order never alias trivially.
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint8_t>(context.size()));
  for (Token t : context) {
    mix(static_cast<std::uint8_t>(t & 0xff));
    mix(static_cast<std::uint8_t>(t >> 8));
  }
  return h;
}

void CountModel::add_sequence(std::span<const Token> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int max_ctx = std::min<int>(order_ - 1, static_cast<int>(i));
    for (int k = 0; k <= max_ctx; ++k) {
      const auto ctx = tokens.subspan(i - static_cast<std::size_t>(k),
                                      static_cast<std::size_t>(k));
      ContextEntry& entry = table_[context_hash(ctx)];
      entry.counts[tokens[i]] += 1;
      entry.total += 1;
    }
  }
}

std::vector<double> CountModel::next_logits(
    std::span<const Token> prefix) const {
  // Longest seen context wins; the empty context is present whenever the
  // model saw any data, and an untrained model is uniform.
  const ContextEntry* entry = nullptr;
  const int max_ctx =
      std::min<int>(order_ - 1, static_cast<int>(prefix.size()));
  for (int k = max_ctx; k >= 0; --k) {
    const auto ctx = prefix.subspan(prefix.size() - static_cast<std::size_t>(k),
                                    static_cast<std::size_t>(k));
    auto it = table_.find(context_hash(ctx));
    if (it != table_.end() && it->second.total > 0) {
      entry = &it->second;
      break;
    }
  }

  const double total = entry ? static_cast<double>(entry->total) : 0.0;
  const double denom = total + alpha_ * kVocabularySize;
  if (denom == 0) {
    // alpha = 0 and no data at all: fall back to uniform.
    return std::vector<double>(kVocabularySize, -std::log(kVocabularySize));
  }
  // -inf when alpha == 0 and the continuation is unseen.
  std::vector<double> logits(kVocabularySize, std::log(alpha_ / denom));
  if (entry) {
    for (const auto& [token, count] : entry->counts) {
      logits[token] = std::log((static_cast<double>(count) + alpha_) / denom);
    }
  }
  return logits;
}

void CountModel::set_alpha(double alpha) {
  if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
  alpha_ = alpha;
}

std::uint64_t CountModel::count(std::span<const Token> context,
                                Token next) const {
  auto it = table_.find(context_hash(context));
  if (it == table_.end()) return 0;
  auto ct = it->second.counts.find(next);
  return ct == it->second.counts.end() ? 0 : ct->second;
}

namespace {

constexpr char kModelMagic[4] = {'C', 'M', 'K', 'M'};
constexpr std::uint32_t kModelVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct ByteReader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > data.size()) {
      throw std::runtime_error("model file truncated");
    }
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v =
        static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8));
    pos += 2;
    return v;
  }
};

}  // namespace

std::vector<std::uint8_t> CountModel::to_bytes() const {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kModelMagic, kModelMagic + 4);
  put_u32(out, kModelVersion);
  put_u32(out, static_cast<std::uint32_t>(order_));
  put_u32(out, kVocabularySize);
  std::uint64_t alpha_bits;
  static_assert(sizeof(alpha_bits) == sizeof(alpha_));
  std::memcpy(&alpha_bits, &alpha_, sizeof(alpha_bits));
  put_u64(out, alpha_bits);

  struct Triple {
    std::uint64_t hash;
    Token token;
    std::uint64_t count;
  };
  std::vector<Triple> triples;
  for (const auto& [hash, entry] : table_) {
    for (const auto& [token, count] : entry.counts) {
      triples.push_back(Triple{hash, token, count});
    }
  }
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return std::tuple(a.hash, a.token) < std::tuple(b.hash, b.token);
  });

  put_u64(out, triples.size());
  for (const Triple& t : triples) {
    put_u64(out, t.hash);
    out.push_back(static_cast<std::uint8_t>(t.token & 0xff));
    out.push_back(static_cast<std::uint8_t>(t.token >> 8));
    put_u64(out, t.count);
  }
  return out;
}

CountModel CountModel::from_bytes(std::span<const std::uint8_t> bytes) {
  ByteReader r{bytes};
  r.need(4);
  if (!std::equal(kModelMagic, kModelMagic + 4, bytes.begin())) {
    throw std::runtime_error("not a CMKM model file");
  }
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw std::runtime_error("unsupported model version " +
                             std::to_string(version));
  }
  const int order = static_cast<int>(r.u32());
  const std::uint32_t vocab = r.u32();
  if (vocab != kVocabularySize) {
    throw std::runtime_error("model vocabulary size mismatch");
  }
  const std::uint64_t alpha_bits = r.u64();
  double alpha;
  std::memcpy(&alpha, &alpha_bits, sizeof(alpha));

  CountModel model(order, alpha);
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t hash = r.u64();
    const Token token = r.u16();
    const std::uint64_t count = r.u64();
    if (token >= kVocabularySize) {
      throw std::runtime_error("model token out of vocabulary");
    }
    ContextEntry& entry = model.table_[hash];
    entry.counts[token] += count;
    entry.total += count;
  }
  return model;
}

void CountModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_bytes());
}

CountModel CountModel::load(const std::filesystem::path& path) {
  return from_bytes(read_file_bytes(path));
}

CountModel train_count_model(std::span<const TokenSequence> corpus, int order,
                             double alpha) {
  if (corpus.empty()) {
    throw std::invalid_argument("train_count_model: empty corpus");
  }
  CountModel model(order, alpha);
  for (const TokenSequence& seq : corpus) model.add_sequence(seq);
  return model;
}

double nll(const SequenceModel& model, std::span<const Token> tokens) {
  if (tokens.size() <= kMetadataTokenCount) {
    throw std::invalid_argument("nll: sequence has no body tokens");
  }
  double sum = 0;
  std::size_t scored = 0;
  for (std::size_t i = kMetadataTokenCount; i < tokens.size(); ++i) {
    const auto logits = model.next_logits(tokens.subspan(0, i));
    sum -= logits[tokens[i]];
    ++scored;
  }
  return sum / static_cast<double>(scored);
}

Token sample_next(std::span<const double> logits, const SamplerConfig& config,
                  std::mt19937_64& rng) {
  for (double l : logits) {
    if (!std::isfinite(l)) {
      throw std::invalid_argument("sample_next requires finite logits");
    }
  }
  const Token t = masked_sample(logits, config, rng);
  if (t >= kVocabularySize) {
    throw std::runtime_error("sample_next: degenerate distribution");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Constrained decoding
// ---------------------------------------------------------------------------

namespace {

struct DecodeState {
  int num_measures;
  int bar_count = 0;   // bars opened so far; current bar index is bar_count-1
  int cur_pos = 0;
  int last_pitch = -1;  // last note pitch at cur_pos, -1 when none
  std::size_t next_chord = 0;
};

enum class Phase { Boundary, Velocity, Pitch, Duration };

}  // namespace

GenerateResult generate(const SequenceModel& model, const MetadataSet& metadata,
                        std::span<const ChordEvent> chords,
                        const SamplerConfig& config) {
  GenerateResult result;

  // Validate the progression against the metadata up front.
  for (std::size_t i = 0; i < chords.size(); ++i) {
    const ChordEvent& c = chords[i];
    if (c.bar < 0 || c.bar >= metadata.num_measures || c.position < 0 ||
        c.position >= kGridPerBar) {
      result.error = "chord progression outside num_measures/grid";
      return result;
    }
    if (i > 0 && !(std::tuple(chords[i - 1].bar, chords[i - 1].position) <
                   std::tuple(c.bar, c.position))) {
      result.error = "chord progression not strictly ordered";
      return result;
    }
  }

  TokenSequence& out = result.tokens;
  try {
    out = encode_metadata(metadata);
  } catch (const std::exception& e) {
    result.error = e.what();
    return result;
  }

  std::mt19937_64 rng(config.seed);
  DecodeState st{metadata.num_measures};
  Phase phase = Phase::Boundary;
  int pending_position = 0;
  std::vector<double> mask(kVocabularySize);

  // Emit every scheduled chord of the current bar up to grid point `limit`
  // (kGridPerBar = the whole bar).
  auto flush_chords = [&](int limit) {
    while (st.next_chord < chords.size() &&
           chords[st.next_chord].bar == st.bar_count - 1 &&
           chords[st.next_chord].position <= limit) {
      const ChordEvent& c = chords[st.next_chord];
      out.push_back(token_for_position(c.position));
      out.push_back(token_for_chord(c.chord));
      if (c.position > st.cur_pos) st.last_pitch = -1;
      st.cur_pos = c.position;
      ++st.next_chord;
    }
  };

  while (static_cast<int>(out.size()) < config.max_tokens) {
    const auto logits = model.next_logits(out);
    if (logits.size() != static_cast<std::size_t>(kVocabularySize)) {
      result.error = "model returned wrong logit count";
      return result;
    }

    std::fill(mask.begin(), mask.end(), kNegInf);
    auto allow = [&](Token t) { mask[t] = logits[t]; };
    auto allow_range = [&](TokenCategory c) {
      const CategoryRange r = category_range(c);
      for (Token t = r.lo; t <= r.hi; ++t) allow(t);
    };

    switch (phase) {
      case Phase::Boundary: {
        if (st.bar_count < st.num_measures) allow(kBarToken);
        if (st.bar_count == st.num_measures) allow(kEosToken);
        if (st.bar_count > 0) {
          for (int p = st.cur_pos; p < kGridPerBar; ++p) {
            if (p == st.cur_pos && st.last_pitch >= 127) continue;
            allow(token_for_position(p));
          }
        }
        break;
      }
      case Phase::Velocity:
        allow_range(TokenCategory::NoteVelocity);
        break;
      case Phase::Pitch: {
        const int min_pitch = (pending_position == st.cur_pos)
                                  ? st.last_pitch + 1
                                  : 0;
        for (int q = min_pitch; q <= 127; ++q) allow(token_for_pitch(q));
        break;
      }
      case Phase::Duration:
        allow_range(TokenCategory::NoteDuration);
        break;
    }

    const Token t = masked_sample(mask, config, rng);
    if (t >= kVocabularySize) {
      result.error = "no valid continuation (all masked tokens have zero mass)";
      return result;
    }

    switch (phase) {
      case Phase::Boundary: {
        if (t == kBarToken) {
          if (st.bar_count > 0) flush_chords(kGridPerBar);
          out.push_back(kBarToken);
          ++st.bar_count;
          st.cur_pos = 0;
          st.last_pitch = -1;
          break;
        }
        if (t == kEosToken) {
          flush_chords(kGridPerBar);
          out.push_back(kEosToken);
          result.ok = true;
          return result;
        }
        pending_position = position_from_token(t);
        flush_chords(pending_position);
        out.push_back(t);
        phase = Phase::Velocity;
        break;
      }
      case Phase::Velocity:
        out.push_back(t);
        phase = Phase::Pitch;
        break;
      case Phase::Pitch:
        out.push_back(t);
        phase = Phase::Duration;
        break;
      case Phase::Duration: {
        out.push_back(t);
        if (pending_position > st.cur_pos) st.last_pitch = -1;
        st.cur_pos = pending_position;
        st.last_pitch = pitch_from_token(out[out.size() - 2]);
        phase = Phase::Boundary;
        break;
      }
    }
  }

  result.error = "max_tokens reached before eos";
  return result;
}

std::vector<std::vector<GenerateResult>> batch_generate(
    const SequenceModel& model, std::span<const MetadataSet> metadata_sets,
    std::span<const ChordEvent> chords, const SamplerConfig& config,
    int num_per_metadata) {
  if (num_per_metadata < 1) {
    throw std::invalid_argument("num_per_metadata must be >= 1");
  }
  std::vector<std::vector<GenerateResult>> out;
  out.reserve(metadata_sets.size());
  std::uint64_t counter = 0;
  for (const MetadataSet& meta : metadata_sets) {
    std::vector<GenerateResult> group;
    group.reserve(static_cast<std::size_t>(num_per_metadata));
    for (int i = 0; i < num_per_metadata; ++i) {
      SamplerConfig cfg = config;
      cfg.seed = config.seed + counter++;
      group.push_back(generate(model, meta, chords, cfg));
    }
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace commu
