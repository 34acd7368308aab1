#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "commu/sample.hpp"
#include "commu/vocabulary.hpp"

namespace commu {

// Next-token-distribution provider. Implementations must return 729 finite
// scores for any grammar-valid prefix; they are read-only after training and
// safe to share across decoding jobs.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  int vocabulary_size() const { return kVocabularySize; }
  virtual std::vector<double> next_logits(
      std::span<const Token> prefix) const = 0;
};

// Back-off n-gram model with additive smoothing: the longest previously seen
// context of up to order-1 tokens predicts; probabilities are
// (count + alpha) / (total + alpha * 729). With alpha = 0 unseen
// continuations get probability zero (log -inf), so keep alpha positive for
// sampling.
class CountModel : public SequenceModel {
 public:
  explicit CountModel(int order = 4, double alpha = 0.1);

  void add_sequence(std::span<const Token> tokens);

  std::vector<double> next_logits(std::span<const Token> prefix) const override;

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  void set_alpha(double alpha);
  std::uint64_t count(std::span<const Token> context, Token next) const;
  std::size_t context_count() const { return table_.size(); }

  // Versioned binary model file, magic "CMKM": sorted (context hash, token,
  // count) triples. Identical models serialise to identical bytes.
  std::vector<std::uint8_t> to_bytes() const;
  static CountModel from_bytes(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static CountModel load(const std::filesystem::path& path);

 private:
  struct ContextEntry {
    std::uint64_t total = 0;
    std::map<Token, std::uint64_t> counts;
  };

  static std::uint64_t context_hash(std::span<const Token> context);

  int order_;
  double alpha_;
  std::unordered_map<std::uint64_t, ContextEntry> table_;
};

// Fits a count model by accumulating every training sequence; adding a
// sequence twice doubles its counts. Throws on an empty corpus.
CountModel train_count_model(std::span<const TokenSequence> corpus,
                             int order = 4, double alpha = 0.1);

// Mean negative log-likelihood over the body tokens (positions >= 11,
// zero-based; the metadata prefix conditions but is not scored). Throws when
// the sequence has no body.
double nll(const SequenceModel& model, std::span<const Token> tokens);

struct SamplerConfig {
  int top_k = 32;
  double temperature = 0.95;
  std::uint64_t seed = 0;
  int max_tokens = 65536;
};

// Temperature softmax, keep the top_k most probable tokens (ties broken by
// lower token id), renormalise, draw with the supplied generator. Requires
// finite logits.
Token sample_next(std::span<const double> logits, const SamplerConfig& config,
                  std::mt19937_64& rng);

struct GenerateResult {
  TokenSequence tokens;  // partial on failure
  bool ok = false;
  std::string error;
};

// Metadata- and chord-conditioned decoding. The metadata prefix is emitted
// verbatim; chord tokens are never sampled, only injected: whenever the
// sampled position (or bar/eos) token would move past a scheduled chord, the
// chord's position+chord pair is emitted first. All grammar-invalid tokens
// are masked each step, so any run that terminates by eos parses cleanly and
// its chord events equal the input progression exactly.
GenerateResult generate(const SequenceModel& model, const MetadataSet& metadata,
                        std::span<const ChordEvent> chords,
                        const SamplerConfig& config);

// num_per_metadata generations per metadata set, seeds derived from
// config.seed by a running counter. Per-item failures are recorded, not
// thrown.
std::vector<std::vector<GenerateResult>> batch_generate(
    const SequenceModel& model, std::span<const MetadataSet> metadata_sets,
    std::span<const ChordEvent> chords, const SamplerConfig& config,
    int num_per_metadata);

}  // namespace commu
