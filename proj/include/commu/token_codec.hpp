#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "commu/sample.hpp"
#include "commu/vocabulary.hpp"

namespace commu {

// Raised by decode (and by encode on malformed samples); index is the
// position of the first offending token, or npos for sample-side errors.
class CodecError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  CodecError(std::size_t index, const std::string& message)
      : std::runtime_error(index == npos
                               ? message
                               : "[token " + std::to_string(index) + "] " + message),
        index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// The 11 metadata tokens in prefix order. Unknown fields map to their
// category's unknown token; num_measures must be known.
TokenSequence encode_metadata(const MetadataSet& metadata);

// Body tokens: one bar token per measure, events in (position,
// chord-before-note, ascending pitch) order, terminated by eos. Events are
// canonicalised (sorted) before emission; duplicate grid entries and events
// beyond num_measures raise CodecError.
TokenSequence encode_body(std::span<const ChordEvent> chords,
                          std::span<const Note> notes, int num_measures);

TokenSequence encode(const Sample& sample);

// Inverse of encode. Requires a grammar-valid sequence; throws CodecError at
// the first offending token. Note velocities come back as bin
// representatives, so decode(encode(s)) equals s at bin level.
Sample decode(const TokenSequence& tokens);

// Grammar report; empty iff the sequence is valid. The grammar covers the
// metadata prefix, the bar/event structure, canonical event ordering, the
// bar count implied by the num-measures token, and the eos terminator.
std::vector<std::string> validate_grammar(const TokenSequence& tokens);

}  // namespace commu
