#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "commu/vocabulary.hpp"

namespace commu {

// Text corpus: one sample per line, space-separated decimal tokens. Blank
// lines are skipped.
std::string tokens_to_text(const std::vector<TokenSequence>& sequences);
std::vector<TokenSequence> tokens_from_text(const std::string& text);

// Binary corpus: a stream of frames, each a little-endian u32 token count
// followed by that many little-endian u16 tokens.
std::vector<std::uint8_t> tokens_to_binary(
    const std::vector<TokenSequence>& sequences);
std::vector<TokenSequence> tokens_from_binary(
    const std::vector<std::uint8_t>& bytes);

std::vector<TokenSequence> load_token_file(const std::filesystem::path& path);
void save_token_file(const std::filesystem::path& path,
                     const std::vector<TokenSequence>& sequences,
                     bool binary = false);

// Atomic whole-file helpers (temp file + rename) shared across the toolkit.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& data);
void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& data);

}  // namespace commu
