#include "commu/token_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace commu {

namespace {

[[noreturn]] void io_error(const std::filesystem::path& path,
                           const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

void append_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
}

}  // namespace

std::string tokens_to_text(const std::vector<TokenSequence>& sequences) {
  std::string out;
  for (const TokenSequence& seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) out += ' ';
      out += std::to_string(seq[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<TokenSequence> tokens_from_text(const std::string& text) {
  std::vector<TokenSequence> out;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream fields(line);
    TokenSequence seq;
    std::string field;
    while (fields >> field) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size() || v >= kVocabularySize) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": bad token '" + field + "'");
      }
      seq.push_back(static_cast<Token>(v));
    }
    if (!seq.empty()) out.push_back(std::move(seq));
  }
  return out;
}

std::vector<std::uint8_t> tokens_to_binary(
    const std::vector<TokenSequence>& sequences) {
  std::vector<std::uint8_t> out;
  for (const TokenSequence& seq : sequences) {
    append_u32le(out, static_cast<std::uint32_t>(seq.size()));
    for (Token t : seq) append_u16le(out, t);
  }
  return out;
}

std::vector<TokenSequence> tokens_from_binary(
    const std::vector<std::uint8_t>& bytes) {
  std::vector<TokenSequence> out;
  std::size_t i = 0;
  while (i < bytes.size()) {
    if (i + 4 > bytes.size()) {
      throw std::runtime_error("truncated token frame header");
    }
    std::uint32_t count = 0;
    for (int b = 0; b < 4; ++b) count |= std::uint32_t(bytes[i + b]) << (8 * b);
    i += 4;
    if (i + 2ull * count > bytes.size()) {
      throw std::runtime_error("truncated token frame payload");
    }
    TokenSequence seq;
    seq.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
      const Token t =
          static_cast<Token>(bytes[i] | (std::uint16_t(bytes[i + 1]) << 8));
      if (t >= kVocabularySize) {
        throw std::runtime_error("token out of vocabulary: " +
                                 std::to_string(t));
      }
      seq.push_back(t);
      i += 2;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TokenSequence> load_token_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (path.extension() == ".tokb") return tokens_from_binary(bytes);
  return tokens_from_text(std::string(bytes.begin(), bytes.end()));
}

void save_token_file(const std::filesystem::path& path,
                     const std::vector<TokenSequence>& sequences,
                     bool binary) {
  if (binary) {
    write_file_atomic(path, tokens_to_binary(sequences));
  } else {
    write_file_atomic(path, tokens_to_text(sequences));
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) io_error(path, "read failed");
  return bytes;
}

namespace {

void write_atomic_impl(const std::filesystem::path& path, const char* data,
                       std::size_t size) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_error(tmp, "cannot open for writing");
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) io_error(tmp, "write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& data) {
  write_atomic_impl(path, data.data(), data.size());
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& data) {
  write_atomic_impl(path, reinterpret_cast<const char*>(data.data()),
                    data.size());
}

}  // namespace commu
