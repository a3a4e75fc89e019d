#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ganprng/errors.hpp"
#include "ganprng/models.hpp"

namespace ganprng {

/// Ordered bit sequence with a provenance note naming the run that
/// produced it.
class BitStream {
 public:
  BitStream() = default;
  explicit BitStream(std::vector<std::uint8_t> bits, std::string provenance = "")
      : bits_(std::move(bits)), provenance_(std::move(provenance)) {
    for (std::uint8_t b : bits_) {
      if (b > 1) throw InvalidInput("bitstream values must be 0 or 1");
    }
  }

  std::size_t bit_count() const noexcept { return bits_.size(); }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::span<const std::uint8_t> view() const noexcept { return bits_; }
  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  void append(std::uint8_t bit) { bits_.push_back(bit & 1u); }

  bool operator==(const BitStream& other) const noexcept {
    return bits_ == other.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
  std::string provenance_;
};

/// Rounds raw generator values to 16-bit words: half away from zero, then
/// clamped to [0, 65535]. Inputs outside [0, 65536) are rejected; the mod
/// output layer should make that impossible.
inline std::vector<std::uint16_t> quantize(const SequenceBatch& values) {
  const Tensor& v = values.values();
  std::vector<std::uint16_t> words(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    if (!(x >= 0.0 && x < 65536.0)) {
      throw InvalidInput("quantize: value " + std::to_string(x) +
                         " outside [0, 65536)");
    }
    double r = std::round(x);  // half away from zero
    if (r > 65535.0) r = 65535.0;
    words[i] = static_cast<std::uint16_t>(r);
  }
  return words;
}

/// Expands each word to 16 bits, most-significant bit first, words in
/// row-major generator order.
inline void append_bits(std::span<const std::uint16_t> words, BitStream& out) {
  for (std::uint16_t w : words) {
    for (int k = 15; k >= 0; --k) {
      out.append(static_cast<std::uint8_t>((w >> k) & 1u));
    }
  }
}

inline BitStream to_bits(std::span<const std::uint16_t> words) {
  BitStream s;
  append_bits(words, s);
  return s;
}

/// Writes one ASCII '0'/'1' per bit, no separators; the format the NIST
/// STS consumes in ASCII mode.
inline void write_ascii_bits(const BitStream& stream,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EnvironmentError("cannot open " + path.string() + " for writing");
  std::string buf;
  buf.reserve(1 << 16);
  for (std::uint8_t b : stream.bits()) {
    buf.push_back(b ? '1' : '0');
    if (buf.size() == buf.capacity()) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw EnvironmentError("write failed for " + path.string());
}

/// Incremental ASCII bit writer for streams too large to hold in memory.
class AsciiBitWriter {
 public:
  explicit AsciiBitWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw EnvironmentError("cannot open " + path.string() + " for writing");
  }

  void append_words(std::span<const std::uint16_t> words) {
    for (std::uint16_t w : words) {
      for (int k = 15; k >= 0; --k) {
        buf_.push_back(((w >> k) & 1u) ? '1' : '0');
      }
      if (buf_.size() >= (1u << 16)) flush_buffer();
    }
    bits_written_ += 16 * words.size();
  }

  std::uint64_t bits_written() const noexcept { return bits_written_; }

  void close() {
    flush_buffer();
    out_.close();
    if (!out_) throw EnvironmentError("write failed for " + path_.string());
  }

 private:
  void flush_buffer() {
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::string buf_;
  std::uint64_t bits_written_ = 0;
};

/// Reads an ASCII bit file. Whitespace is ignored; any other byte is a
/// parse error reported with its offset.
inline BitStream read_ascii_bits(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open " + path.string());
  std::vector<std::uint8_t> bits;
  std::vector<char> buf(1 << 16);
  std::size_t offset = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::size_t got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      const char c = buf[i];
      if (c == '0') {
        bits.push_back(0);
      } else if (c == '1') {
        bits.push_back(1);
      } else if (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
        // ignorable
      } else {
        throw ParseError("unexpected character '" + std::string(1, c) +
                             "' in bit file " + path.string(),
                         offset + i);
      }
    }
    offset += got;
  }
  BitStream s(std::move(bits));
  s.set_provenance(path.string());
  return s;
}

/// Emits the first width*height bits as a plain-text portable bitmap (P1),
/// row-major, one raster row per line.
inline void visualize_grid(const BitStream& stream, std::size_t width,
                           std::size_t height,
                           const std::filesystem::path& path) {
  if (width == 0 || height == 0) {
    throw InvalidInput("visualize_grid: width and height must be positive");
  }
  if (stream.bit_count() < width * height) {
    throw InvalidInput("visualize_grid: need " + std::to_string(width * height) +
                       " bits, have " + std::to_string(stream.bit_count()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EnvironmentError("cannot open " + path.string() + " for writing");
  out << "P1\n" << width << " " << height << "\n";
  const auto& bits = stream.bits();
  for (std::size_t r = 0; r < height; ++r) {
    std::string line(width, '0');
    for (std::size_t c = 0; c < width; ++c) {
      line[c] = bits[r * width + c] ? '1' : '0';
    }
    out << line << "\n";
  }
  if (!out) throw EnvironmentError("write failed for " + path.string());
}

/// Shannon entropy, in bits per symbol, of the distribution of
/// non-overlapping 8-bit blocks. Ranges over [0, 8]; a trailing partial
/// byte is discarded.
inline double byte_entropy(const BitStream& stream) {
  if (stream.bit_count() < 8) {
    throw InvalidInput("byte_entropy: need at least 8 bits");
  }
  std::array<std::uint64_t, 256> counts{};
  const auto& bits = stream.bits();
  const std::size_t n_bytes = bits.size() / 8;
  for (std::size_t i = 0; i < n_bytes; ++i) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8; ++k) v = (v << 1) | bits[i * 8 + k];
    ++counts[v];
  }
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n_bytes);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace ganprng
