#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "ganprng/errors.hpp"
#include "ganprng/models.hpp"

namespace ganprng {

/// Versioned flat binary network snapshot:
///   magic "GPNC" | u32 version | u32 arch id | u32 hidden width |
///   u32 hidden depth | u64 parameter count | parameters as little-endian
///   64-bit reals in layer order (each layer: weights then bias).
/// Width/depth are zero for the fixed-architecture adversaries.
enum class ArchId : std::uint32_t {
  generator = 1,
  discriminator = 2,
  predictor = 3,
};

namespace detail {

constexpr std::array<char, 4> kCheckpointMagic = {'G', 'P', 'N', 'C'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <class T>
T read_le(std::istream& in) {
  static_assert(std::is_integral_v<T>);
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::istream::traits_type::eof()) {
      throw ParseError("checkpoint truncated", static_cast<std::size_t>(in.tellg()));
    }
    value |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

inline void write_double_le(std::ostream& out, double v) {
  write_le(out, std::bit_cast<std::uint64_t>(v));
}

inline double read_double_le(std::istream& in) {
  return std::bit_cast<double>(read_le<std::uint64_t>(in));
}

template <class Net>
void save_net(Net& net, ArchId arch, std::uint32_t width, std::uint32_t depth,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EnvironmentError("cannot open " + path.string() + " for writing");
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  write_le(out, kCheckpointVersion);
  write_le(out, static_cast<std::uint32_t>(arch));
  write_le(out, width);
  write_le(out, depth);
  write_le(out, static_cast<std::uint64_t>(net.parameter_count()));
  net.for_each_parameter([&](nn::ParamRef p) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      write_double_le(out, p.value[i]);
    }
  });
  if (!out) throw EnvironmentError("write failed for " + path.string());
}

struct CheckpointHeader {
  std::uint32_t version;
  ArchId arch;
  std::uint32_t hidden_width;
  std::uint32_t hidden_depth;
  std::uint64_t parameter_count;
};

inline CheckpointHeader read_header(std::istream& in,
                                    const std::filesystem::path& path) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCheckpointMagic) {
    throw ParseError("not a network checkpoint: " + path.string(), 0);
  }
  CheckpointHeader h{};
  h.version = read_le<std::uint32_t>(in);
  if (h.version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(h.version), 4);
  }
  h.arch = static_cast<ArchId>(read_le<std::uint32_t>(in));
  h.hidden_width = read_le<std::uint32_t>(in);
  h.hidden_depth = read_le<std::uint32_t>(in);
  h.parameter_count = read_le<std::uint64_t>(in);
  return h;
}

template <class Net>
void load_params(Net& net, std::istream& in, const CheckpointHeader& h,
                 const std::filesystem::path& path) {
  if (h.parameter_count != net.parameter_count()) {
    throw ParseError("checkpoint parameter count " +
                         std::to_string(h.parameter_count) +
                         " does not match architecture (" +
                         std::to_string(net.parameter_count()) + ")",
                     24);
  }
  net.for_each_parameter([&](nn::ParamRef p) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      p.value[i] = read_double_le(in);
    }
  });
  in.peek();
  if (!in.eof()) {
    throw ParseError("trailing bytes after checkpoint payload: " + path.string(),
                     static_cast<std::size_t>(in.tellg()));
  }
}

}  // namespace detail

inline void save_checkpoint(GeneratorNet& net, const std::filesystem::path& path) {
  detail::save_net(net, ArchId::generator,
                   static_cast<std::uint32_t>(net.hidden_width()),
                   static_cast<std::uint32_t>(net.hidden_depth()), path);
}

inline void save_checkpoint(DiscriminatorNet& net,
                            const std::filesystem::path& path) {
  detail::save_net(net, ArchId::discriminator, 0, 0, path);
}

inline void save_checkpoint(PredictorNet& net, const std::filesystem::path& path) {
  detail::save_net(net, ArchId::predictor, 0, 0, path);
}

inline GeneratorNet load_generator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open " + path.string());
  const auto h = detail::read_header(in, path);
  if (h.arch != ArchId::generator) {
    throw ParseError("checkpoint is not a generator: " + path.string(), 8);
  }
  Rng scratch(0);  // parameters are overwritten below
  GeneratorNet net(scratch, h.hidden_width, h.hidden_depth);
  detail::load_params(net, in, h, path);
  return net;
}

inline DiscriminatorNet load_discriminator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open " + path.string());
  const auto h = detail::read_header(in, path);
  if (h.arch != ArchId::discriminator) {
    throw ParseError("checkpoint is not a discriminator: " + path.string(), 8);
  }
  Rng scratch(0);
  DiscriminatorNet net(scratch);
  detail::load_params(net, in, h, path);
  return net;
}

inline PredictorNet load_predictor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open " + path.string());
  const auto h = detail::read_header(in, path);
  if (h.arch != ArchId::predictor) {
    throw ParseError("checkpoint is not a predictor: " + path.string(), 8);
  }
  Rng scratch(0);
  PredictorNet net(scratch);
  detail::load_params(net, in, h, path);
  return net;
}

}  // namespace ganprng
