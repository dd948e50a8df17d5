#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace bnas {

// All numeric work runs in double precision. The packed inference kernels
// use integers and are exact by construction.
using real = double;

// Raised when tensor shapes or layouts do not line up.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a caller violates an operation's contract (wrong phase,
// missing state, non-scalar loss, ...).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on malformed input files; carries the byte offset of the problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::uint64_t offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::uint64_t byte_offset;
};

// Raised on invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

// One named random substream per consumer, derived from the master seed.
// Adding a consumer never perturbs the streams of existing ones.
inline std::mt19937_64 substream(std::uint64_t master_seed, const std::string& name) {
  return std::mt19937_64(master_seed ^ fnv1a64(name));
}

}  // namespace bnas
