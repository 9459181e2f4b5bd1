#pragma once

#include <compare>
#include <cstdint>

#include "core/bytes.hpp"

namespace suarp::core {

enum class MicScheme : std::uint8_t {
  CbcResidue = 1,  // final CBC ciphertext block, 8 bytes
  KeyedHash = 2,   // one-way hash digest, 20 bytes
};

constexpr std::size_t kCbcResidueLen = 8;
constexpr std::size_t kKeyedHashLen = 20;

constexpr std::size_t mic_length(MicScheme scheme) {
  return scheme == MicScheme::CbcResidue ? kCbcResidueLen : kKeyedHashLen;
}

/// Fixed-length message integrity digest attached to secure messages.
struct Mic {
  MicScheme scheme{MicScheme::CbcResidue};
  Bytes bytes;

  bool operator==(const Mic&) const = default;
};

}  // namespace suarp::core
