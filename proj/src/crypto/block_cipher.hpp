#pragma once

#include <cstdint>
#include <memory>

#include "core/bytes.hpp"

namespace suarp::crypto {

/// Abstract 64-bit block cipher. The protocols only need the block shape;
/// the concrete cipher is pluggable.
class BlockCipher64 {
 public:
  virtual ~BlockCipher64() = default;

  virtual std::size_t key_size() const = 0;
  virtual std::uint64_t encrypt_block(std::uint64_t block,
                                      core::ByteView key) const = 0;
  virtual std::uint64_t decrypt_block(std::uint64_t block,
                                      core::ByteView key) const = 0;
};

/// XTEA, 32 rounds, 128-bit key. Small, well studied, 64-bit block.
class XteaCipher final : public BlockCipher64 {
 public:
  std::size_t key_size() const override { return 16; }
  std::uint64_t encrypt_block(std::uint64_t block,
                              core::ByteView key) const override;
  std::uint64_t decrypt_block(std::uint64_t block,
                              core::ByteView key) const override;
};

/// Process-wide default cipher instance.
const BlockCipher64& default_cipher();

}  // namespace suarp::crypto
