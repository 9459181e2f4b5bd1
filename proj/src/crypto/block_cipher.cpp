#include "crypto/block_cipher.hpp"

#include <stdexcept>

namespace suarp::crypto {

namespace {

constexpr std::uint32_t kDelta = 0x9e3779b9;
constexpr int kRounds = 32;

void load_key(core::ByteView key, std::uint32_t k[4]) {
  if (key.size() != 16) throw std::invalid_argument("xtea key must be 16 bytes");
  for (int i = 0; i < 4; ++i) {
    k[i] = static_cast<std::uint32_t>(key[i * 4]) << 24 |
           static_cast<std::uint32_t>(key[i * 4 + 1]) << 16 |
           static_cast<std::uint32_t>(key[i * 4 + 2]) << 8 |
           static_cast<std::uint32_t>(key[i * 4 + 3]);
  }
}

}  // namespace

std::uint64_t XteaCipher::encrypt_block(std::uint64_t block,
                                        core::ByteView key) const {
  std::uint32_t k[4];
  load_key(key, k);
  std::uint32_t v0 = static_cast<std::uint32_t>(block >> 32);
  std::uint32_t v1 = static_cast<std::uint32_t>(block);
  std::uint32_t sum = 0;
  for (int i = 0; i < kRounds; ++i) {
    v0 += (((v1 << 4) ^ (v1 >> 5)) + v1) ^ (sum + k[sum & 3]);
    sum += kDelta;
    v1 += (((v0 << 4) ^ (v0 >> 5)) + v0) ^ (sum + k[(sum >> 11) & 3]);
  }
  return static_cast<std::uint64_t>(v0) << 32 | v1;
}

std::uint64_t XteaCipher::decrypt_block(std::uint64_t block,
                                        core::ByteView key) const {
  std::uint32_t k[4];
  load_key(key, k);
  std::uint32_t v0 = static_cast<std::uint32_t>(block >> 32);
  std::uint32_t v1 = static_cast<std::uint32_t>(block);
  std::uint32_t sum = static_cast<std::uint32_t>(kDelta * kRounds);
  for (int i = 0; i < kRounds; ++i) {
    v1 -= (((v0 << 4) ^ (v0 >> 5)) + v0) ^ (sum + k[(sum >> 11) & 3]);
    sum -= kDelta;
    v0 -= (((v1 << 4) ^ (v1 >> 5)) + v1) ^ (sum + k[sum & 3]);
  }
  return static_cast<std::uint64_t>(v0) << 32 | v1;
}

const BlockCipher64& default_cipher() {
  static const XteaCipher cipher;
  return cipher;
}

}  // namespace suarp::crypto
