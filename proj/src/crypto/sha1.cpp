#include "crypto/sha1.hpp"

#include <cstring>

namespace suarp::crypto {

namespace {

inline std::uint32_t rotl(std::uint32_t v, int n) {
  return (v << n) | (v >> (32 - n));
}

struct Sha1State {
  std::uint32_t h[5] = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476,
                        0xc3d2e1f0};

  void process(const std::uint8_t* block) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = static_cast<std::uint32_t>(block[i * 4]) << 24 |
             static_cast<std::uint32_t>(block[i * 4 + 1]) << 16 |
             static_cast<std::uint32_t>(block[i * 4 + 2]) << 8 |
             static_cast<std::uint32_t>(block[i * 4 + 3]);
    }
    for (int i = 16; i < 80; ++i)
      w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5a827999;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ed9eba1;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8f1bbcdc;
      } else {
        f = b ^ c ^ d;
        k = 0xca62c1d6;
      }
      std::uint32_t tmp = rotl(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rotl(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }
};

}  // namespace

std::array<std::uint8_t, kSha1DigestLen> sha1(core::ByteView data) {
  Sha1State state;
  std::size_t full = data.size() / 64;
  for (std::size_t i = 0; i < full; ++i) state.process(data.data() + i * 64);

  // Final block(s): 0x80 pad then 64-bit bit length.
  std::uint8_t tail[128] = {0};
  std::size_t rem = data.size() - full * 64;
  if (rem > 0) std::memcpy(tail, data.data() + full * 64, rem);
  tail[rem] = 0x80;
  std::size_t tail_len = (rem + 1 + 8 <= 64) ? 64 : 128;
  std::uint64_t bit_len = static_cast<std::uint64_t>(data.size()) * 8;
  for (int i = 0; i < 8; ++i)
    tail[tail_len - 8 + i] = static_cast<std::uint8_t>(bit_len >> (56 - 8 * i));
  state.process(tail);
  if (tail_len == 128) state.process(tail + 64);

  std::array<std::uint8_t, kSha1DigestLen> out{};
  for (int i = 0; i < 5; ++i) {
    out[i * 4] = static_cast<std::uint8_t>(state.h[i] >> 24);
    out[i * 4 + 1] = static_cast<std::uint8_t>(state.h[i] >> 16);
    out[i * 4 + 2] = static_cast<std::uint8_t>(state.h[i] >> 8);
    out[i * 4 + 3] = static_cast<std::uint8_t>(state.h[i]);
  }
  return out;
}

}  // namespace suarp::crypto
