#pragma once

#include <array>
#include <cstdint>

#include "core/bytes.hpp"

namespace suarp::crypto {

constexpr std::size_t kSha1DigestLen = 20;

/// Plain SHA-1 over a byte string. Used as the protocols' collision-free
/// one-way hash H; all keying happens by feeding key material into the
/// input (see keyed_hash_mic), not here.
std::array<std::uint8_t, kSha1DigestLen> sha1(core::ByteView data);

}  // namespace suarp::crypto
