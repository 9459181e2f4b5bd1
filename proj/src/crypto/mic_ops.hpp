#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "core/bytes.hpp"
#include "core/mic.hpp"
#include "core/rng.hpp"
#include "crypto/block_cipher.hpp"

namespace suarp::crypto {

using core::Bytes;
using core::ByteView;
using core::Mic;

constexpr std::size_t kNonceLen = 16;
constexpr std::size_t kSessionKeyLen = core::kKeyedHashLen;  // XOR masking needs equal lengths

/// Secret shared between one host and one server (the per-association key).
struct SharedKey {
  Bytes bytes;  // length = cipher key size
  bool operator==(const SharedKey&) const = default;
};

/// Per-exchange secret transported XOR-masked with a MIC.
struct SessionKey {
  Bytes bytes;  // length = kSessionKeyLen
  bool operator==(const SessionKey&) const = default;
};

/// Rolling shared random number (RN / NRN).
struct Nonce {
  Bytes bytes;  // length = kNonceLen
  bool operator==(const Nonce&) const = default;
};

class LengthMismatch : public std::invalid_argument {
 public:
  LengthMismatch() : std::invalid_argument("xor mask length mismatch") {}
};

class DecryptFailure : public std::runtime_error {
 public:
  explicit DecryptFailure(const std::string& what)
      : std::runtime_error("decrypt failure: " + what) {}
};

/// CBC residue over the zero-padded message with a zero IV: the final
/// ciphertext block is the integrity code. Deterministic by construction.
Mic cbc_residue_mic(const BlockCipher64& cipher, const SharedKey& key,
                    ByteView message);

Mic cbc_residue_mic(const SharedKey& key, ByteView message);

/// Keyed one-way hash MIC: H over the length-prefixed concatenation
/// key | nonce | parts in order. Every hash-MIC formula of the protocol
/// variants is an instance of this with different inputs.
Mic keyed_hash_mic(ByteView key, const std::optional<Nonce>& nonce,
                   const std::vector<Bytes>& parts);

/// Byte-wise XOR of a session key with a MIC digest; self-inverse, so the
/// same call masks on the sender and unmasks on the receiver.
Bytes xor_mask(const SessionKey& key, const Mic& mic);
SessionKey xor_unmask(ByteView masked, const Mic& mic);

/// CBC encryption with a random IV prepended. Confidentiality only; the
/// enclosing MIC/timestamp checks detect tampering.
Bytes encrypt_payload(const BlockCipher64& cipher, const SharedKey& key,
                      ByteView message, core::Rng& iv_rng);
Bytes decrypt_payload(const BlockCipher64& cipher, const SharedKey& key,
                      ByteView ciphertext);

Bytes encrypt_payload(const SharedKey& key, ByteView message, core::Rng& iv_rng);
Bytes decrypt_payload(const SharedKey& key, ByteView ciphertext);

/// Deterministic successor nonce for flows with no encrypted field to carry
/// one: both ends hash the shared key, the current RN and the exchange
/// transcript and truncate to nonce length.
Nonce derive_nrn(const SharedKey& key, const Nonce& current_rn,
                 ByteView transcript);

}  // namespace suarp::crypto
