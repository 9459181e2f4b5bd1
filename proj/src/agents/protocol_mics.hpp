#pragma once

// The four MIC shapes the secure protocol variants are built from. Every
// MIC formula in the exchange schemas is one of these applied to canonical
// body bytes.

#include "core/mic.hpp"
#include "crypto/mic_ops.hpp"

namespace suarp::agents {

using core::Bytes;
using core::Mic;
using crypto::Nonce;
using crypto::SessionKey;
using crypto::SharedKey;

/// H(K, RN, message) — request/response MICs of the hash variants.
inline Mic rn_mic(const SharedKey& key, const Nonce& rn, const Bytes& body) {
  return crypto::keyed_hash_mic(key.bytes, rn, {body});
}

/// H(K, previous-message, message) — the chained MIC the session key is
/// masked with in the version-2 schemas.
inline Mic chain_mic(const SharedKey& key, const Bytes& prev_body,
                     const Bytes& body) {
  return crypto::keyed_hash_mic(key.bytes, std::nullopt, {prev_body, body});
}

/// H(S_K, NRN) — proves possession of the session key and successor nonce.
inline Mic session_mic(const SessionKey& sk, const Nonce& nrn) {
  return crypto::keyed_hash_mic(sk.bytes, std::nullopt, {nrn.bytes});
}

/// H(S_K, ACK, NRN) — the version-2 acknowledgment MIC.
inline Mic ack_mic(const SessionKey& sk, const Bytes& ack_body,
                   const Nonce& nrn) {
  return crypto::keyed_hash_mic(sk.bytes, std::nullopt, {ack_body, nrn.bytes});
}

enum class SuarpVariant { Base, AltV1, AltV2 };
enum class SdhcpVariant { Base, AltV1, AltV2 };

inline const char* suarp_variant_name(SuarpVariant variant) {
  switch (variant) {
    case SuarpVariant::Base: return "base";
    case SuarpVariant::AltV1: return "v1";
    case SuarpVariant::AltV2: return "v2";
  }
  return "?";
}

inline const char* sdhcp_variant_name(SdhcpVariant variant) {
  switch (variant) {
    case SdhcpVariant::Base: return "base";
    case SdhcpVariant::AltV1: return "v1";
    case SdhcpVariant::AltV2: return "v2";
  }
  return "?";
}

}  // namespace suarp::agents
