#pragma once

// Ring JSON ingestion and emission.
//
//   {"label": str, "prime": int, "rank": int,
//    "brackets": [{"i": int, "j": int, "coeffs": [int x rank]}]}
//
// i < j are 1-based; omitted pairs are zero brackets; "label" may be omitted.
// Unknown keys, duplicate pairs and non-integer numbers are rejected.

#include "lazard/liering.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace lazard {

inline constexpr int kRingSchemaVersion = 1;

/// Schema checks only; throws SchemaError with a JSON pointer.
auto parse_ring_json(std::string_view text) -> LieRingData;
auto ring_to_json(const LieRingData &data) -> nlohmann::ordered_json;

struct LoadedRing {
  LieRingData data;
  /// "sha256:<hex>" of the file bytes.
  std::string digest;
};

/// Reads, schema-checks and Jacobi-validates (ValidationError with the
/// witness triple on failure).
auto load_ring(const std::string &path) -> LoadedRing;
auto load_ring_text(std::string_view text) -> LoadedRing;

auto sha256_hex(std::string_view bytes) -> std::string;

} // namespace lazard
