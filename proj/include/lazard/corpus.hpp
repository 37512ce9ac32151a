#pragma once

// Bundled example rings. corpus/*.json in the source tree holds the same
// rings in the ingestion format.

#include "lazard/liering.hpp"

#include <string>

namespace lazard {

struct CorpusEntry {
  std::string name;
  std::string description;
  LieRingData data;
  /// Documented bracket valuation s and uniformity verdict.
  Valuation expectedS;
  bool expectedUniform;
};

auto corpus() -> std::vector<CorpusEntry>;
auto corpus_entry(const std::string &name) -> CorpusEntry;

/// Integral sl_2 in the basis (e, f, h): [e,f] = h, [e,h] = -2e, [f,h] = 2f.
auto integral_sl2(u64 p) -> LieRingData;
/// [e1, e2] = e3.
auto heisenberg(u64 p) -> LieRingData;
auto abelian(u64 p, std::size_t d) -> LieRingData;

/// Rank reserved for a user-supplied ring of the headline construction; no
/// structure constants ship with the toolkit.
inline constexpr std::size_t kExternalSlotRank = 41;

} // namespace lazard
