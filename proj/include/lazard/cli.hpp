#pragma once

// Command layer behind the `lazard` binary. Every command yields a JSON
// report; numeric claims carry a method tag (exact | sampled | empirical |
// refused). Exit codes: 0 completed, 1 invalid input, 2 budget refusal.

#include "lazard/autbound.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace lazard {

inline constexpr const char *kToolVersion = "0.1.0";
inline constexpr const char *kBudgetEnvVar = "LAZARD_BUDGET";

struct RunConfig {
  std::string command;
  std::string ringPath;
  std::optional<u64> prime;
  std::optional<unsigned> precision;
  /// bch only; absent means infinite (abelian).
  std::optional<unsigned> svaluation;
  std::optional<unsigned> degree;
  std::optional<unsigned> windowI, windowJ;
  std::optional<unsigned> k;
  unsigned imax = 4;
  /// auto: exhaustive when |G| fits the element budget, else sampled.
  std::string verify = "auto";
  /// Element-count budget; commands fall back to their own defaults.
  std::optional<u64> elementBudget;
  u64 nodeBudget = u64{1} << 30;
  double seconds = 0;
  u64 samples = 100000;
  std::string format = "json";
  u64 seed = 1;
  std::optional<std::size_t> symbolicD, symbolicZ;
};

struct RunOutcome {
  int exitCode;
  nlohmann::ordered_json report;
};

/// Element budget from LAZARD_BUDGET, when set to a positive integer.
auto budget_from_env() -> std::optional<u64>;

auto run(const RunConfig &config) -> RunOutcome;

/// Stable serialization (two-space indent, trailing newline).
auto render_json(const nlohmann::ordered_json &report) -> std::string;
/// Indented key: value listing of the same report.
auto render_text(const nlohmann::ordered_json &report) -> std::string;

} // namespace lazard
