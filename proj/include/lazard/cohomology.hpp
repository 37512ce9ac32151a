#pragma once

// Degree-1 cohomology of the finite quotients U_m.
//
// Dictionary: the group is written multiplicatively, modules additively. A
// deviation u -> phi(u) u^-1 landing in U^{p^i} / U^{p^j} is read through the
// section rescaling as a module-valued map; conjugation becomes the left
// action g.a, and the cocycle law reads c(uv) = c(u) + u.c(v).
//
// Cocycles are parameterized by their values on the generators (a vector of
// length r * dim, generator-major) and closed over a BFS spanning tree of the
// Cayley graph; non-tree edges contribute the linear consistency conditions.

#include "lazard/group.hpp"
#include "lazard/howell.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace lazard {

class GAction {
public:
  using ActionFn = std::function<ResidueMatrix(std::span<const u64>)>;

  GAction(std::shared_ptr<const LazardGroup> group, Modulus moduleModulus, std::size_t dim,
          ActionFn fn, std::vector<Vec> generators);

  /// Conjugation on the section U^{p^i} / U^{p^j}.
  static auto from_section(std::shared_ptr<const LazardGroup> group, unsigned i, unsigned j)
      -> GAction;
  static auto trivial(std::shared_ptr<const LazardGroup> group, const Modulus &moduleModulus,
                      std::size_t dim) -> GAction;
  /// Same action, different generating set of the group.
  auto with_generators(std::vector<Vec> generators) const -> GAction;

  auto group() const -> const LazardGroup & { return *group_; }
  auto group_ptr() const -> const std::shared_ptr<const LazardGroup> & { return group_; }
  auto generators() const -> const std::vector<Vec> & { return gens_; }
  auto module_modulus() const -> const Modulus & { return mod_; }
  auto dim() const -> std::size_t { return dim_; }
  auto generator_action(std::size_t i) const -> const ResidueMatrix & { return genActions_[i]; }
  auto action_of(std::span<const u64> g) const -> ResidueMatrix { return fn_(g); }

private:
  std::shared_ptr<const LazardGroup> group_;
  Modulus mod_;
  std::size_t dim_;
  ActionFn fn_;
  std::vector<Vec> gens_;
  std::vector<ResidueMatrix> genActions_;
};

inline constexpr u64 kDefaultClosureBudget = u64{1} << 16;

/// Spanning-tree closure of the Cayley graph with the action and the
/// generator-value-to-cocycle maps T_x (c(x) = T_x z) at every element.
class Closure {
public:
  Closure(const GAction &action, u64 budget = kDefaultClosureBudget);

  auto size() const -> u64 { return order_.size(); }
  /// Group element indices in BFS order.
  auto order() const -> const std::vector<u64> & { return order_; }
  auto action_at(u64 groupIndex) const -> ResidueMatrix;
  auto value_map_at(u64 groupIndex) const -> ResidueMatrix;
  /// Functionals (rows) whose common kernel is Z^1, in Howell form.
  auto constraints() const -> const HowellForm & { return constraints_; }
  auto width() const -> std::size_t { return width_; }

private:
  std::size_t dim_, width_;
  Modulus mod_;
  std::vector<u64> order_;
  std::vector<u64> position_; // group index -> BFS position
  std::vector<u64> rho_;      // dim*dim per position
  std::vector<u64> tmap_;     // dim*width per position
  HowellForm constraints_;
};

struct Cocycle {
  /// Values on the generators, generator-major.
  Vec generatorValues;
  /// Value on every group element, by group index (empty when not closed).
  std::vector<Vec> table;
};

struct CocycleSpace {
  HowellForm z1;
  HowellForm b1;
  unsigned z1Exp;
  unsigned b1Exp;
  unsigned h1Exp;
  /// Smallest e with p^e Z^1 inside B^1.
  unsigned h1AnnihilatorExp;
  u64 elementsClosed;
  std::shared_ptr<const GAction> action;
  std::shared_ptr<const Closure> closure;
};

auto z1_space(const GAction &action, u64 budget = kDefaultClosureBudget) -> CocycleSpace;
/// Table of a generator-value tuple through the closure.
auto close_cocycle(const CocycleSpace &space, std::span<const u64> generatorValues) -> Cocycle;
/// (dv)(g) = g.v - v, closed over the whole group.
auto coboundary(const CocycleSpace &space, std::span<const u64> v) -> Cocycle;
/// c(uv) == c(u) + u.c(v) on every table pair (every Cayley edge when the
/// table is too large for all pairs).
auto is_cocycle(const CocycleSpace &space, const Cocycle &c) -> bool;

struct Split {
  Cocycle cprime;
  Vec v;
};

/// c = c' + dv with c' valued in B. Canonical solution of the linear system;
/// absence when none exists.
auto cocycle_split(const CocycleSpace &space, const Cocycle &c, const HowellForm &b)
    -> std::optional<Split>;

struct CorrectionOptions {
  u64 closureBudget = kDefaultClosureBudget;
};

struct CorrectionResult {
  bool success = false;
  /// Inner witness g and phi' = inn_g^-1 o phi.
  std::optional<Vec> g;
  std::optional<Endomorphism> corrected;
  /// Level of the input deviation (m - 1 - k) and of the output deviation.
  unsigned level = 0;
  unsigned h1Exp = 0;
  unsigned h1AnnihilatorExp = 0;
  /// Whether p^k annihilates H^1 of the section module.
  bool annihilated = false;
  u64 elementsVerified = 0;
  std::string note;
};

/// One correction step: phi trivial modulo U^{p^{m-1-k}} becomes, after
/// composing with an inner automorphism, trivial modulo U^{p^{m-k}}.
auto correct_automorphism(std::shared_ptr<const LazardGroup> group, const Endomorphism &phi,
                          unsigned k, const CorrectionOptions &opts = {}) -> CorrectionResult;

/// Smallest l with phi(u) u^-1 in U^{p^l} for every element (m when phi is
/// the identity). Exhaustive over the group.
auto deviation_level(const LazardGroup &g, const Endomorphism &phi) -> unsigned;

} // namespace lazard
