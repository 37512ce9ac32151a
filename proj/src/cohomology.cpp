#include "lazard/cohomology.hpp"

#include "lazard/errors.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace lazard {

GAction::GAction(std::shared_ptr<const LazardGroup> group, Modulus moduleModulus, std::size_t dim,
                 ActionFn fn, std::vector<Vec> generators)
    : group_(std::move(group)), mod_(moduleModulus), dim_(dim), fn_(std::move(fn)),
      gens_(std::move(generators)) {
  if (gens_.empty())
    throw PreconditionViolation("an action needs at least one generator");
  for (const auto &g : gens_) {
    group_->check(g);
    auto m = fn_(g);
    if (m.rows() != dim_ || m.cols() != dim_ || !(m.modulus() == mod_))
      throw PreconditionViolation("action matrix has the wrong shape or modulus");
    Modulus modp(mod_.prime(), 1);
    std::vector<Vec> rows;
    for (std::size_t r = 0; r < dim_; ++r)
      rows.push_back(vec_reduce(modp, m.row(r)));
    if (howell_form(modp, dim_, rows).rank() != dim_)
      throw PreconditionViolation("generator acts by a non-invertible matrix");
    genActions_.push_back(std::move(m));
  }
}

auto GAction::from_section(std::shared_ptr<const LazardGroup> group, unsigned i, unsigned j)
    -> GAction {
  if (!(i < j && j <= 2 * i + 1 && j <= group->precision()))
    throw PreconditionViolation("section window outside i < j <= min(2i+1, m)");
  auto gens = group->generators();
  const auto *gp = group.get();
  Modulus target(group->prime(), j - i);
  return GAction(
      group, target, group->rank(),
      [gp, i, j](std::span<const u64> h) { return section_action(*gp, i, j, h); },
      std::move(gens));
}

auto GAction::trivial(std::shared_ptr<const LazardGroup> group, const Modulus &moduleModulus,
                      std::size_t dim) -> GAction {
  auto gens = group->generators();
  return GAction(
      group, moduleModulus, dim,
      [moduleModulus, dim](std::span<const u64>) {
        return ResidueMatrix::identity(moduleModulus, dim);
      },
      std::move(gens));
}

auto GAction::with_generators(std::vector<Vec> generators) const -> GAction {
  return GAction(group_, mod_, dim_, fn_, std::move(generators));
}

namespace {

auto mat_from(const Modulus &mod, std::size_t rows, std::size_t cols, const u64 *data)
    -> ResidueMatrix {
  ResidueMatrix m(mod, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m.set(r, c, data[r * cols + c]);
  return m;
}

// out = a (n x k) * b (k x w), flat row-major
void mat_mul(const Modulus &mod, const u64 *a, const u64 *b, std::size_t n, std::size_t k,
             std::size_t w, u64 *out) {
  std::fill(out, out + n * w, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      u64 x = a[i * k + l];
      if (x == 0)
        continue;
      for (std::size_t j = 0; j < w; ++j)
        out[i * w + j] = mod.fma(out[i * w + j], x, b[l * w + j]);
    }
}

} // namespace

Closure::Closure(const GAction &action, u64 budget)
    : dim_(action.dim()), width_(action.generators().size() * action.dim()),
      mod_(action.module_modulus()), constraints_(zero_span(action.module_modulus(), width_)) {
  const auto &g = action.group();
  if (!g.enumerable(budget))
    throw BudgetExceeded("group of order p^" + std::to_string(g.order_exponent()) +
                         " exceeds the closure budget of " + std::to_string(budget) +
                         " elements");
  const u64 n = g.element_count();
  const std::size_t r = action.generators().size();
  const std::size_t dd = dim_ * dim_, dw = dim_ * width_;
  constexpr u64 unseen = std::numeric_limits<u64>::max();
  position_.assign(n, unseen);
  rho_.assign(n * dd, 0);
  tmap_.assign(n * dw, 0);

  // generator block selectors E_s are implicit: (rho(x) E_s) puts rho(x) in block s
  const u64 root = g.index_of(g.identity());
  position_[root] = 0;
  order_.push_back(root);
  for (std::size_t i = 0; i < dim_; ++i)
    rho_[i * dim_ + i] = mod_.reduce(1);

  std::vector<Vec> pending;
  auto flush = [&] {
    if (pending.empty())
      return;
    std::vector<Vec> rows;
    for (std::size_t b = 0; b < constraints_.basis().rows(); ++b)
      rows.push_back(constraints_.basis().row_vec(b));
    rows.insert(rows.end(), pending.begin(), pending.end());
    constraints_ = howell_form(mod_, width_, rows);
    pending.clear();
  };

  std::vector<u64> rhoNext(dd), tNext(dw);
  Vec prod(g.rank());
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const u64 xi = order_[head];
    const u64 xpos = head;
    const Vec x = g.element(xi);
    for (std::size_t s = 0; s < r; ++s) {
      g.mul_into(x, action.generators()[s], prod);
      const u64 yi = g.index_of(prod);
      const auto &gs = action.generator_action(s);
      // rho(x s) = rho(x) rho(s)
      std::vector<u64> gsFlat(dd);
      for (std::size_t a = 0; a < dim_; ++a)
        for (std::size_t b = 0; b < dim_; ++b)
          gsFlat[a * dim_ + b] = gs.at(a, b);
      mat_mul(mod_, &rho_[xpos * dd], gsFlat.data(), dim_, dim_, dim_, rhoNext.data());
      // T_{xs} = T_x + rho(x) E_s
      std::copy(&tmap_[xpos * dw], &tmap_[xpos * dw] + dw, tNext.begin());
      for (std::size_t a = 0; a < dim_; ++a)
        for (std::size_t b = 0; b < dim_; ++b) {
          u64 &t = tNext[a * width_ + s * dim_ + b];
          t = mod_.add(t, rho_[xpos * dd + a * dim_ + b]);
        }
      if (position_[yi] == unseen) {
        const u64 ypos = order_.size();
        position_[yi] = ypos;
        order_.push_back(yi);
        std::copy(rhoNext.begin(), rhoNext.end(), &rho_[ypos * dd]);
        std::copy(tNext.begin(), tNext.end(), &tmap_[ypos * dw]);
        continue;
      }
      const u64 ypos = position_[yi];
      if (!std::equal(rhoNext.begin(), rhoNext.end(), &rho_[ypos * dd]))
        throw PreconditionViolation("action is not compatible with the group relations");
      for (std::size_t a = 0; a < dim_; ++a) {
        Vec row(width_);
        for (std::size_t c = 0; c < width_; ++c)
          row[c] = mod_.sub(tNext[a * width_ + c], tmap_[ypos * dw + a * width_ + c]);
        if (vec_is_zero(row))
          continue;
        if (!constraints_.contains(row))
          pending.push_back(std::move(row));
      }
      if (pending.size() >= 4 * width_ + 4)
        flush();
    }
  }
  flush();
  if (order_.size() != n)
    throw PreconditionViolation("generators do not generate the group");
}

auto Closure::action_at(u64 groupIndex) const -> ResidueMatrix {
  return mat_from(mod_, dim_, dim_, &rho_[position_[groupIndex] * dim_ * dim_]);
}

auto Closure::value_map_at(u64 groupIndex) const -> ResidueMatrix {
  return mat_from(mod_, dim_, width_, &tmap_[position_[groupIndex] * dim_ * width_]);
}

auto z1_space(const GAction &action, u64 budget) -> CocycleSpace {
  auto closure = std::make_shared<const Closure>(action, budget);
  const auto &mod = action.module_modulus();
  const std::size_t w = closure->width(), dim = action.dim(), r = action.generators().size();
  // z with F z = 0 for every constraint row F: left kernel of F^T
  const auto &f = closure->constraints().basis();
  auto z1 = f.rows() == 0 ? full_span(mod, w) : kernel_of(f.transpose());
  std::vector<Vec> brows;
  for (std::size_t l = 0; l < dim; ++l) {
    Vec row(w, 0);
    for (std::size_t s = 0; s < r; ++s) {
      const auto &a = action.generator_action(s);
      for (std::size_t t = 0; t < dim; ++t)
        row[s * dim + t] = mod.sub(a.at(t, l), t == l ? 1 : 0);
    }
    brows.push_back(std::move(row));
  }
  auto b1 = howell_form(mod, w, brows);
  CocycleSpace sp{z1, b1, 0, 0, 0, 0, closure->size(), std::make_shared<const GAction>(action),
                  closure};
  sp.z1Exp = z1.order_exponent();
  sp.b1Exp = b1.order_exponent();
  sp.h1Exp = quotient_order(z1, b1);
  sp.h1AnnihilatorExp = z1.annihilator_exponent(b1);
  return sp;
}

auto close_cocycle(const CocycleSpace &space, std::span<const u64> generatorValues) -> Cocycle {
  const auto &cl = *space.closure;
  if (generatorValues.size() != cl.width())
    throw PreconditionViolation("generator-value tuple has the wrong length");
  Cocycle c{Vec(generatorValues.begin(), generatorValues.end()), {}};
  const u64 n = space.action->group().element_count();
  c.table.resize(n);
  for (u64 gi = 0; gi < n; ++gi)
    c.table[gi] = cl.value_map_at(gi).apply(generatorValues);
  return c;
}

auto coboundary(const CocycleSpace &space, std::span<const u64> v) -> Cocycle {
  const auto &act = *space.action;
  const auto &mod = act.module_modulus();
  Vec gens;
  for (std::size_t s = 0; s < act.generators().size(); ++s) {
    auto val = vec_sub(mod, act.generator_action(s).apply(v), v);
    gens.insert(gens.end(), val.begin(), val.end());
  }
  return close_cocycle(space, gens);
}

auto is_cocycle(const CocycleSpace &space, const Cocycle &c) -> bool {
  const auto &act = *space.action;
  const auto &g = act.group();
  const auto &mod = act.module_modulus();
  const u64 n = g.element_count();
  if (c.table.size() != n)
    throw PreconditionViolation("cocycle table is not materialized");
  if (n * n <= (u64{1} << 20)) {
    for (u64 u = 0; u < n; ++u) {
      auto rho = space.closure->action_at(u);
      Vec x = g.element(u);
      for (u64 v = 0; v < n; ++v) {
        u64 uv = g.index_of(g.mul(x, g.element(v)));
        if (c.table[uv] != vec_add(mod, c.table[u], rho.apply(c.table[v])))
          return false;
      }
    }
    return true;
  }
  for (u64 u = 0; u < n; ++u) {
    auto rho = space.closure->action_at(u);
    Vec x = g.element(u);
    for (const auto &s : act.generators()) {
      u64 us = g.index_of(g.mul(x, s));
      if (c.table[us] != vec_add(mod, c.table[u], rho.apply(c.table[g.index_of(s)])))
        return false;
    }
  }
  return true;
}

auto cocycle_split(const CocycleSpace &space, const Cocycle &c, const HowellForm &b)
    -> std::optional<Split> {
  const auto &act = *space.action;
  const auto &mod = act.module_modulus();
  const std::size_t dim = act.dim(), r = act.generators().size(), w = dim * r;
  if (!(b.modulus() == mod) || b.width() != dim)
    throw ModulusMismatch("submodule B lives in a different module");
  if (!space.z1.contains(c.generatorValues))
    throw PreconditionViolation("cocycle_split needs a cocycle");
  for (std::size_t s = 0; s < r; ++s)
    for (std::size_t row = 0; row < b.basis().rows(); ++row)
      if (!b.contains(act.generator_action(s).apply(b.basis().row(row))))
        throw PreconditionViolation("B is not invariant under the action");

  // unknowns: v (dim), then one coefficient per (generator, B-basis row)
  const std::size_t nb = b.basis().rows();
  ResidueMatrix m(mod, dim + r * nb, w);
  for (std::size_t l = 0; l < dim; ++l)
    for (std::size_t s = 0; s < r; ++s) {
      const auto &a = act.generator_action(s);
      for (std::size_t t = 0; t < dim; ++t)
        m.set(l, s * dim + t, mod.sub(a.at(t, l), t == l ? 1 : 0));
    }
  for (std::size_t s = 0; s < r; ++s)
    for (std::size_t row = 0; row < nb; ++row)
      for (std::size_t t = 0; t < dim; ++t)
        m.set(dim + s * nb + row, s * dim + t, b.basis().at(row, t));
  auto sol = solve_linear(m, c.generatorValues);
  if (!sol)
    return std::nullopt;
  Vec v(sol->particular.begin(), sol->particular.begin() + static_cast<long>(dim));
  auto dv = coboundary(space, v);
  Vec cp = vec_sub(mod, c.generatorValues, dv.generatorValues);
  Split out{close_cocycle(space, cp), v};
  // c' must be B-valued everywhere and c = c' + dv on every element
  for (u64 gi = 0; gi < out.cprime.table.size(); ++gi) {
    if (!b.contains(out.cprime.table[gi]))
      throw Error("cocycle_split: closed c' leaves B");
    if (!c.table.empty() && c.table[gi] != vec_add(mod, out.cprime.table[gi], dv.table[gi]))
      throw Error("cocycle_split: decomposition identity fails");
  }
  return out;
}

auto deviation_level(const LazardGroup &g, const Endomorphism &phi) -> unsigned {
  unsigned level = g.precision();
  const u64 n = g.element_count();
  for (u64 i = 0; i < n && level > 0; ++i) {
    Vec u = g.element(i);
    Vec dev = g.mul(apply(g, phi, u), g.inv(u));
    level = std::min(level, vec_valuation(g.modulus(), dev));
  }
  return level;
}

auto correct_automorphism(std::shared_ptr<const LazardGroup> group, const Endomorphism &phi,
                          unsigned k, const CorrectionOptions &opts) -> CorrectionResult {
  const auto &g = *group;
  const unsigned m = g.precision();
  if (k + 1 > m)
    throw PreconditionViolation("correction step needs k <= m - 1");
  const unsigned level = m - 1 - k;
  if (m > 2 * level + 1)
    throw PreconditionViolation("section (" + std::to_string(level) + "," + std::to_string(m) +
                                ") is outside the abelian window");
  if (!g.enumerable(opts.closureBudget))
    throw BudgetExceeded("group too large for an exhaustive correction step");
  if (!is_automorphism(g, phi))
    throw PreconditionViolation("correct_automorphism needs an automorphism");

  CorrectionResult res;
  res.level = level;
  const auto &mod = g.modulus();
  const std::size_t d = g.rank();
  const u64 n = g.element_count();

  // deviation cocycle on every element, as section coordinates
  Vec gensValues;
  std::vector<Vec> table(n);
  for (u64 i = 0; i < n; ++i) {
    Vec u = g.element(i);
    Vec dev = g.mul(apply(g, phi, u), g.inv(u));
    if (vec_valuation(mod, dev) < level)
      throw PreconditionViolation("deviation does not lie in U^{p^" + std::to_string(level) +
                                  "}");
    table[i] = section_rescale(g, level, m, dev);
  }
  for (const auto &s : g.generators()) {
    const auto &v = table[g.index_of(s)];
    gensValues.insert(gensValues.end(), v.begin(), v.end());
  }

  auto action = GAction::from_section(group, level, m);
  auto space = z1_space(action, opts.closureBudget);
  res.h1Exp = space.h1Exp;
  res.h1AnnihilatorExp = space.h1AnnihilatorExp;
  res.annihilated = space.h1AnnihilatorExp <= k;
  Cocycle c{gensValues, table};
  if (!is_cocycle(space, c))
    throw Error("deviation of an automorphism failed the cocycle law");

  const auto &amod = action.module_modulus();
  std::vector<Vec> brows;
  for (std::size_t l = 0; l < d; ++l) {
    Vec e(d, 0);
    e[l] = amod.p_power(1);
    brows.push_back(std::move(e));
  }
  auto b = howell_form(amod, d, brows);

  // Candidate inner witnesses h_l = p^j e_l with [h_l, U] inside U^{p^level}.
  const auto &s = g.ring().bracket_valuation();
  const unsigned j = s && level >= *s ? level - *s : 0;
  std::vector<Vec> deltas; // generator-value tuples of inn_{h_l} deviations
  for (std::size_t l = 0; l < d; ++l) {
    Vec h = g.pc_generator(j, l);
    Vec tuple;
    bool inside = true;
    for (const auto &sg : g.generators()) {
      Vec dev = g.mul(g.conjugate(h, sg), g.inv(sg));
      if (vec_valuation(mod, dev) < level) {
        inside = false;
        break;
      }
      auto v = section_rescale(g, level, m, dev);
      tuple.insert(tuple.end(), v.begin(), v.end());
    }
    if (!inside)
      tuple.assign(d * g.generators().size(), 0);
    deltas.push_back(std::move(tuple));
  }

  // c = sum_l w_l delta_l + dv (mod B), generator by generator
  const std::size_t r = g.generators().size(), w = r * d, nb = b.basis().rows();
  ResidueMatrix sys(amod, d + d + r * nb, w);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t c2 = 0; c2 < w; ++c2)
      sys.set(l, c2, deltas[l][c2]);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t sgi = 0; sgi < r; ++sgi) {
      const auto &a = action.generator_action(sgi);
      for (std::size_t t = 0; t < d; ++t)
        sys.set(d + l, sgi * d + t, amod.sub(a.at(t, l), t == l ? 1 : 0));
    }
  for (std::size_t sgi = 0; sgi < r; ++sgi)
    for (std::size_t row = 0; row < nb; ++row)
      for (std::size_t t = 0; t < d; ++t)
        sys.set(2 * d + sgi * nb + row, sgi * d + t, b.basis().at(row, t));
  auto sol = solve_linear(sys, gensValues);
  if (!sol) {
    res.note = "deviation class is not inner modulo the deeper section; measured H^1 exponent " +
               std::to_string(space.h1Exp) + ", annihilator exponent " +
               std::to_string(space.h1AnnihilatorExp);
    return res;
  }

  // g = prod_l h_l^{w_l} * (p^level * (-v))
  Vec wit = g.identity();
  for (std::size_t l = 0; l < d; ++l)
    if (sol->particular[l] != 0)
      wit = g.mul(wit, g.power(g.pc_generator(j, l), static_cast<long>(sol->particular[l])));
  Vec v(sol->particular.begin() + static_cast<long>(d),
        sol->particular.begin() + static_cast<long>(2 * d));
  Vec negv(d);
  for (std::size_t t = 0; t < d; ++t)
    negv[t] = amod.neg(v[t]);
  wit = g.mul(wit, section_embed(g, level, negv));

  Endomorphism corrected;
  Vec winv = g.inv(wit);
  for (const auto &img : phi.images)
    corrected.images.push_back(g.conjugate(winv, img));

  // phi = inn_g o phi' on generators; phi' automorphism; deviation one level deeper
  for (std::size_t t = 0; t < d; ++t)
    if (g.conjugate(wit, corrected.images[t]) != phi.images[t])
      throw Error("correction: composition identity fails on a generator");
  if (!is_automorphism(g, corrected))
    throw Error("correction: corrected map is not an automorphism");
  for (u64 i = 0; i < n; ++i) {
    Vec u = g.element(i);
    Vec dev = g.mul(apply(g, corrected, u), g.inv(u));
    ++res.elementsVerified;
    if (vec_valuation(mod, dev) < level + 1) {
      res.note = "linear solution did not lift to a deeper deviation";
      return res;
    }
  }
  res.success = true;
  res.g = wit;
  res.corrected = std::move(corrected);
  return res;
}

} // namespace lazard
