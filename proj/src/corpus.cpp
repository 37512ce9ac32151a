#include "lazard/corpus.hpp"

#include "lazard/errors.hpp"

namespace lazard {

auto integral_sl2(u64 p) -> LieRingData {
  LieRingData r("sl2", p, 3);
  r.set_bracket(0, 1, std::vector<long>{0, 0, 1});
  r.set_bracket(0, 2, std::vector<long>{-2, 0, 0});
  r.set_bracket(1, 2, std::vector<long>{0, 2, 0});
  return r;
}

auto heisenberg(u64 p) -> LieRingData {
  LieRingData r("heisenberg", p, 3);
  r.set_bracket(0, 1, std::vector<long>{0, 0, 1});
  return r;
}

auto abelian(u64 p, std::size_t d) -> LieRingData { return LieRingData("abelian", p, d); }

namespace {

auto named(LieRingData r, const std::string &name) -> LieRingData {
  r.set_label(name);
  return r;
}

} // namespace

auto corpus() -> std::vector<CorpusEntry> {
  std::vector<CorpusEntry> out;
  for (u64 p : {3u, 5u}) {
    const std::string ps = std::to_string(p);
    out.push_back({"abelian-d2-p" + ps, "abelian rank 2; U_m = (Z/p^m)^2",
                   named(abelian(p, 2), "abelian-d2-p" + ps), std::nullopt, true});
  }
  out.push_back({"heisenberg-p3", "integral Heisenberg, unscaled; not uniform (s = 0)",
                 named(heisenberg(3), "heisenberg-p3"), 0u, false});
  for (u64 p : {3u, 5u}) {
    const std::string ps = std::to_string(p);
    out.push_back({"heisenberg-scaled-p" + ps, "Heisenberg scaled by p; uniform with s = 1",
                   named(scale(heisenberg(p), 1), "heisenberg-scaled-p" + ps), 1u, true});
  }
  for (u64 p : {3u, 5u})
    for (unsigned s : {1u, 2u}) {
      const std::string name = "sl2-p" + std::to_string(p) + "-s" + std::to_string(s);
      out.push_back({name, "integral sl2 scaled by p^" + std::to_string(s) + "; uniform",
                     named(scale(integral_sl2(p), s), name), s, true});
    }
  return out;
}

auto corpus_entry(const std::string &name) -> CorpusEntry {
  for (auto &e : corpus())
    if (e.name == name)
      return e;
  throw PreconditionViolation("no corpus ring named " + name);
}

} // namespace lazard
