#include "lazard/cli.hpp"

#include "lazard/bch.hpp"
#include "lazard/cohomology.hpp"
#include "lazard/errors.hpp"
#include "lazard/kernels.hpp"
#include "lazard/ringio.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

namespace lazard {

using ojson = nlohmann::ordered_json;

namespace {

auto num(const mpz_class &v) -> ojson {
  if (v.fits_slong_p())
    return v.get_si();
  return v.get_str();
}

auto claim(ojson value, const char *method) -> ojson {
  ojson c;
  c["value"] = std::move(value);
  c["method"] = method;
  return c;
}

auto rational(const mpq_class &q) -> std::string {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

auto opt_json(const std::optional<unsigned> &v) -> ojson {
  return v ? ojson(*v) : ojson(nullptr);
}

struct Context {
  explicit Context(const RunConfig &c) : cfg(c) {}

  const RunConfig &cfg;
  ojson results = ojson::object();
  std::vector<std::string> caveats;
  std::vector<std::string> notes;
  std::string digest;

  void caveat(const std::string &c) {
    if (std::find(caveats.begin(), caveats.end(), c) == caveats.end())
      caveats.push_back(c);
  }
};

auto need_precision(const RunConfig &cfg) -> unsigned {
  if (!cfg.precision || *cfg.precision < 1)
    throw PreconditionViolation("--precision must be a positive integer");
  return *cfg.precision;
}

auto load(Context &ctx) -> LieRingData {
  if (ctx.cfg.ringPath.empty())
    throw PreconditionViolation("command needs a ring file");
  auto loaded = load_ring(ctx.cfg.ringPath);
  ctx.digest = loaded.digest;
  if (ctx.cfg.prime) {
    LieRingData moved(loaded.data.label(), *ctx.cfg.prime, loaded.data.rank());
    for (std::size_t i = 0; i < moved.rank(); ++i)
      for (std::size_t j = i + 1; j < moved.rank(); ++j)
        moved.set_bracket(i, j, loaded.data.stored(i, j));
    return moved;
  }
  return loaded.data;
}

auto require_uniform(const LieRingData &data) -> UniformityReport {
  auto u = uniformity(data);
  if (!u.uniform)
    throw PreconditionViolation("ring is not uniform at p = " + std::to_string(data.prime()) +
                                " (s = " + valuation_str(u.s) + ")");
  return u;
}

auto certificate_json(const TruncationCertificate &c) -> ojson {
  ojson j;
  j["p"] = c.p;
  j["k"] = c.k;
  j["s"] = valuation_str(c.s);
  j["degree"] = c.degree;
  j["scanWindow"] = c.scanWindow;
  auto margins = ojson::array();
  for (const auto &m : c.margins) {
    ojson e;
    e["degree"] = m.degree;
    e["coefficientValuation"] = m.coefficientValuation;
    e["margin"] = m.margin;
    e["source"] = m.source;
    margins.push_back(std::move(e));
  }
  j["margins"] = std::move(margins);
  return j;
}

auto derivation_json(const DerivationModule &der) -> ojson {
  ojson j;
  j["derOrderExp"] = claim(der.derOrderExp, "exact");
  j["innOrderExp"] = claim(der.innOrderExp, "exact");
  j["h1OrderExp"] = claim(der.h1OrderExp, "exact");
  j["h1AnnihilatorExp"] = claim(der.h1AnnihilatorExp, "exact");
  return j;
}

auto center_rank_json(const CenterRankEstimate &z) -> ojson {
  ojson j;
  j["value"] = z.z;
  j["method"] = "empirical";
  j["window"] = {z.fromPrecision, z.toPrecision};
  j["perPrecision"] = z.perPrecision;
  j["stable"] = z.stable;
  return j;
}

auto stabilization_json(const StabilizationResult &s) -> ojson {
  ojson j;
  j["k"] = claim(s.k, "empirical");
  j["testedRange"] = {s.iMin, s.iMax};
  auto levels = ojson::array();
  for (const auto &l : s.levels) {
    ojson e;
    e["i"] = l.i;
    e["h1Exp"] = l.h1Exp;
    e["annihilatorExp"] = l.annihilatorExp;
    e["method"] = l.method;
    levels.push_back(std::move(e));
  }
  j["levels"] = std::move(levels);
  j["stabilizes"] = s.stabilizes;
  return j;
}

auto bound_json(const BoundReport &r, bool kEmpirical) -> ojson {
  ojson j;
  j["p"] = r.p;
  j["d"] = r.d;
  j["z"] = center_rank_json(r.z);
  j["k"] = claim(r.k, kEmpirical ? "empirical" : "exact");
  j["kSource"] = kEmpirical ? "stabilization" : "user";
  j["autUkOrder"] = r.autUkOrder ? claim(num(*r.autUkOrder), "exact")
                                 : claim(nullptr, "refused");
  j["autUkMethod"] = r.autUkMethod;
  j["kernelBoundExp"] = claim(r.kernelBoundExp, "exact");
  if (r.dCofactor) {
    j["D"] = {{"cofactor", num(*r.dCofactor)}, {"pExponent", *r.dExp}};
  } else {
    j["D"] = {{"form", "|Aut(U_k)| * p^" + std::to_string(r.kernelBoundExp)},
              {"status", "conditional"}};
  }
  auto levels = ojson::array();
  for (const auto &l : r.perLevel) {
    ojson e;
    e["i"] = l.i;
    e["groupExp"] = l.groupExp;
    e["innExpBound"] = l.innExpBound;
    e["validity"] = l.validity;
    e["autBoundExp"] = opt_json(l.autBoundExp);
    e["autBound"] = l.autBound ? num(*l.autBound) : ojson(nullptr);
    levels.push_back(std::move(e));
  }
  j["perLevel"] = std::move(levels);
  j["ratioExponent"] = rational(r.ratioExponent);
  j["stabilization"] = stabilization_json(r.stabilization);
  j["hypothesisHolds"] = r.hypothesisHolds;
  j["conclusion"] = r.conclusion;
  j["refusals"] = r.refusals;
  return j;
}

auto aut_options(const RunConfig &cfg, u64 defaultBudget) -> AutSearchOptions {
  AutSearchOptions o;
  o.budget = cfg.elementBudget.value_or(defaultBudget);
  o.nodeBudget = cfg.nodeBudget;
  o.timeLimitSeconds = cfg.seconds;
  return o;
}

// Without stabilization there is no meaningful k; level 1 keeps |Aut(U_k)|
// cheap and the report still carries the refusal.
auto default_k(const StabilizationResult &s) -> unsigned {
  return s.stabilizes ? std::max(1u, s.k) : 1u;
}


void cmd_check(Context &ctx) {
  auto data = load(ctx);
  auto v = validate(data);
  auto u = uniformity(data);
  auto &r = ctx.results;
  r["label"] = data.label();
  r["prime"] = data.prime();
  r["rank"] = data.rank();
  r["abelian"] = data.is_abelian();
  r["jacobi"] = {{"valid", v.valid}, {"triplesChecked", claim(v.triplesChecked, "exact")}};
  r["uniformity"] = {{"s", valuation_str(u.s)}, {"uniform", u.uniform}, {"method", "exact"}};
}

void cmd_bch(Context &ctx) {
  const auto &cfg = ctx.cfg;
  if (!cfg.prime)
    throw PreconditionViolation("bch needs --prime");
  const unsigned k = need_precision(cfg);
  Valuation s;
  if (cfg.svaluation)
    s = *cfg.svaluation;
  auto cert = truncation_degree(*cfg.prime, k, s);
  unsigned degree = cfg.degree.value_or(std::max(1u, cert.degree));
  if (degree < 1 || degree > kMaxSeriesDegree)
    throw PreconditionViolation("--degree must lie in [1, " + std::to_string(kMaxSeriesDegree) +
                                "]");
  if (cert.degree > kMaxSeriesDegree)
    ctx.notes.push_back("certified degree exceeds the generated series degree " +
                        std::to_string(kMaxSeriesDegree));
  const auto &series = bch_series(degree);
  auto coeffs = ojson::array();
  for (std::size_t w = 0; w < series.basis().size(); ++w) {
    const auto &c = series.coefficient(w);
    if (c.is_zero())
      continue;
    ojson e;
    e["word"] = series.basis().str(w);
    e["degree"] = series.basis().word(w).degree;
    e["coefficient"] = c.str();
    coeffs.push_back(std::move(e));
  }
  auto counts = ojson::array();
  for (unsigned n = 1; n <= degree; ++n)
    counts.push_back(series.basis().count(n));
  ctx.results["degree"] = degree;
  ctx.results["hallCounts"] = std::move(counts);
  ctx.results["coefficients"] = std::move(coeffs);
  ctx.results["certificate"] = certificate_json(cert);
}

void cmd_der(Context &ctx) {
  auto data = load(ctx);
  const unsigned k = need_precision(ctx.cfg);
  ReducedLieRing ring(data, k);
  auto der = derivations(ring);
  ctx.results["precision"] = k;
  ctx.results["derivations"] = derivation_json(der);
  ctx.results["centerOrderExp"] = claim(center(ring).orderExponent, "exact");
}

void cmd_group(Context &ctx) {
  const auto &cfg = ctx.cfg;
  auto data = load(ctx);
  require_uniform(data);
  const unsigned m = need_precision(cfg);
  LazardGroup g(data, m);
  auto &r = ctx.results;
  r["precision"] = m;
  r["orderExp"] = claim(g.order_exponent(), "exact");
  auto filt = ojson::array();
  for (unsigned j = 0; j <= m; ++j)
    filt.push_back({{"j", j}, {"indexExp", ppower_subgroup(g, j).indexExponent}});
  r["filtration"] = {{"levels", std::move(filt)}, {"method", "exact"}};
  r["truncationDegree"] = g.certificate().degree;

  if (cfg.verify != "auto" && cfg.verify != "exhaustive" && cfg.verify != "sampled")
    throw PreconditionViolation("--verify must be auto, exhaustive or sampled");
  const u64 budget = cfg.elementBudget.value_or(kDefaultAutBudget);
  const bool exhaustive =
      cfg.verify == "exhaustive" || (cfg.verify == "auto" && g.enumerable(budget));
  if (exhaustive) {
    if (!g.enumerable(budget))
      throw BudgetExceeded("exhaustive verification needs |G| <= " + std::to_string(budget) +
                           "; |G| = p^" + std::to_string(g.order_exponent()));
    auto t = kernels::mul_table_omp(g);
    const u64 bad = kernels::associativity_failures_omp(t);
    u64 idBad = 0, invBad = 0;
    for (std::uint32_t a = 0; a < t.order; ++a) {
      idBad += t.mul(a, t.identity) != a || t.mul(t.identity, a) != a;
      invBad += t.mul(a, t.inverse[a]) != t.identity;
    }
    const u64 n = t.order;
    r["associativity"] = {{"holds", bad == 0}, {"triples", n * n * n}, {"method", "exact"}};
    r["identity"] = {{"holds", idBad == 0}, {"elements", n}, {"method", "exact"}};
    r["inverse"] = {{"holds", invBad == 0}, {"elements", n}, {"method", "exact"}};
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<u64> coord(0, g.modulus().value() - 1);
    auto random_element = [&] {
      Vec x(g.rank());
      for (auto &c : x)
        c = coord(rng);
      return x;
    };
    u64 bad = 0, idBad = 0, invBad = 0;
    for (u64 s = 0; s < cfg.samples; ++s) {
      auto a = random_element(), b = random_element(), c = random_element();
      bad += g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c));
      idBad += g.mul(a, g.identity()) != a;
      invBad += g.mul(a, g.inv(a)) != g.identity();
    }
    r["associativity"] = {{"holds", bad == 0}, {"triples", cfg.samples}, {"method", "sampled"}};
    r["identity"] = {{"holds", idBad == 0}, {"elements", cfg.samples}, {"method", "sampled"}};
    r["inverse"] = {{"holds", invBad == 0}, {"elements", cfg.samples}, {"method", "sampled"}};
    ctx.caveat("sampled-verification");
  }
}

void cmd_cohomology(Context &ctx) {
  const auto &cfg = ctx.cfg;
  auto data = load(ctx);
  require_uniform(data);
  const unsigned m = need_precision(cfg);
  if (!cfg.windowI || !cfg.windowJ)
    throw PreconditionViolation("cohomology needs --window I J");
  auto g = std::make_shared<const LazardGroup>(data, m);
  auto action = GAction::from_section(g, *cfg.windowI, *cfg.windowJ);
  auto sp = z1_space(action, cfg.elementBudget.value_or(kDefaultClosureBudget));
  auto &r = ctx.results;
  r["precision"] = m;
  r["window"] = {*cfg.windowI, *cfg.windowJ};
  r["z1exp"] = claim(sp.z1Exp, "exact");
  r["b1exp"] = claim(sp.b1Exp, "exact");
  r["h1exp"] = claim(sp.h1Exp, "exact");
  r["h1AnnihilatorExp"] = claim(sp.h1AnnihilatorExp, "exact");
  r["budgetUsed"] = sp.elementsClosed;
}

void cmd_aut_brute(Context &ctx) {
  const auto &cfg = ctx.cfg;
  auto data = load(ctx);
  require_uniform(data);
  const unsigned m = need_precision(cfg);
  LazardGroup g(data, m);
  auto res = aut_bruteforce(g, aut_options(cfg, kDefaultAutBudget));
  auto &r = ctx.results;
  r["precision"] = m;
  r["orderExp"] = g.order_exponent();
  r["autOrder"] = claim(num(res.order), "exact");
  r["visitedNodes"] = res.visitedNodes;
  r["prunedNodes"] = res.prunedNodes;
  auto found = ojson::array();
  for (const auto &e : res.generatorImages)
    found.push_back(e.images);
  r["sampleAutomorphisms"] = std::move(found);
}

void cmd_bound(Context &ctx) {
  const auto &cfg = ctx.cfg;
  if (cfg.symbolicD) {
    auto sb = symbolic_bound(*cfg.symbolicD, cfg.symbolicZ.value_or(1));
    auto &r = ctx.results;
    r["mode"] = "symbolic";
    r["d"] = sb.d;
    r["z"] = sb.z;
    r["groupExp"] = std::to_string(sb.groupExpPerLevel) + "i";
    r["innExpBound"] = std::to_string(sb.innExpPerLevel) + "i";
    r["kernelBoundExp"] = std::to_string(sb.kernelExpPerK) + "k";
    r["D"] = "|Aut(U_k)| * p^(" + std::to_string(sb.kernelExpPerK) + "k)";
    r["ratioExponent"] = rational(sb.ratioExponent);
    auto levels = ojson::array();
    for (unsigned i = 1; i <= cfg.imax; ++i)
      levels.push_back({{"i", i}, {"groupExp", sb.group_exp(i)}, {"innExpBound", sb.inn_exp(i)}});
    r["perLevel"] = std::move(levels);
    return;
  }
  auto data = load(ctx);
  require_uniform(data);
  BoundOptions bo;
  bo.aut = aut_options(cfg, kDefaultAutBudget);
  bo.stabilization = stabilization_k(data, 1, std::max(3u, bo.stabilizationMax));
  const bool empirical = !cfg.k;
  const unsigned k = cfg.k.value_or(default_k(*bo.stabilization));
  auto br = bound_report(data, k, cfg.imax, bo);
  ctx.results = bound_json(br, empirical);
  ctx.caveat("empirical-k");
  if (!br.autUkOrder)
    ctx.caveat("budget-refusals");
}

void cmd_report(Context &ctx) {
  const auto &cfg = ctx.cfg;
  auto data = load(ctx);
  auto &r = ctx.results;
  auto u = require_uniform(data);
  r["ring"] = {{"label", data.label()}, {"prime", data.prime()}, {"rank", data.rank()},
               {"s", valuation_str(u.s)}, {"abelian", data.is_abelian()}};
  const unsigned m = cfg.precision.value_or(2);
  ReducedLieRing ring(data, m);
  r["derivations"] = derivation_json(derivations(ring));
  r["derivations"]["precision"] = m;

  LazardGroup g(data, m);
  auto inn = inn_order(g);
  r["group"] = {{"precision", m},
                {"orderExp", claim(g.order_exponent(), "exact")},
                {"centerExp", claim(inn.centerExp, "exact")},
                {"innExp", claim(inn.innExp, "exact")},
                {"centerMethod", inn.method}};

  BoundOptions bo;
  bo.aut = aut_options(cfg, kDefaultAutBudget);
  bo.stabilization = stabilization_k(data, 1, std::max(3u, bo.stabilizationMax));
  const unsigned k = cfg.k.value_or(default_k(*bo.stabilization));
  auto br = bound_report(data, k, cfg.imax, bo);
  r["bound"] = bound_json(br, !cfg.k);
  ctx.caveat("empirical-k");
  if (!br.autUkOrder)
    ctx.caveat("budget-refusals");

  ojson aut;
  try {
    auto res = aut_bruteforce(g, bo.aut);
    aut["autOrder"] = claim(num(res.order), "exact");
    auto tr = totient_ratio(g.prime(), g.order_exponent(), res.order, data.rank(), br.z.z);
    aut["totient"] = {{"phi", claim(num(tr.phi), "exact")},
                      {"autOverPhi", claim(rational(tr.autOverPhi), "exact")},
                      {"powerRatio", claim(rational(tr.powerRatio), "exact")},
                      {"powerRatioForm", "|Aut|^d / phi^(d-z)"},
                      {"scaledRatioDecimal", claim(tr.scaledRatio, "exact")}};
    for (const auto &lb : br.perLevel)
      if (lb.i == m && lb.autBound)
        aut["boundDominates"] = *lb.autBound >= res.order;
  } catch (const BudgetExceeded &e) {
    aut["autOrder"] = claim(nullptr, "refused");
    aut["refusal"] = e.what();
    ctx.caveat("budget-refusals");
  }
  r["automorphisms"] = std::move(aut);
}

} // namespace

auto budget_from_env() -> std::optional<u64> {
  const char *v = std::getenv(kBudgetEnvVar);
  if (!v || !*v)
    return std::nullopt;
  char *end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end != '\0' || n == 0)
    return std::nullopt;
  return n;
}

auto run(const RunConfig &cfg) -> RunOutcome {
  Context ctx(cfg);
  ojson report;
  report["toolVersion"] = kToolVersion;
  report["schemaVersion"] = kRingSchemaVersion;
  report["command"] = cfg.command;
  ojson conf;
  conf["ring"] = cfg.ringPath.empty() ? ojson(nullptr) : ojson(cfg.ringPath);
  conf["prime"] = cfg.prime ? ojson(*cfg.prime) : ojson(nullptr);
  conf["precision"] = opt_json(cfg.precision);
  conf["elementBudget"] = cfg.elementBudget ? ojson(*cfg.elementBudget) : ojson(nullptr);
  conf["nodeBudget"] = cfg.nodeBudget;
  conf["seconds"] = cfg.seconds;
  conf["seed"] = cfg.seed;
  report["config"] = std::move(conf);

  int code = 0;
  std::string status = "completed";
  ojson error;
  try {
    if (cfg.command == "check")
      cmd_check(ctx);
    else if (cfg.command == "bch")
      cmd_bch(ctx);
    else if (cfg.command == "der")
      cmd_der(ctx);
    else if (cfg.command == "group")
      cmd_group(ctx);
    else if (cfg.command == "cohomology")
      cmd_cohomology(ctx);
    else if (cfg.command == "aut-brute")
      cmd_aut_brute(ctx);
    else if (cfg.command == "bound")
      cmd_bound(ctx);
    else if (cfg.command == "report")
      cmd_report(ctx);
    else
      throw PreconditionViolation("unknown command " + cfg.command);
  } catch (const BudgetExceeded &e) {
    code = 2;
    status = "refused";
    ctx.caveat("budget-refusals");
    error = {{"type", "budget"}, {"message", e.what()}};
  } catch (const SchemaError &e) {
    code = 1;
    status = "invalid";
    error = {{"type", "schema"}, {"message", e.what()}, {"pointer", e.pointer()}};
  } catch (const ValidationError &e) {
    code = 1;
    status = "invalid";
    error = {{"type", "validation"}, {"message", e.what()}, {"witness", e.witness()}};
  } catch (const Error &e) {
    code = 1;
    status = "invalid";
    error = {{"type", "precondition"}, {"message", e.what()}};
  }
  report["inputDigest"] = ctx.digest.empty() ? ojson(nullptr) : ojson(ctx.digest);
  report["status"] = status;
  report["caveats"] = ctx.caveats;
  report["results"] = std::move(ctx.results);
  if (!ctx.notes.empty())
    report["notes"] = ctx.notes;
  if (!error.is_null())
    report["error"] = std::move(error);
  return {code, std::move(report)};
}

auto render_json(const ojson &report) -> std::string { return report.dump(2) + "\n"; }

namespace {

void render_node(const ojson &node, const std::string &indent, std::ostringstream &out) {
  std::size_t index = 0;
  for (auto it = node.begin(); it != node.end(); ++it, ++index) {
    const std::string key = node.is_object() ? it.key() : "[" + std::to_string(index) + "]";
    const auto &v = it.value();
    if (v.is_object() && v.contains("value") && v.contains("method") && v.size() == 2) {
      out << indent << key << ": " << v["value"].dump() << " (" << v["method"].get<std::string>()
          << ")\n";
    } else if (v.is_array() && std::all_of(v.begin(), v.end(),
                                           [](const ojson &x) { return x.is_primitive(); })) {
      out << indent << key << ": " << v.dump() << "\n";
    } else if (v.is_structured() && !v.empty()) {
      out << indent << key << ":\n";
      render_node(v, indent + "  ", out);
    } else {
      out << indent << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

} // namespace

auto render_text(const ojson &report) -> std::string {
  std::ostringstream out;
  render_node(report, "", out);
  return out.str();
}

} // namespace lazard
