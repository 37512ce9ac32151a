#include "lazard/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
  lazard::RunConfig cfg;
  std::vector<unsigned> window;
  std::optional<lazard::u64> budget;
};

void ring_arg(CLI::App *sub, Flags &f) {
  sub->add_option("ring", f.cfg.ringPath, "Ring JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--prime", f.cfg.prime, "Override the ring's prime");
}

void budget_args(CLI::App *sub, Flags &f) {
  sub->add_option("--budget", f.budget, "Element-count budget")->check(CLI::PositiveNumber);
  sub->add_option("--node-budget", f.cfg.nodeBudget, "Search-node budget")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seconds", f.cfg.seconds, "Wall-clock budget (0 = none)")
      ->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Lazard-group automorphism toolkit"};
  app.set_version_flag("--version", lazard::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  std::string format = "json";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--seed", f.cfg.seed, "Seed for sampled checks")->capture_default_str();

  auto *check = app.add_subcommand("check", "Validate a ring and report uniformity");
  ring_arg(check, f);

  auto *bch = app.add_subcommand("bch", "BCH coefficients and truncation certificate");
  bch->add_option("--prime", f.cfg.prime)->required();
  bch->add_option("--precision", f.cfg.precision)->required();
  bch->add_option("--svaluation", f.cfg.svaluation, "Bracket valuation s (omit for infinite)");
  bch->add_option("--degree", f.cfg.degree, "Series degree to list");

  auto *der = app.add_subcommand("der", "Derivation module of L/p^k L");
  ring_arg(der, f);
  der->add_option("--precision", f.cfg.precision)->required();

  auto *group = app.add_subcommand("group", "Build U_m and verify the group law");
  ring_arg(group, f);
  group->add_option("--precision", f.cfg.precision)->required();
  group->add_option("--verify", f.cfg.verify)
      ->check(CLI::IsMember({"auto", "exhaustive", "sampled"}))
      ->capture_default_str();
  group->add_option("--samples", f.cfg.samples)->check(CLI::PositiveNumber);
  budget_args(group, f);

  auto *coh = app.add_subcommand("cohomology", "H^1 of U_m on a section module");
  ring_arg(coh, f);
  coh->add_option("--precision", f.cfg.precision)->required();
  coh->add_option("--window", f.window, "Section indices I J")->expected(2)->required();
  budget_args(coh, f);

  auto *aut = app.add_subcommand("aut-brute", "Exact |Aut(U_m)| by backtracking");
  ring_arg(aut, f);
  aut->add_option("--precision", f.cfg.precision)->required();
  budget_args(aut, f);

  auto *bound = app.add_subcommand("bound", "Automorphism bound chain");
  bound->add_option("ring", f.cfg.ringPath, "Ring JSON file")->check(CLI::ExistingFile);
  bound->add_option("--prime", f.cfg.prime, "Override the ring's prime");
  bound->add_option("--k", f.cfg.k, "Stabilization level (default: measured)");
  bound->add_option("--imax", f.cfg.imax)->capture_default_str();
  bound->add_option("--symbolic-d", f.cfg.symbolicD, "Symbolic mode: dimension");
  bound->add_option("--symbolic-z", f.cfg.symbolicZ, "Symbolic mode: center rank");
  budget_args(bound, f);

  auto *report = app.add_subcommand("report", "Full pipeline on one ring");
  ring_arg(report, f);
  report->add_option("--precision", f.cfg.precision, "Group precision (default 2)");
  report->add_option("--k", f.cfg.k, "Stabilization level (default: measured)");
  report->add_option("--imax", f.cfg.imax)->capture_default_str();
  budget_args(report, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  f.cfg.command = app.get_subcommands().front()->get_name();
  f.cfg.format = format;
  if (f.window.size() == 2) {
    f.cfg.windowI = f.window[0];
    f.cfg.windowJ = f.window[1];
  }
  f.cfg.elementBudget = f.budget ? f.budget : lazard::budget_from_env();
  if (f.cfg.command == "bound" && f.cfg.ringPath.empty() && !f.cfg.symbolicD) {
    std::cerr << "bound needs a ring file or --symbolic-d\n";
    return 1;
  }

  auto outcome = lazard::run(f.cfg);
  std::cout << (format == "text" ? lazard::render_text(outcome.report)
                                 : lazard::render_json(outcome.report));
  if (outcome.exitCode == 1 && outcome.report.contains("error"))
    std::cerr << "error: " << outcome.report["error"]["message"].get<std::string>() << "\n";
  return outcome.exitCode;
}
