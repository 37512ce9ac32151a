#include "lazard/cli.hpp"
#include "lazard/corpus.hpp"
#include "lazard/errors.hpp"
#include "lazard/ringio.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lazard;
using nlohmann::json;

namespace {

const std::filesystem::path kCorpus = LAZARD_CORPUS_DIR;

auto corpus_path(const std::string &name) -> std::string {
  return (kCorpus / (name + ".json")).string();
}

auto read_file(const std::string &path) -> std::string {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

auto write_temp(const std::string &name, const std::string &text) -> std::string {
  const auto path = std::filesystem::temp_directory_path() / ("lazard-test-" + name);
  std::ofstream(path) << text;
  return path.string();
}

auto config(const std::string &command, const std::string &ring) -> RunConfig {
  RunConfig c;
  c.command = command;
  c.ringPath = ring;
  return c;
}

} // namespace

TEST_CASE("corpus files match the built-in corpus") {
  for (auto &e : corpus()) {
    CAPTURE(e.name);
    const auto text = read_file(corpus_path(e.name));
    REQUIRE(!text.empty());
    CHECK(json::parse(text) == json::parse(ring_to_json(e.data).dump()));
    const auto loaded = load_ring(corpus_path(e.name));
    CHECK(loaded.data.rank() == e.data.rank());
    CHECK(loaded.digest == "sha256:" + sha256_hex(text));
    CHECK(load_ring_text(text).digest == loaded.digest);
  }
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("ring parsing and schema errors") {
  const auto heis = load_ring(corpus_path("heisenberg-scaled-p3"));
  CHECK(heis.data.rank() == 3);
  CHECK(heis.data.prime() == 3);

  auto expect_schema = [](const std::string &text, const std::string &pointer) {
    try {
      parse_ring_json(text);
      FAIL("accepted: " << text);
    } catch (const SchemaError &e) {
      CHECK(e.pointer() == pointer);
    }
  };
  expect_schema(R"({"rank": 2, "brackets": []})", "/prime");
  expect_schema(R"({"prime": 3, "rank": 2, "brackets": [], "extra": 1})", "/extra");
  expect_schema(R"({"prime": 4, "rank": 2, "brackets": []})", "/prime");
  expect_schema(R"({"prime": 3, "rank": 2, "brackets": [{"i": 1, "j": 2, "coeffs": [1]}]})",
                "/brackets/0/coeffs");
  expect_schema(
      R"({"prime": 3, "rank": 2, "brackets": [{"i": 1, "j": 2, "coeffs": [1.5, 0]}]})",
      "/brackets/0/coeffs/0");
  expect_schema(R"({"prime": 3, "rank": 2, "brackets": [)"
                R"({"i": 1, "j": 2, "coeffs": [0, 0]}, {"i": 1, "j": 2, "coeffs": [0, 0]}]})",
                "/brackets/1");
}

TEST_CASE("Jacobi failure carries the witness triple") {
  auto j = json::parse(read_file(corpus_path("sl2-p3-s1")));
  j["brackets"][0]["coeffs"][0] = 1;
  const auto path = write_temp("bad-jacobi.json", j.dump());
  const auto out = run(config("check", path));
  CHECK(out.exitCode == 1);
  CHECK(out.report["status"] == "invalid");
  CHECK(out.report["error"]["type"] == "validation");
  CHECK(out.report["error"]["witness"] == json::array({1, 2, 3}));
}

TEST_CASE("missing prime is a schema error at /prime") {
  const auto path = write_temp("no-prime.json", R"({"rank": 2, "brackets": []})");
  const auto out = run(config("check", path));
  CHECK(out.exitCode == 1);
  CHECK(out.report["error"]["type"] == "schema");
  CHECK(out.report["error"]["pointer"] == "/prime");
}

TEST_CASE("check reports uniformity") {
  const auto out = run(config("check", corpus_path("abelian-d2-p3")));
  CHECK(out.exitCode == 0);
  CHECK(out.report["status"] == "completed");
  CHECK(out.report["results"]["uniformity"]["uniform"] == true);
  const auto raw = run(config("check", corpus_path("heisenberg-p3")));
  CHECK(raw.exitCode == 0);
  CHECK(raw.report["results"]["uniformity"]["uniform"] == false);
}

TEST_CASE("budget refusal exits 2 with a message") {
  auto c = config("aut-brute", corpus_path("sl2-p3-s1"));
  c.precision = 2;
  c.elementBudget = 1;
  const auto out = run(c);
  CHECK(out.exitCode == 2);
  CHECK(out.report["status"] == "refused");
  CHECK(out.report["error"]["type"] == "budget");
  CHECK(!out.report["error"]["message"].get<std::string>().empty());
}

TEST_CASE("budget from the environment") {
  ::setenv(kBudgetEnvVar, "17", 1);
  CHECK(budget_from_env() == u64{17});
  ::setenv(kBudgetEnvVar, "junk", 1);
  CHECK(!budget_from_env());
  ::unsetenv(kBudgetEnvVar);
  CHECK(!budget_from_env());
}

TEST_CASE("report on sl2 produces a full bound chain") {
  auto out = run(config("report", corpus_path("sl2-p3-s1")));
  REQUIRE(out.exitCode == 0);
  const auto &r = out.report["results"];
  const auto &bound = r["bound"];
  CHECK(bound["perLevel"].size() == 4);
  CHECK(bound["k"]["method"] == "empirical");
  CHECK(r["automorphisms"]["autOrder"]["method"] == "exact");
  CHECK(r["automorphisms"]["boundDominates"] == true);
  CHECK(out.report["inputDigest"].get<std::string>().rfind("sha256:", 0) == 0);
  for (auto &level : bound["perLevel"])
    CHECK(level["validity"].is_string());
}

TEST_CASE("reports are byte-stable") {
  for (const char *cmd : {"check", "der", "group", "report"}) {
    CAPTURE(cmd);
    auto c = config(cmd, corpus_path("heisenberg-scaled-p3"));
    if (std::string(cmd) == "der" || std::string(cmd) == "group")
      c.precision = 2;
    const auto a = render_json(run(c).report);
    const auto b = render_json(run(c).report);
    CHECK(a == b);
    CHECK(render_text(run(c).report) == render_text(run(c).report));
  }
}

TEST_CASE("sampled group verification honours the seed") {
  auto c = config("group", corpus_path("sl2-p5-s1"));
  c.precision = 2;
  c.verify = "sampled";
  c.samples = 200;
  const auto a = run(c);
  REQUIRE(a.exitCode == 0);
  CHECK(a.report["config"]["seed"] == 1);
  CHECK(a.report["status"] == "completed");
  CHECK(render_json(a.report) == render_json(run(c).report));
  const auto &caveats = a.report["caveats"];
  CHECK(std::find(caveats.begin(), caveats.end(), "sampled-verification") != caveats.end());
}

TEST_CASE("symbolic bound needs no ring") {
  RunConfig c;
  c.command = "bound";
  c.symbolicD = 41;
  c.symbolicZ = 1;
  const auto out = run(c);
  REQUIRE(out.exitCode == 0);
  CHECK(render_json(out.report).find("1681") != std::string::npos);
}
