#include <cmath>

#include "bbmlab/report.hpp"
#include "commands.hpp"
#include "doctest.h"
#include "run_config.hpp"

using namespace bbmcli;

TEST_CASE("defaults and typed access") {
  RunConfig c;
  CHECK(c.number("collide.c1") == 2.0);
  CHECK(c.integer("grid.n") == 4096);
  CHECK_FALSE(c.boolean("coeffs.sweep"));
  CHECK(c.list("scaling.c2_list").size() >= 5);
  CHECK(c.text("scan.variant") == "both");
}

TEST_CASE("every key has a flag and a valid default") {
  RunConfig c;
  for (auto& k : key_registry()) {
    CHECK(k.flag.rfind("--", 0) == 0);
    CHECK(k.key.find('.') != std::string::npos);
    CHECK_NOTHROW(c.set(k.key, k.def));
  }
}

TEST_CASE("unknown keys and bad values are usage errors") {
  RunConfig c;
  CHECK_THROWS_AS(c.set("collide.c3", "1"), UsageError);
  CHECK_THROWS_AS(c.set("collide.c2", "1.1x"), UsageError);
  CHECK_THROWS_AS(c.set("grid.n", "4096.5"), UsageError);
  CHECK_THROWS_AS(c.set("coeffs.sweep", "maybe"), UsageError);
  CHECK_THROWS_AS(c.set("scan.variant", "zz"), UsageError);
  CHECK_THROWS_AS(c.set_assignment("collide.c2"), UsageError);
  CHECK_THROWS_AS(c.load_text("[collide]\nc22 = 1\n"), UsageError);
  CHECK_THROWS_AS(c.load_json("{\"collide\": {\"c2\": [1, \"a\"]}}"), UsageError);
}

TEST_CASE("key=value files with sections") {
  RunConfig c;
  c.load_text("# sweep\n[collide]\nc2 = 1.05   \n\n[scaling]\nc2_list = 1.03, 1.05,1.1\ncollide.dt = 0.02\n");
  CHECK(c.number("collide.c2") == 1.05);
  CHECK(c.list("scaling.c2_list") == std::vector<double>{1.03, 1.05, 1.1});
  CHECK(c.number("collide.dt") == 0.02);
}

TEST_CASE("JSON files, nested and flat") {
  RunConfig c;
  c.load_json(R"({"collide": {"c2": 1.07, "refine": true}, "grid.n": 2048, "scaling": {"c2_list": [1.1, 1.2, 1.3]}})");
  CHECK(c.number("collide.c2") == 1.07);
  CHECK(c.boolean("collide.refine"));
  CHECK(c.integer("grid.n") == 2048);
  CHECK(c.list("scaling.c2_list").back() == 1.3);
}

TEST_CASE("resolved text reloads to the same config") {
  RunConfig a;
  a.set("collide.c2", "1.0625");
  a.set("coeffs.sweep", "yes");
  RunConfig b;
  b.load_text(a.resolved_text());
  CHECK(a.resolved_json() == b.resolved_json());
  auto j = nlohmann::json::parse(a.resolved_json());
  CHECK(j["collide"]["c2"].get<double>() == 1.0625);
  CHECK(j["coeffs"]["sweep"].get<bool>());
}

TEST_CASE("help text lists every key") {
  std::vector<const KeySpec*> all;
  for (auto& k : key_registry()) all.push_back(&k);
  auto s = describe_keys(all);
  for (auto& k : key_registry()) CHECK(s.find(k.key + " = ") != std::string::npos);
}

TEST_CASE("commands cover their sections") {
  CHECK(commands().size() == 8);
  for (auto& c : commands()) CHECK_FALSE(keys_for(c.sections).empty());
}

TEST_CASE("RFC 4180 escaping") {
  CHECK(bbm::csv_escape("plain") == "plain");
  CHECK(bbm::csv_escape("a,b") == "\"a,b\"");
  CHECK(bbm::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(bbm::csv_escape("two\nlines") == "\"two\nlines\"");
  bbm::CsvTable t({"a", "b"});
  t.add({"1", "x,y"});
  CHECK(t.str() == "a,b\r\n1,\"x,y\"\r\n");
  CHECK_THROWS(t.add({"only one"}));
  CHECK(bbm::fmt(0.1) == "0.1");
  CHECK(bbm::fmt(NAN) == "nan");
}

TEST_CASE("coeffs at lambda = 0 flags the KdV limit") {
  RunConfig c;
  c.set("coeffs.lambda", "0");
  auto r = run_command("coeffs", c, 1);
  CHECK(r.pass);
  CHECK(r.data["rows"][0]["note"] == "KdV-elastic limit");
  CHECK(r.data["rows"][0]["closed"]["d"].get<double>() == 0.0);
}

TEST_CASE("coeffs at lambda = 1/2") {
  RunConfig c;
  auto r = run_command("coeffs", c, 1);
  CHECK(r.pass);
  CHECK(r.data["rows"][0]["closed"]["a10"].get<double>() == doctest::Approx(0.759494).epsilon(1e-6));
}

TEST_CASE("validation happens before compute") {
  RunConfig c;
  c.set("collide.c2", "2");
  CHECK_THROWS_AS(run_command("collide", c, 1), UsageError);
  RunConfig d;
  d.set("coeffs.lambda", "1");
  CHECK_THROWS_AS(run_command("coeffs", d, 1), UsageError);
  RunConfig e;
  e.set("simulate.n", "1000");
  CHECK_THROWS_AS(run_command("simulate", e, 1), UsageError);
  CHECK_THROWS_AS(run_command("nope", RunConfig{}, 1), UsageError);
}

TEST_CASE("reports are deterministic and embed config and version") {
  RunConfig c;
  c.set("simulate.t_end", "2");
  auto a = run_command("simulate", c, 1), b = run_command("simulate", c, 2);
  REQUIRE(a.tables.size() == 1);
  CHECK(a.tables[0].second.str() == b.tables[0].second.str());
  auto env = envelope("simulate", c, a);
  CHECK(env["schema_version"] == bbm::kSchemaVersion);
  CHECK(env["config"]["simulate"]["t_end"].get<double>() == 2.0);
  CHECK(env["version_hash"].get<std::string>() == bbm::version_hash());
  CHECK(env["command"] == "simulate");
}

TEST_CASE("identities fail on a coarse grid") {
  RunConfig c;
  c.set("grid.n", "64");
  CHECK_FALSE(run_command("identities", c, 1).pass);
  CHECK(run_command("identities", RunConfig{}, 1).pass);
}
