#include <stdexcept>

#include "doctest.h"
#include "mvpc/config.hpp"

using namespace mvpc;

TEST_CASE("config parsing: comments, blanks, whitespace") {
  KeyValues kv = parse_config(
      "# a full-line comment\n"
      "\n"
      "alpha = 0.05   # trailing comment\n"
      "  name=suite one  \n"
      "flag =true\n",
      "conf");
  CHECK(kv.values.size() == 3);
  CHECK(kv.has("alpha"));
  CHECK(config_double(kv, "alpha", 0) == 0.05);
  CHECK(config_string(kv, "name", "") == "suite one");
  CHECK(config_bool(kv, "flag", false));
}

TEST_CASE("config parsing errors name the origin and line") {
  CHECK_THROWS_WITH_AS(parse_config("novalue\n", "c.txt"),
                       doctest::Contains("c.txt"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config("x = 1\nnovalue\n", "c.txt"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config(" = 1\n", "c.txt"),
                       doctest::Contains("line 1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config("a = 1\na = 2\n", "c.txt"),
                       doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("typed accessors return defaults only for absent keys") {
  KeyValues kv = parse_config("n = 12\nr = 1.5\nb = 0\nlist = 3, 1, 2\n", "c");
  CHECK(config_int(kv, "n", 7) == 12);
  CHECK(config_int(kv, "absent", 7) == 7);
  CHECK(config_double(kv, "r", 0) == 1.5);
  CHECK(config_double(kv, "absent", 2.5) == 2.5);
  CHECK_FALSE(config_bool(kv, "b", true));
  CHECK(config_uint64(kv, "n", 0) == 12);
  CHECK(config_int_list(kv, "list", {}) == std::vector<int>{3, 1, 2});
  CHECK(config_string_list(kv, "list", {}) ==
        std::vector<std::string>{"3", "1", "2"});
}

TEST_CASE("malformed values throw and name the key") {
  KeyValues kv = parse_config("n = twelve\nb = yes\nlist = 1,x\n", "c");
  CHECK_THROWS_WITH_AS(config_int(kv, "n", 0), doctest::Contains("n"),
                       std::runtime_error);
  CHECK_THROWS_AS(config_double(kv, "n", 0), std::runtime_error);
  CHECK_THROWS_AS(config_bool(kv, "b", false), std::runtime_error);
  CHECK_THROWS_AS(config_int_list(kv, "list", {}), std::runtime_error);
  // Trailing junk after a number is malformed, not silently truncated.
  KeyValues kv2 = parse_config("n = 12abc\n", "c");
  CHECK_THROWS_AS(config_int(kv2, "n", 0), std::runtime_error);
}

TEST_CASE("unknown keys are rejected by name") {
  KeyValues kv = parse_config("alpha = 1\ninstance.0.name = x\ntypo = 2\n", "c");
  CHECK_THROWS_WITH_AS(require_known_keys(kv, {"alpha", "instance."}),
                       doctest::Contains("typo"), std::runtime_error);
  kv.values.erase("typo");
  CHECK_NOTHROW(require_known_keys(kv, {"alpha", "instance."}));
}

TEST_CASE("suite config round trips through text exactly") {
  SuiteConfig c;
  c.p = 13;
  c.sample_sizes = {250, 4000};
  c.mechanisms = {MGraph::Mechanism::MCAR, MGraph::Mechanism::MNAR};
  c.replicates = 3;
  c.missing_rate = 0.15;
  c.coef_lo = 0.33;
  c.coef_hi = 0.71;
  c.expected_degree = 1.7;
  c.slope = 2.25;
  c.seed = 987654321;

  const std::string text = suite_config_text(c, "suite.");
  KeyValues kv = parse_config(text, "mem");
  SuiteConfig back = suite_config_from(kv, "suite.");
  CHECK(back.p == c.p);
  CHECK(back.sample_sizes == c.sample_sizes);
  CHECK(back.mechanisms == c.mechanisms);
  CHECK(back.replicates == c.replicates);
  CHECK(back.vm_min == c.vm_min);
  CHECK(back.vm_max == c.vm_max);
  CHECK(back.missing_rate == c.missing_rate);
  CHECK(back.coef_lo == c.coef_lo);
  CHECK(back.coef_hi == c.coef_hi);
  CHECK(back.expected_degree == c.expected_degree);
  CHECK(back.min_colliders == c.min_colliders);
  CHECK(back.slope == c.slope);
  CHECK(back.seed == c.seed);
  // and the regenerated text is byte-identical
  CHECK(suite_config_text(back, "suite.") == text);
}

TEST_CASE("suite config accepts the documented keys without prefix") {
  KeyValues kv = parse_config("p = 8\nmechanisms = MAR, MCAR\nseed = 5\n", "c");
  require_known_keys(kv, suite_config_keys());
  SuiteConfig c = suite_config_from(kv);
  CHECK(c.p == 8);
  REQUIRE(c.mechanisms.size() == 2);
  CHECK(c.mechanisms[0] == MGraph::Mechanism::MAR);
  CHECK(c.mechanisms[1] == MGraph::Mechanism::MCAR);
  CHECK(c.seed == 5);
  CHECK(c.replicates == SuiteConfig{}.replicates);  // untouched default
}

TEST_CASE("suite config validation rejects nonsense") {
  KeyValues bad = parse_config("p = 1\n", "c");
  CHECK_THROWS_AS(suite_config_from(bad), std::invalid_argument);
  KeyValues bad_rate = parse_config("missing_rate = 1.5\n", "c");
  CHECK_THROWS_AS(suite_config_from(bad_rate), std::invalid_argument);
  KeyValues bad_mech = parse_config("mechanisms = MARR\n", "c");
  CHECK_THROWS_AS(suite_config_from(bad_mech), std::invalid_argument);
  KeyValues bad_sizes = parse_config("sample_sizes = 0\n", "c");
  CHECK_THROWS_AS(suite_config_from(bad_sizes), std::invalid_argument);
}
