#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardfn/constructions.hpp"
#include "cardfn/error.hpp"
#include "cardfn/specfile.hpp"
#include "support.hpp"

using namespace cardfn;
using testsupport::R;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("geometric spec") {
  const auto s = parse_spec("tail.kind = geometric\nc = 1\nq = 1/2\n");
  CHECK(s == testsupport::geo(R(1), R(1, 2)));
}

TEST_CASE("full syntax") {
  const auto s = parse_spec(R"(# Guthrie-Nymann with a lead atom
label = "gn plus"
prefix = ["27/32", 2]

tail.kind = multigeometric   # trailing comment
tail.coeffs = ["3/4", "2/4"]
tail.q = 1/4
)");
  CHECK(s.label == std::optional<std::string>("gn plus"));
  CHECK(s.prefix == std::vector<Rat>{R(27, 32), R(2)});
  CHECK(s.tail == TailSpec{MultigeometricTail{{R(3, 4), R(1, 2)}, R(1, 4)}});
}

TEST_CASE("blocks syntax") {
  const auto s = parse_spec(R"(tail.kind = blocks
base = 10
sizes = "2n+1"
pattern = [["1@0", "1/2@1"], ["1@0"]]
)");
  const auto* b = std::get_if<BlocksTail>(&s.tail);
  REQUIRE(b);
  CHECK(b->base == 10);
  CHECK(b->sizes == SizeRule{2, 1});
  REQUIRE(b->pattern.size() == 2);
  CHECK(b->pattern[0] == std::vector<BlockTerm>{{R(1), 0}, {R(1, 2), 1}});
  CHECK(b->pattern[1] == std::vector<BlockTerm>{{R(1), 0}});
  // The pattern defaults to one plain atom per copy.
  const auto plain = parse_spec("tail.kind = blocks\nbase = 2\nsizes = \"n\"\n");
  CHECK(std::get<BlocksTail>(plain.tail).pattern == BlocksTail{}.pattern);
}

TEST_CASE("size rules") {
  CHECK(parse_size_rule("n") == SizeRule{1, 0});
  CHECK(parse_size_rule("3") == SizeRule{0, 3});
  CHECK(parse_size_rule("2n+1") == SizeRule{2, 1});
  CHECK(parse_size_rule(" 4n ") == SizeRule{4, 0});
  for (const auto& r : {SizeRule{1, 0}, SizeRule{0, 3}, SizeRule{2, 1}, SizeRule{7, 0}}) {
    CHECK(parse_size_rule(render_size_rule(r)) == r);
  }
  CHECK_THROWS_AS(parse_size_rule("0"), Error);
  CHECK_THROWS_AS(parse_size_rule("n-1"), Error);
  CHECK_THROWS_AS(parse_size_rule("n^2"), Error);
}

TEST_CASE("semantic errors carry positions") {
  const auto msg = parse_error("tail.kind = geometric\nc = 1\nq = 3/2\n");
  CHECK(msg.find("3:") == 0);
  CHECK(msg.find("ratio not in (0,1)") != std::string::npos);

  CHECK(parse_error("prefix = [\"1/2\", \"-1/4\"]\n").find("1:") == 0);
  CHECK(parse_error("prefix = [\"1/2\", 0]\n") != "");
}

TEST_CASE("syntax errors carry line and column") {
  CHECK(parse_error("\n  bogus = 1\n").find("2:3:") == 0);
  CHECK(parse_error("prefix [1]\n").find("1:1:") == 0);
  CHECK(parse_error("prefix = [\"1/2\"\n").find("1:") == 0);
  CHECK(parse_error("q = 1/2\nq = 1/3\n").find("2:1:") == 0);
  CHECK(parse_error("tail.kind = geometric\nq = 1/2\n").find("needs key") != std::string::npos);
  CHECK(parse_error("tail.kind = zero\nq = 1/2\n").find("does not apply") != std::string::npos);
  CHECK(parse_error("tail.kind = spiral\n").find("unknown tail kind") != std::string::npos);
  CHECK(parse_error("prefix = [\"x/2\"]\n") != "");
  CHECK(parse_error("label = \"unterminated\n") != "");
}

TEST_CASE("render and parse round-trip on the catalog") {
  for (const auto& [name, spec] : testsupport::catalog()) {
    CAPTURE(name);
    const auto text = render_spec(spec);
    CHECK(parse_spec(text) == spec);
    CHECK(render_spec(parse_spec(text)) == text);
  }
  CHECK(parse_spec(render_spec(preset("GN_CANTORVAL"))) == preset("GN_CANTORVAL"));
}

TEST_CASE("round-trip on random specs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    SeriesSpec s;
    s.prefix = testsupport::random_atoms(rng, 4, 50);
    switch (trial % 4) {
      case 0: break;
      case 1: s.tail = GeometricTail{testsupport::random_atoms(rng, 1, 9)[0], R(1 + trial % 7, 8)}; break;
      case 2: s.tail = MultigeometricTail{testsupport::random_atoms(rng, 5, 9), R(1 + trial % 5, 6)}; break;
      default: s.tail = BlocksTail{static_cast<std::uint32_t>(2 + trial % 9), SizeRule{std::uint64_t(trial % 3), 1}, {{{R(1), 0}}}};
    }
    if (trial % 3 == 0) s.label = "trial \"" + std::to_string(trial) + "\"";
    CHECK(parse_spec(render_spec(s)) == s);
  }
}

TEST_CASE("spec files") {
  CHECK_THROWS_AS(load_spec_file("/nonexistent/dir/x.spec"), Error);
}
