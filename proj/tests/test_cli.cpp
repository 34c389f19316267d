#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cardfn/cli.hpp"
#include "cardfn/constructions.hpp"
#include "cardfn/specfile.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cardfn::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

bool has_line(const std::string& text, const std::string& line) {
  const auto ls = lines(text);
  return std::find(ls.begin(), ls.end(), line) != ls.end();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cardfn_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string deep_blocks_target() {
  // sum_{n=1}^{20} 4n / 2^{n^2}
  cardfn::Rat t = 0;
  for (long n = 1; n <= 20; ++n) t += cardfn::make_rat(4 * n, 1) / cardfn::pow(cardfn::Rat(2), n * n);
  return cardfn::to_string(t);
}

}  // namespace

TEST_CASE("count a continuum point") {
  const auto r = cli({"count", "--preset", "EX_2_6", "--target", "1"});
  CHECK(r.code == cardfn::kExitOk);
  CHECK(lines(r.out).at(0) == "1\tcontinuum");
}

TEST_CASE("rows are sorted by target and deduplicated") {
  const auto r = cli({"count", "--preset", "EX_2_6", "--target", "3/2", "--target", "0", "--target", "1/2",
                      "--target", "2/4"});
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 3);
  CHECK(ls[0] == "0\t1");
  CHECK(ls[1] == "1/2\tcontinuum");
  CHECK(ls[2] == "3/2\tcontinuum");
  CHECK(ls[3].rfind("# ", 0) == 0);
}

TEST_CASE("scan reports the cardinality set") {
  const auto r = cli({"scan", "--preset", "GN_CANTORVAL", "--depth", "8"});
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "# cardinality_set\t{1, 2}"));
  CHECK(has_line(r.out, "# budget_limited\t0"));
}

TEST_CASE("budget exhaustion prints a lower bound and exits 2") {
  const auto spec = scratch("blocks.spec");
  write_file(spec, "tail.kind = blocks\nbase = 2\nsizes = \"8n\"\n");
  const auto r = cli({"count", "--spec", spec.string(), "--target", deep_blocks_target(), "--budget", "10"});
  CHECK(r.code == cardfn::kExitBudget);
  const auto first = lines(r.out).at(0);
  CHECK(first.substr(first.find('\t') + 1).rfind(">=", 0) == 0);
  CHECK(has_line(r.out, "# budget_exceeded\t1"));
}

TEST_CASE("usage and parse errors exit 1") {
  CHECK(cli({}).code == cardfn::kExitUsage);
  CHECK(cli({"frobnicate"}).code == cardfn::kExitUsage);
  CHECK(cli({"count", "--preset", "EX_2_6"}).code == cardfn::kExitUsage);
  CHECK(cli({"count", "--preset", "EX_2_6", "--target", "one"}).code == cardfn::kExitUsage);
  CHECK(cli({"count", "--preset", "NO_SUCH", "--target", "1"}).code == cardfn::kExitUsage);
  CHECK(cli({"count", "--target", "1"}).code == cardfn::kExitUsage);
  CHECK(cli({"count", "--preset", "EX_2_6", "--target", "9"}).code == cardfn::kExitUsage);
  CHECK(cli({"scan", "--preset", "EX_2_6", "--format", "xml"}).code == cardfn::kExitUsage);

  const auto bad = scratch("bad.spec");
  write_file(bad, "tail.kind = geometric\nc = 1\nq = 3/2\n");
  const auto r = cli({"classify", "--spec", bad.string()});
  CHECK(r.code == cardfn::kExitUsage);
  CHECK(r.err.find("3:") != std::string::npos);
  CHECK(r.err.find("ratio not in (0,1)") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("help exits 0") {
  const auto r = cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("count") != std::string::npos);
}

TEST_CASE("pretty format uses glyphs and aligned columns") {
  const auto r = cli({"count", "--preset", "EX_2_6", "--target", "1", "--target", "0", "--format", "pretty"});
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.at(0) == "0  1");
  CHECK(ls.at(1) == "1  𝔠");
  const auto omega = cli({"count", "--preset", "INTERLEAVED_GEO(1/5)", "--target", "1/4", "--format", "pretty"});
  CHECK(lines(omega.out).at(0) == "1/4  ω");
}

TEST_CASE("reports are deterministic") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"scan", "--preset", "EX_4_19", "--depth", "9"},
        std::vector<std::string>{"count", "--preset", "EX_2_6", "--target", "1", "--witnesses", "6"},
        std::vector<std::string>{"gaps", "--preset", "GN_CANTORVAL", "--depth", "6"},
        std::vector<std::string>{"search-range", "--range", "1,2", "--max-atoms", "3", "--denominators", "3"}}) {
    const auto a = cli(args);
    const auto b = cli(args);
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
  }
}

TEST_CASE("--out writes the report to a file") {
  const auto path = scratch("report.tsv");
  fs::remove(path);
  const auto r = cli({"scan", "--preset", "EX_4_19", "--depth", "9", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream content;
  content << f.rdbuf();
  CHECK(has_line(content.str(), "# cardinality_set\t{1, 3, 5, 7}"));
}

TEST_CASE("every command runs against presets") {
  CHECK(cli({"classify", "--preset", "GN_CANTORVAL"}).out.find("CantorvalCandidate") != std::string::npos);
  const auto props = cli({"props", "--preset", "INTERLEAVED_GEO(1/5)"});
  CHECK(props.code == 0);
  CHECK(has_line(props.out, "quick\tno"));
  CHECK(has_line(props.out, "A\tno"));

  const auto en = cli({"enumerate", "--preset", "EX_3_5", "--target", "1/2", "--limit", "5"});
  CHECK(en.code == 0);
  CHECK(has_line(en.out, "# cardinality\t2"));

  const auto ex = cli({"expand", "--preset", "EX_3_5", "--target", "1/3", "--depth", "6"});
  CHECK(has_line(ex.out, "digits\t010101"));
  CHECK(has_line(ex.out, "closed\t1"));

  const auto cover = cli({"gaps", "--preset", "EX_3_5", "--depth", "3", "--cover"});
  CHECK(lines(cover.out) == std::vector<std::string>{"0\t1"});

  const auto g = cli({"gaps", "--preset", "INTERLEAVED_GEO(1/5)", "--depth", "4"});
  CHECK(g.code == 0);

  const auto fr = cli({"finite-range", "--atoms", "4,4,2,2,2"});
  CHECK(has_line(fr.out, "# range\t{1, 3, 5, 7}"));
  CHECK(has_line(fr.out, "# subsets\t32"));

  const auto sr = cli({"search-range", "--range", "1,4", "--max-atoms", "3", "--denominators", "4"});
  CHECK(sr.code == 0);
  CHECK(has_line(sr.out, "# matches\t0"));
}

TEST_CASE("construct emits parseable specs") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"construct", "--op", "interleave", "--preset", "EX_3_5"},
        std::vector<std::string>{"construct", "--op", "double", "--preset", "EX_3_5"},
        std::vector<std::string>{"construct", "--op", "add-m-totals", "--m", "3", "--preset", "GN_CANTORVAL"},
        std::vector<std::string>{"construct", "--op", "prepend", "--multipliers", "4,4,2", "--preset", "EX_3_5"},
        std::vector<std::string>{"construct", "--op", "product", "--tau", "3,2,1", "--preset", "EX_2_6"}}) {
    const auto r = cli(args);
    CAPTURE(args[2]);
    if (args[2] == "interleave") {
      CHECK(r.code == cardfn::kExitUsage);
      CHECK(r.err.find("property (B)") != std::string::npos);
      continue;
    }
    CHECK(r.code == 0);
    CHECK_NOTHROW(cardfn::parse_spec(r.out));
  }
  const auto rt = cli({"construct", "--op", "add-total", "--preset", "EX_3_5"});
  CHECK(cardfn::parse_spec(rt.out) == cardfn::add_total(cardfn::preset("EX_3_5")));
}

TEST_CASE("budget defaults from the environment and config file") {
  const auto cfg = scratch("config.json");
  write_file(cfg, R"({"budget": 1234, "witnesses": 2, "refinements": 8})");
  setenv("CARDFN_CONFIG", cfg.string().c_str(), 1);
  unsetenv("CARDFN_BUDGET");
  auto o = cardfn::default_count_options();
  CHECK(o.budget == 1234);
  CHECK(o.witnesses == 2);
  CHECK(o.refinements == 8);

  setenv("CARDFN_BUDGET", "77", 1);
  o = cardfn::default_count_options();
  CHECK(o.budget == 77);
  CHECK(o.witnesses == 2);

  setenv("CARDFN_BUDGET", "lots", 1);
  CHECK(cli({"count", "--preset", "EX_2_6", "--target", "1"}).code == cardfn::kExitUsage);

  // Flags win over both.
  setenv("CARDFN_BUDGET", "1", 1);
  const auto spec = scratch("blocks.spec");
  write_file(spec, "tail.kind = blocks\nbase = 2\nsizes = \"8n\"\n");
  const auto target = deep_blocks_target();
  CHECK(cli({"count", "--spec", spec.string(), "--target", target}).code == cardfn::kExitBudget);
  CHECK(cli({"count", "--spec", spec.string(), "--target", target, "--budget", "100000"}).code != cardfn::kExitUsage);

  write_file(cfg, "{not json");
  unsetenv("CARDFN_BUDGET");
  CHECK(cli({"count", "--preset", "EX_2_6", "--target", "1"}).code == cardfn::kExitUsage);
  unsetenv("CARDFN_CONFIG");
  CHECK(cardfn::default_count_options().budget == cardfn::CountOptions{}.budget);
}
