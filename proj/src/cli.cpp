#include "cardfn/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardfn/constructions.hpp"
#include "cardfn/error.hpp"
#include "cardfn/specfile.hpp"
#include "cardfn/topology.hpp"

namespace cardfn {

namespace {

struct Cell {
  std::string tsv;
  std::string pretty;
  Cell(std::string s) : tsv(s), pretty(std::move(s)) {}  // NOLINT
  Cell(const char* s) : Cell(std::string(s)) {}          // NOLINT
  Cell(std::string t, std::string p) : tsv(std::move(t)), pretty(std::move(p)) {}
  Cell(const Cardinality& c) : tsv(c.to_string()), pretty(c.pretty()) {}  // NOLINT
};

std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

class Report {
 public:
  void row(std::vector<Cell> cells) { rows_.push_back(std::move(cells)); }
  void footer(std::string key, Cell value) { footer_.emplace_back(std::move(key), std::move(value)); }

  std::string render(bool pretty) const {
    std::ostringstream os;
    if (!pretty) {
      for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i].tsv;
        os << "\n";
      }
      for (const auto& [k, v] : footer_) os << "# " << k << "\t" << v.tsv << "\n";
      return os.str();
    }
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (width.size() < r.size()) width.resize(r.size(), 0);
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], display_width(r[i].pretty));
    }
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        line += r[i].pretty;
        if (i + 1 < r.size()) line += std::string(width[i] - display_width(r[i].pretty) + 2, ' ');
      }
      os << line << "\n";
    }
    if (!footer_.empty() && !rows_.empty()) os << "\n";
    for (const auto& [k, v] : footer_) os << k << ": " << v.pretty << "\n";
    return os.str();
  }

 private:
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, Cell>> footer_;
};

Cell cardinality_set(const std::set<Cardinality>& set) {
  std::string t = "{", p = "{";
  bool first = true;
  for (const auto& c : set) {
    if (!first) {
      t += ", ";
      p += ", ";
    }
    first = false;
    t += c.to_string();
    p += c.pretty();
  }
  return {t + "}", p + "}"};
}

std::string join(const std::vector<Rat>& values, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? sep : "") + to_string(values[i]);
  return out;
}

std::vector<Rat> parse_list(const std::string& text) {
  std::vector<Rat> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    const auto b = item.find_last_not_of(' ');
    if (a == std::string::npos) throw Error(ErrorKind::Parse, "empty list item in `" + text + "`");
    out.push_back(parse_rat(item.substr(a, b - a + 1)));
  }
  return out;
}

const char* yes_no(bool v) { return v ? "1" : "0"; }

struct Common {
  std::string spec_path;
  std::string preset_name;
  std::string format = "tsv";
  std::string out_path;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> witnesses;
};

struct Outcome {
  Report report;
  bool limited = false;
  std::string raw;  // verbatim output instead of a report
};

SeriesSpec load(const Common& c) {
  if (!c.spec_path.empty() && !c.preset_name.empty()) {
    throw Error(ErrorKind::Parse, "give either --spec or --preset, not both");
  }
  if (!c.spec_path.empty()) return load_spec_file(c.spec_path);
  if (!c.preset_name.empty()) return preset(c.preset_name);
  throw Error(ErrorKind::Parse, "a series is required: use --spec FILE or --preset NAME");
}

CountOptions options_for(const Common& c) {
  CountOptions o = default_count_options();
  if (c.budget) o.budget = *c.budget;
  if (c.witnesses) o.witnesses = *c.witnesses;
  return o;
}

}  // namespace

CountOptions default_count_options() {
  CountOptions o;
  if (const char* path = std::getenv("CARDFN_CONFIG"); path && *path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, std::string("cannot read config file ") + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("config file ") + path + ": " + e.what());
    }
    try {
      if (j.contains("budget")) o.budget = j.at("budget").get<std::size_t>();
      if (j.contains("bit_cap")) o.bit_cap = j.at("bit_cap").get<std::size_t>();
      if (j.contains("witnesses")) o.witnesses = j.at("witnesses").get<std::size_t>();
      if (j.contains("refinements")) o.refinements = j.at("refinements").get<unsigned>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("config file ") + path + ": " + e.what());
    }
  }
  if (const char* b = std::getenv("CARDFN_BUDGET"); b && *b) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(b, &used);
      if (used != std::string(b).size()) throw std::invalid_argument(b);
      o.budget = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, std::string("CARDFN_BUDGET is not a number: ") + b);
    }
  }
  return o;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact representation counting for subset sums of convergent series", "cardfn"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_series) {
    if (needs_series) {
      sub->add_option("--spec", common.spec_path, "series spec file");
      sub->add_option("--preset", common.preset_name, "catalog preset, e.g. GN_CANTORVAL");
    }
    sub->add_option("--format", common.format, "tsv or pretty")->check(CLI::IsMember({"tsv", "pretty"}));
    sub->add_option("--out", common.out_path, "write the report to FILE");
    sub->add_option("--budget", common.budget, "state or search-node budget");
    sub->add_option("--witnesses", common.witnesses, "representations to list");
  };

  std::vector<std::string> targets;
  std::size_t depth = 0;
  std::size_t limit = 4;
  std::string op, multipliers, tau, atoms, range_text = "1,4";
  std::size_t m = 1, max_atoms = 5, denominators = 12;
  bool cover_only = false, no_filter = false;

  auto* classify_cmd = app.add_subcommand("classify", "topological type of the range");
  add_common(classify_cmd, true);
  auto* props_cmd = app.add_subcommand("props", "quick/slow convergence and properties (A), (B)");
  add_common(props_cmd, true);
  auto* count_cmd = app.add_subcommand("count", "number of representations of each target");
  add_common(count_cmd, true);
  count_cmd->add_option("--target", targets, "target value p/q (repeatable)")->required();
  auto* enum_cmd = app.add_subcommand("enumerate", "list representations of a target");
  add_common(enum_cmd, true);
  enum_cmd->add_option("--target", targets, "target value p/q")->required()->expected(1);
  enum_cmd->add_option("--limit", limit, "maximum number of representations");
  auto* scan_cmd = app.add_subcommand("scan", "count all finite subset sums up to a depth");
  add_common(scan_cmd, true);
  scan_cmd->add_option("--depth", depth, "number of leading terms")->default_val(8);
  scan_cmd->add_option("--target", targets, "extra target (repeatable)");
  auto* gaps_cmd = app.add_subcommand("gaps", "gaps of the depth-limited interval cover");
  add_common(gaps_cmd, true);
  gaps_cmd->add_option("--depth", depth, "cover depth")->default_val(6);
  gaps_cmd->add_flag("--cover", cover_only, "print the cover intervals instead");
  auto* expand_cmd = app.add_subcommand("expand", "quasiregular expansion of a point");
  add_common(expand_cmd, true);
  expand_cmd->add_option("--target", targets, "point x p/q")->required()->expected(1);
  expand_cmd->add_option("--depth", depth, "number of digits")->default_val(32);
  auto* construct_cmd = app.add_subcommand("construct", "build a new series spec");
  add_common(construct_cmd, true);
  construct_cmd
      ->add_option("--op", op,
                   "interleave, double, add-total, add-two-totals, add-m-totals, add-m-double-totals, "
                   "prepend or product")
      ->check(CLI::IsMember({"interleave", "double", "add-total", "add-two-totals", "add-m-totals",
                             "add-m-double-totals", "prepend", "product"}));
  construct_cmd->add_option("--m", m, "repetition count for the add-m operations");
  construct_cmd->add_option("--multipliers", multipliers, "comma-separated multipliers for prepend");
  construct_cmd->add_option("--tau", tau, "comma-separated atoms of the finite factor for product");
  auto* finite_cmd = app.add_subcommand("finite-range", "exact cardinal function of a finite measure");
  add_common(finite_cmd, false);
  finite_cmd->add_option("--atoms", atoms, "comma-separated atoms")->required();
  auto* search_cmd = app.add_subcommand("search-range", "search finite measures with a given range");
  add_common(search_cmd, false);
  search_cmd->add_option("--range", range_text, "target range, e.g. 1,4");
  search_cmd->add_option("--max-atoms", max_atoms, "largest number of atoms");
  search_cmd->add_option("--denominators", denominators, "largest atom denominator");
  search_cmd->add_flag("--no-filter", no_filter, "disable the distinct-atom pruning");

  std::vector<const char*> argv{"cardfn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Outcome result;
  try {
    if (classify_cmd->parsed()) {
      const auto spec = load(common);
      const auto c = classify(spec);
      result.report.row({"class", to_string(c.kind)});
      if (c.kind == TopologyClass::Kind::IntervalUnion) {
        result.report.row({"components", std::to_string(c.components)});
        for (const auto& iv : c.intervals) result.report.row({"interval", to_string(iv.lo), to_string(iv.hi)});
      }
      result.report.footer("decided_from", std::to_string(c.decided_from));
    } else if (props_cmd->parsed()) {
      const auto spec = load(common);
      const auto p = convergence_profile(spec);
      result.report.row({"quick", to_string(p.quick)});
      result.report.row({"slow_from", p.slow_from ? std::to_string(*p.slow_from) : "never"});
      result.report.row({"A", to_string(p.property_A)});
      result.report.row({"B", to_string(p.property_B)});
      for (const auto& [k, v] : p.witnesses) result.report.footer("witness " + k, std::to_string(v));
      result.limited = p.quick == Decision::Undecided || p.property_A == Decision::Undecided ||
                       p.property_B == Decision::Undecided;
    } else if (count_cmd->parsed()) {
      const auto spec = load(common);
      auto opts = options_for(common);
      std::map<Rat, CountResult> results;
      for (const auto& t : targets) {
        const Rat v = parse_rat(t);
        if (!results.count(v)) results.emplace(v, count(spec, v, opts));
      }
      std::size_t states = 0;
      bool exceeded = false;
      for (const auto& [t, r] : results) {
        result.report.row({to_string(t), r.cardinality});
        states += r.states;
        exceeded = exceeded || r.budget_exceeded;
        if (!r.cardinality.is_exact()) result.limited = true;
      }
      result.report.footer("states", std::to_string(states));
      result.report.footer("budget_exceeded", yes_no(exceeded));
      for (const auto& [t, r] : results) {
        for (const auto& w : r.witnesses) result.report.footer("witness", to_string(t) + "\t" + to_string(w));
        if (r.truncated) result.report.footer("truncated", to_string(t));
        if (!r.note.empty()) result.report.footer("note", to_string(t) + "\t" + r.note);
      }
    } else if (enum_cmd->parsed()) {
      const auto spec = load(common);
      const Rat t = parse_rat(targets.at(0));
      const auto r = enumerate_reps(spec, t, limit, options_for(common));
      for (std::size_t i = 0; i < r.reps.size(); ++i) {
        result.report.row({std::to_string(i + 1), to_string(r.reps[i])});
      }
      result.report.footer("cardinality", r.cardinality);
      result.report.footer("truncated", yes_no(r.truncated));
      result.limited = !r.cardinality.is_exact();
    } else if (scan_cmd->parsed()) {
      const auto spec = load(common);
      std::vector<Rat> extra;
      for (const auto& t : targets) extra.push_back(parse_rat(t));
      const auto r = range_scan(spec, depth, options_for(common), extra);
      for (const auto& [t, e] : r.entries) {
        std::vector<Cell> row{to_string(t), e.cardinality};
        if (!e.error.empty()) row.push_back(e.error);
        result.report.row(std::move(row));
      }
      result.report.footer("cardinality_set", cardinality_set(r.cardinality_set));
      result.report.footer("targets", std::to_string(r.entries.size()));
      result.report.footer("states", std::to_string(r.states));
      result.report.footer("budget_limited", yes_no(r.budget_limited));
      result.limited = r.budget_limited;
    } else if (gaps_cmd->parsed()) {
      const auto spec = load(common);
      if (cover_only) {
        for (const auto& iv : cover(spec, depth)) result.report.row({to_string(iv.lo), to_string(iv.hi)});
      } else {
        const auto g = gaps(spec, depth);
        for (std::size_t i = 0; i < g.gaps.size(); ++i) {
          const auto& gap = g.gaps[i];
          std::vector<Cell> row{to_string(gap.lo), to_string(gap.hi), gap.certified ? "certified" : "potential"};
          if (g.leftmost_longest && *g.leftmost_longest == i) row.push_back("leftmost-longest");
          result.report.row(std::move(row));
        }
        result.report.footer("gaps", std::to_string(g.gaps.size()));
        if (g.leftmost_longest) {
          result.report.footer("form", g.form_index ? "(r_k, x_k) k=" + std::to_string(*g.form_index) : "none");
        }
      }
    } else if (expand_cmd->parsed()) {
      const auto spec = load(common);
      const auto e = quasiregular_expand(spec, parse_rat(targets.at(0)), depth);
      std::string digits;
      for (bool d : e.digits) digits += d ? '1' : '0';
      result.report.row({"digits", digits});
      result.report.row({"closed", yes_no(e.closed)});
      if (e.closed) result.report.row({"representation", to_string(e.rep)});
    } else if (construct_cmd->parsed()) {
      if (op == "product") {
        if (tau.empty()) throw Error(ErrorKind::Parse, "--tau is required for product");
        result.raw = render_spec(product(parse_list(tau), load(common)));
      } else {
        const auto spec = load(common);
        SeriesSpec built = spec;
        std::string note;
        if (op == "interleave") {
          built = interleave(spec);
        } else if (op == "double") {
          auto d = double_terms(spec);
          built = d.spec;
          note = std::string("# continuum_on_interior = ") + yes_no(d.continuum_on_interior) + "\n";
        } else if (op == "add-total") {
          built = add_total(spec);
        } else if (op == "add-two-totals") {
          built = add_two_totals(spec);
        } else if (op == "add-m-totals") {
          built = add_m_totals(spec, m);
        } else if (op == "add-m-double-totals") {
          built = add_m_double_totals(spec, m);
        } else if (op == "prepend") {
          if (multipliers.empty()) throw Error(ErrorKind::Parse, "--multipliers is required for prepend");
          built = prepend_scaled(spec, parse_list(multipliers));
        }
        result.raw = note + render_spec(built);
      }
    } else if (finite_cmd->parsed()) {
      const auto r = finite_range(parse_list(atoms));
      std::uint64_t subsets = 0;
      for (const auto& [v, n] : r.counts) {
        result.report.row({to_string(v), std::to_string(n)});
        subsets += n;
      }
      std::set<Cardinality> range;
      for (auto n : r.range) range.insert(Cardinality::fin(n));
      result.report.footer("range", cardinality_set(range));
      result.report.footer("subsets", std::to_string(subsets));
    } else if (search_cmd->parsed()) {
      std::set<std::uint64_t> target;
      for (const auto& v : parse_list(range_text)) {
        if (v.get_den() != 1 || v <= 0) throw Error(ErrorKind::Parse, "range values must be positive integers");
        target.insert(v.get_num().get_ui());
      }
      SearchOptions so;
      so.distinct_filter = !no_filter;
      const auto found = search_finite_ranges(target, max_atoms, denominators, so);
      for (const auto& atoms_found : found) result.report.row({join(atoms_found)});
      result.report.footer("matches", std::to_string(found.size()));
    }
  } catch (const Error& e) {
    err << "cardfn: " << e.what() << "\n";
    const bool budget = e.kind() == ErrorKind::BudgetExceeded || e.kind() == ErrorKind::UndecidableComparison;
    return budget ? kExitBudget : kExitUsage;
  }

  const std::string text = result.raw.empty() ? result.report.render(common.format == "pretty") : result.raw;
  if (!common.out_path.empty()) {
    std::ofstream f(common.out_path, std::ios::binary);
    if (!f) {
      err << "cardfn: cannot write " << common.out_path << "\n";
      return kExitUsage;
    }
    f << text;
  } else {
    out << text;
  }
  return result.limited ? kExitBudget : kExitOk;
}

}  // namespace cardfn
