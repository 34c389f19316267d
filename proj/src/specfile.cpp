#include "cardfn/specfile.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cardfn/error.hpp"

namespace cardfn {

namespace {

using nlohmann::json;

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Entry {
  Position key_pos;
  Position value_pos;
  std::string raw;  // value text
  json value;       // parsed value; bare tokens become strings
};

std::string_view trim(std::string_view s, std::size_t* skipped = nullptr) {
  std::size_t a = 0;
  while (a < s.size() && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  std::size_t b = s.size();
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  if (skipped) *skipped = a;
  return s.substr(a, b - a);
}

// Drops a trailing comment, respecting double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string canonical_key(std::string_view key) {
  std::string k(key);
  if (k.rfind("tail.", 0) == 0) k = k.substr(5);
  return k;
}

bool known_key(const std::string& k) {
  static const char* keys[] = {"label", "prefix", "kind", "c", "q", "coeffs", "base", "sizes", "pattern"};
  for (const char* key : keys) {
    if (k == key) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SeriesSpec run() {
    read_lines();
    SeriesSpec spec = build();
    check(spec);
    return spec;
  }

 private:
  [[noreturn]] void fail(Position p, const std::string& msg) const {
    throw ParseError(p.line, p.column, msg);
  }

  void read_lines() {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      parse_line(line_no, text_.substr(start, end - start));
      start = end + 1;
    }
  }

  void parse_line(std::size_t line_no, std::string_view line) {
    const std::string_view body = strip_comment(line);
    std::size_t lead = 0;
    const std::string_view content = trim(body, &lead);
    if (content.empty()) return;
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) fail({line_no, lead + 1}, "expected `key = value`");
    std::size_t key_skip = 0;
    const std::string_view key = trim(body.substr(0, eq), &key_skip);
    const Position key_pos{line_no, key_skip + 1};
    if (key.empty()) fail({line_no, eq + 1}, "missing key before `=`");
    const std::string k = canonical_key(key);
    if (!known_key(k)) fail(key_pos, "unknown key `" + std::string(key) + "`");
    if (entries_.count(k)) fail(key_pos, "duplicate key `" + std::string(key) + "`");
    std::size_t value_skip = 0;
    const std::string_view value = trim(body.substr(eq + 1), &value_skip);
    const Position value_pos{line_no, eq + 2 + value_skip};
    if (value.empty()) fail(value_pos, "missing value for `" + std::string(key) + "`");
    Entry e{key_pos, value_pos, std::string(value), {}};
    if (value.front() == '[' || value.front() == '"') {
      try {
        e.value = json::parse(value);
      } catch (const json::parse_error& err) {
        const std::size_t offset = err.byte > 0 ? err.byte - 1 : 0;
        std::string detail = err.what();
        const std::size_t colon = detail.find(": ", detail.find("column"));
        if (colon != std::string::npos) detail = detail.substr(colon + 2);
        fail({line_no, value_pos.column + offset}, "malformed value: " + detail);
      }
    } else {
      e.value = std::string(value);
    }
    entries_.emplace(k, std::move(e));
  }

  const Entry* find(const std::string& k) const {
    auto it = entries_.find(k);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const Entry& need(const std::string& k, Position where, const std::string& kind) const {
    const Entry* e = find(k);
    if (!e) fail(where, "tail kind " + kind + " needs key `" + k + "`");
    return *e;
  }

  // Column of the i-th string element of a flat array, best effort.
  Position element_pos(const Entry& e, const std::string& text, std::size_t from) const {
    const std::string needle = "\"" + text + "\"";
    const std::size_t at = e.raw.find(needle, from);
    if (at == std::string::npos) return e.value_pos;
    return {e.value_pos.line, e.value_pos.column + at + 1};
  }

  Rat rational(const json& v, Position where) const {
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_number_integer()) {
      text = v.dump();
    } else {
      fail(where, "expected a rational like \"p/q\"");
    }
    try {
      return parse_rat(text);
    } catch (const Error& err) {
      fail(where, err.what());
    }
  }

  Rat scalar(const Entry& e) const { return rational(e.value, e.value_pos); }

  std::vector<Rat> rationals(const Entry& e) const {
    if (!e.value.is_array()) fail(e.value_pos, "expected an array of rationals");
    std::vector<Rat> out;
    std::size_t cursor = 0;
    for (const auto& v : e.value) {
      Position p = e.value_pos;
      if (v.is_string()) {
        p = element_pos(e, v.get<std::string>(), cursor);
        cursor = p.column - e.value_pos.column + 1;
      }
      out.push_back(rational(v, p));
    }
    return out;
  }

  std::string text(const Entry& e) const {
    if (!e.value.is_string()) fail(e.value_pos, "expected a string");
    return e.value.get<std::string>();
  }

  std::uint64_t unsigned_int(const Entry& e) const {
    const Rat v = scalar(e);
    if (v.get_den() != 1 || v < 0 || !v.get_num().fits_ulong_p()) {
      fail(e.value_pos, "expected a nonnegative integer");
    }
    return v.get_num().get_ui();
  }

  BlockTerm block_term(const json& v, Position where) const {
    if (!v.is_string()) fail(where, "expected \"coeff@shift\"");
    const std::string s = v.get<std::string>();
    const std::size_t at = s.find('@');
    BlockTerm t;
    try {
      t.coeff = parse_rat(at == std::string::npos ? s : s.substr(0, at));
      if (at != std::string::npos) {
        const Rat shift = parse_rat(s.substr(at + 1));
        if (shift.get_den() != 1 || shift < 0 || shift > 64) fail(where, "shift must be an integer in [0, 64]");
        t.shift = static_cast<std::uint32_t>(shift.get_num().get_ui());
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      fail(where, err.what());
    }
    return t;
  }

  SeriesSpec build() {
    SeriesSpec spec;
    if (const Entry* e = find("label")) spec.label = text(*e);
    if (const Entry* e = find("prefix")) spec.prefix = rationals(*e);
    std::string kind = "zero";
    Position kind_pos{1, 1};
    if (const Entry* e = find("kind")) {
      kind = text(*e);
      kind_pos = e->value_pos;
    }
    auto reject = [&](std::initializer_list<const char*> keys) {
      for (const char* k : keys) {
        if (const Entry* e = find(k)) {
          fail(e->key_pos, "key `" + std::string(k) + "` does not apply to tail kind " + kind);
        }
      }
    };
    if (kind == "zero") {
      reject({"c", "q", "coeffs", "base", "sizes", "pattern"});
      spec.tail = ZeroTail{};
    } else if (kind == "geometric") {
      reject({"coeffs", "base", "sizes", "pattern"});
      spec.tail = GeometricTail{scalar(need("c", kind_pos, kind)), scalar(need("q", kind_pos, kind))};
    } else if (kind == "multigeometric") {
      reject({"c", "base", "sizes", "pattern"});
      spec.tail = MultigeometricTail{rationals(need("coeffs", kind_pos, kind)),
                                     scalar(need("q", kind_pos, kind))};
    } else if (kind == "blocks") {
      reject({"c", "q", "coeffs"});
      BlocksTail b;
      if (const Entry* e = find("base")) {
        const std::uint64_t base = unsigned_int(*e);
        if (base < 2 || base > 1000000) fail(e->value_pos, "block base must lie in [2, 1000000]");
        b.base = static_cast<std::uint32_t>(base);
      }
      const Entry& sizes = need("sizes", kind_pos, kind);
      try {
        b.sizes = parse_size_rule(sizes.value.is_string() ? sizes.value.get<std::string>() : sizes.raw);
      } catch (const Error& err) {
        fail(sizes.value_pos, err.what());
      }
      if (const Entry* e = find("pattern")) {
        if (!e->value.is_array() || e->value.empty()) fail(e->value_pos, "expected a nonempty array of entries");
        b.pattern.clear();
        for (const auto& entry : e->value) {
          if (!entry.is_array() || entry.empty()) fail(e->value_pos, "pattern entries are nonempty arrays");
          std::vector<BlockTerm> terms;
          for (const auto& t : entry) {
            const Position p = t.is_string() ? element_pos(*e, t.get<std::string>(), 0) : e->value_pos;
            terms.push_back(block_term(t, p));
          }
          b.pattern.push_back(std::move(terms));
        }
      }
      spec.tail = std::move(b);
    } else {
      fail(kind_pos, "unknown tail kind `" + kind + "`");
    }
    return spec;
  }

  // Semantic problems, reported at the most relevant key.
  void check(const SeriesSpec& spec) const {
    const auto report = validate(spec);
    if (report.valid) return;
    const std::string& problem = report.problems.front();
    auto at = [&](const char* k) -> Position {
      const Entry* e = find(k);
      if (e) return e->value_pos;
      if (const Entry* kind = find("kind")) return kind->value_pos;
      return {1, 1};
    };
    Position p = at("kind");
    if (problem.find("ratio") != std::string::npos) {
      p = at("q");
    } else if (problem.find("index") != std::string::npos) {
      p = at("prefix");
    } else if (problem.find("geometric coefficient") != std::string::npos) {
      p = at(std::holds_alternative<GeometricTail>(spec.tail) ? "c" : "coeffs");
    } else if (problem.find("block") != std::string::npos) {
      p = at(problem.find("pattern") != std::string::npos ? "pattern" : "base");
    }
    fail(p, problem);
  }

  std::string_view text_;
  std::map<std::string, Entry> entries_;
};

std::string quoted_list(const std::vector<Rat>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + to_string(values[i]) + "\"";
  }
  return out + "]";
}

}  // namespace

std::string render_size_rule(const SizeRule& rule) {
  if (rule.slope == 0) return std::to_string(rule.offset);
  std::string out = rule.slope == 1 ? "n" : std::to_string(rule.slope) + "n";
  if (rule.offset > 0) out += "+" + std::to_string(rule.offset);
  return out;
}

SizeRule parse_size_rule(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s += c;
  }
  auto digits = [](const std::string& d) -> std::uint64_t {
    if (d.empty() || d.size() > 9 || d.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorKind::Parse, "bad block size rule");
    }
    return std::stoull(d);
  };
  const std::size_t n = s.find('n');
  SizeRule rule;
  if (n == std::string::npos) rule = SizeRule{0, digits(s)};
  if (n != std::string::npos) {
    rule.slope = n == 0 ? 1 : digits(s.substr(0, n));
    const std::string rest = s.substr(n + 1);
    if (rest.empty()) {
      rule.offset = 0;
    } else if (rest[0] == '+') {
      rule.offset = digits(rest.substr(1));
    } else {
      throw Error(ErrorKind::Parse, "bad block size rule `" + std::string(text) + "`");
    }
  }
  if (rule.slope + rule.offset == 0) throw Error(ErrorKind::Parse, "block sizes must be positive");
  return rule;
}

SeriesSpec parse_spec(std::string_view text) { return Parser(text).run(); }

std::string render_spec(const SeriesSpec& spec) {
  std::ostringstream os;
  if (spec.label) os << "label = " << json(*spec.label).dump() << "\n";
  os << "prefix = " << quoted_list(spec.prefix) << "\n";
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ZeroTail>) {
          os << "tail.kind = zero\n";
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          os << "tail.kind = geometric\n";
          os << "tail.c = " << to_string(t.c) << "\n";
          os << "tail.q = " << to_string(t.q) << "\n";
        } else if constexpr (std::is_same_v<T, MultigeometricTail>) {
          os << "tail.kind = multigeometric\n";
          os << "tail.coeffs = " << quoted_list(t.coeffs) << "\n";
          os << "tail.q = " << to_string(t.q) << "\n";
        } else {
          os << "tail.kind = blocks\n";
          os << "tail.base = " << t.base << "\n";
          os << "tail.sizes = \"" << render_size_rule(t.sizes) << "\"\n";
          os << "tail.pattern = [";
          for (std::size_t e = 0; e < t.pattern.size(); ++e) {
            os << (e ? ", [" : "[");
            for (std::size_t i = 0; i < t.pattern[e].size(); ++i) {
              os << (i ? ", " : "") << "\"" << to_string(t.pattern[e][i].coeff) << "@"
                 << t.pattern[e][i].shift << "\"";
            }
            os << "]";
          }
          os << "]\n";
        }
      },
      spec.tail);
  return os.str();
}

SeriesSpec load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot read spec file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

}  // namespace cardfn
