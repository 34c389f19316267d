#include "cardfn/counter.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "cardfn/detail/blocks.hpp"
#include "cardfn/error.hpp"

namespace cardfn {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  return __builtin_add_overflow(a, b, &out) ? kSaturated : out;
}

struct StateKey {
  std::uint32_t pos;
  Rat u;
  bool operator==(const StateKey& o) const { return pos == o.pos && u == o.u; }
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const noexcept {
    return RatHash{}(k.u) * 1000003u ^ k.pos;
  }
};

Rat binomial(std::uint64_t n, std::uint64_t k) {
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return Rat(out);
}

std::uint64_t to_u64(const Int& v) {
  if (v > Int(std::to_string(kSaturated))) return kSaturated;
  return v.get_ui();
}

// Structure of a state graph shared by counting, witnesses and the dense
// witness walk.
struct Analysis {
  std::vector<std::int32_t> comp;
  std::vector<bool> cyclic;  // lies on a cycle (closures included)
  std::vector<bool> live;
  std::vector<std::int32_t> order;  // children before parents
  Cardinality cardinality = Cardinality::fin(0);
};

std::vector<std::int32_t> children(const StateGraph::Node& n) {
  std::vector<std::int32_t> out;
  if (n.skip != StateGraph::kNone) out.push_back(n.skip);
  if (n.take != StateGraph::kNone) out.push_back(n.take);
  return out;
}

Analysis analyze(const StateGraph& g) {
  const auto& nodes = g.nodes();
  const std::size_t N = nodes.size();
  Analysis a;
  a.comp.assign(N, -1);
  a.cyclic.assign(N, false);
  a.live.assign(N, false);

  // Iterative Tarjan.
  std::vector<std::int32_t> index(N, -1), low(N, 0);
  std::vector<bool> on_stack(N, false);
  std::vector<std::int32_t> stack;
  std::int32_t counter = 0, comps = 0;
  struct Frame {
    std::int32_t v;
    int edge;
  };
  for (std::size_t root = 0; root < N; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{static_cast<std::int32_t>(root), 0}};
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<std::int32_t>(root));
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      const auto& node = nodes[f.v];
      std::int32_t next = StateGraph::kNone;
      while (f.edge < 2 && next == StateGraph::kNone) {
        next = f.edge == 0 ? node.skip : node.take;
        ++f.edge;
      }
      if (next != StateGraph::kNone) {
        if (index[next] == -1) {
          index[next] = low[next] = counter++;
          stack.push_back(next);
          on_stack[next] = true;
          call.push_back({next, 0});
        } else if (on_stack[next]) {
          low[f.v] = std::min(low[f.v], index[next]);
        }
        continue;
      }
      const std::int32_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::int32_t> members;
        std::int32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          a.comp[w] = comps;
          members.push_back(w);
        } while (w != v);
        const bool self_loop = nodes[v].skip == v || nodes[v].take == v;
        if (members.size() > 1 || self_loop) {
          for (auto m : members) a.cyclic[m] = true;
        }
        for (auto m : members) a.order.push_back(m);
        ++comps;
      }
    }
  }
  a.cyclic[StateGraph::kZero] = a.cyclic[StateGraph::kFull] = true;

  auto certified = [&](std::int32_t v) {
    if (a.cyclic[v]) return true;
    auto from = g.filled_from_pos();
    return v > StateGraph::kFull && from && nodes[v].pos >= *from;
  };
  for (auto v : a.order) {
    if (certified(v)) {
      a.live[v] = true;
      continue;
    }
    for (auto c : children(nodes[v])) {
      if (a.live[c]) a.live[v] = true;
    }
  }

  auto in_cycle_edges = [&](std::int32_t v) {
    int inside = 0, live_out = 0;
    for (auto c : children(nodes[v])) {
      if (!a.live[c]) continue;
      ++live_out;
      if (a.comp[c] == a.comp[v] && a.cyclic[c]) ++inside;
    }
    return std::pair{inside, live_out};
  };

  bool continuum = false, branching_cycle = false;
  for (std::size_t v = 2; v < N; ++v) {
    if (!a.cyclic[v] || !a.live[v]) continue;
    auto [inside, live_out] = in_cycle_edges(static_cast<std::int32_t>(v));
    if (inside >= 2) continuum = true;
    if (live_out >= 2) branching_cycle = true;
  }
  if (continuum) {
    a.cardinality = Cardinality::continuum();
    return a;
  }
  if (branching_cycle) {
    a.cardinality = g.complete() ? Cardinality::omega() : Cardinality::infinite();
    return a;
  }

  // No cycle has a live exit, so each live cyclic node carries one path.
  std::vector<std::uint64_t> paths(N, 0);
  for (auto v : a.order) {
    if (!a.live[v]) continue;
    if (a.cyclic[v]) {
      paths[v] = 1;
      continue;
    }
    std::uint64_t sum = 0;
    for (auto c : children(nodes[v])) {
      if (a.live[c]) sum = sat_add(sum, paths[c]);
    }
    paths[v] = std::max<std::uint64_t>(sum, 1);
  }
  const std::uint64_t k = a.live[g.start()] ? paths[g.start()] : 0;
  if (g.complete() && k != kSaturated) {
    a.cardinality = Cardinality::fin(k);
  } else {
    a.cardinality = Cardinality::at_least(k);
  }
  return a;
}

Representation make_rep(const std::vector<bool>& word, TailAction action, std::uint64_t from,
                        std::vector<bool> cycle = {}) {
  Representation rep;
  const std::uint64_t limit = action == TailAction::None ? word.size() : from - 1;
  for (std::uint64_t i = 0; i < limit; ++i) {
    if (word[i]) rep.support.push_back(i + 1);
  }
  rep.action = action;
  rep.from = action == TailAction::None ? 0 : from;
  rep.cycle = std::move(cycle);
  return rep;
}

void sort_unique(std::vector<Representation>& reps) {
  std::sort(reps.begin(), reps.end(),
            [](const auto& a, const auto& b) { return compare_words(a, b) < 0; });
  reps.erase(std::unique(reps.begin(), reps.end(),
                         [](const auto& a, const auto& b) { return compare_words(a, b) == 0; }),
             reps.end());
}

std::vector<Representation> lassos(const StateGraph& g, const std::vector<bool>& live,
                                   std::size_t cap, std::size_t max_collect) {
  const auto& nodes = g.nodes();
  std::vector<Representation> out;
  const std::int32_t start = g.start();
  if (start == StateGraph::kNone || !live[start]) return out;
  if (start == StateGraph::kZero) return {make_rep({}, TailAction::None, 0)};
  if (start == StateGraph::kFull) return {make_rep({}, TailAction::AllFrom, 1)};
  if (!nodes[start].explored) return out;

  std::vector<std::vector<std::size_t>> occurrences(nodes.size());
  struct Frame {
    std::int32_t v;
    int edge;
  };
  std::vector<Frame> stack{{start, 0}};
  occurrences[start].push_back(0);
  std::vector<bool> word;
  std::size_t steps = 0;
  const std::size_t max_steps = 400000;
  while (!stack.empty() && out.size() < max_collect && steps < max_steps) {
    ++steps;
    auto& f = stack.back();
    if (f.edge >= 2) {
      occurrences[f.v].pop_back();
      stack.pop_back();
      if (!word.empty()) word.pop_back();
      continue;
    }
    const bool take = f.edge == 1;
    const std::int32_t c = take ? nodes[f.v].take : nodes[f.v].skip;
    ++f.edge;
    if (c == StateGraph::kNone || !live[c]) continue;
    word.push_back(take);
    if (c == StateGraph::kZero) {
      out.push_back(make_rep(word, TailAction::None, 0));
    } else if (c == StateGraph::kFull) {
      out.push_back(make_rep(word, TailAction::AllFrom, word.size() + 1));
    } else {
      if (!occurrences[c].empty()) {
        const std::size_t d = occurrences[c].back();
        std::vector<bool> cyc(word.begin() + static_cast<std::ptrdiff_t>(d), word.end());
        out.push_back(make_rep(word, TailAction::Cycle, d + 1, std::move(cyc)));
      }
      if (occurrences[c].size() < cap && nodes[c].explored) {
        occurrences[c].push_back(word.size());
        stack.push_back({c, 0});
        continue;
      }
    }
    word.pop_back();
  }
  return out;
}

// Tail position bookkeeping for exact-remainder specs.
struct Layout {
  std::uint64_t P = 0;
  std::optional<SelfSimilarTail> ss;

  // Normalization exponent j for index n (1-based), zero inside the prefix.
  std::uint64_t block_of(std::uint64_t n) const {
    return n <= P ? 0 : (n - P - 1) / ss->period();
  }
  std::uint32_t phase_of(std::uint64_t n) const {
    return static_cast<std::uint32_t>(P + (n - P - 1) % ss->period());
  }
};

// Exact x_n > r_n status for all n, evaluated by prefix checks and one
// comparison per tail phase.
struct Dominance {
  bool any_strict_slow = false;  // some n with x_n < r_n (infinitely many if in tail)
  bool tail_strict_slow = false;
  bool all_slow = true;          // x_n <= r_n for every n
  bool quick = true;             // x_n > r_n for every n
};

Dominance dominance(const SeriesSpec& spec) {
  Dominance d;
  const std::uint64_t P = spec.prefix.size();
  auto ss = self_similar(spec.tail);
  auto note = [&](const Rat& x, const Rat& r, bool tail) {
    if (x > r) d.all_slow = false;
    if (x <= r) d.quick = false;
    if (x < r) {
      d.any_strict_slow = true;
      if (tail) d.tail_strict_slow = true;
    }
  };
  for (std::uint64_t n = 1; n <= P; ++n) note(term(spec, n), exact_remainder(spec, n), false);
  if (ss) {
    for (std::size_t s = 0; s < ss->period(); ++s) note(ss->coeffs[s], ss->mass_from(s + 1), true);
  }
  return d;
}

}  // namespace

bool Representation::takes(std::uint64_t n) const {
  if (action != TailAction::None && n >= from) {
    if (action == TailAction::AllFrom) return true;
    return cycle[(n - from) % cycle.size()];
  }
  return std::binary_search(support.begin(), support.end(), n);
}

Rat representation_sum(const SeriesSpec& spec, const Representation& rep) {
  Rat sum = 0;
  for (auto n : rep.support) sum += term(spec, n);
  switch (rep.action) {
    case TailAction::None:
      break;
    case TailAction::AllFrom:
      sum += exact_remainder(spec, rep.from - 1);
      break;
    case TailAction::Cycle: {
      auto ss = self_similar(spec.tail);
      if (!ss) throw Error(ErrorKind::Unsupported, "cycle on a tail without self-similarity");
      const std::uint64_t L = rep.cycle.size();
      if (rep.from <= spec.prefix.size() || L % ss->period() != 0) {
        throw Error(ErrorKind::Invalid, "cycle does not align with the tail period");
      }
      Rat first = 0;
      for (std::uint64_t i = 0; i < L; ++i) {
        if (rep.cycle[i]) first += term(spec, rep.from + i);
      }
      sum += first / (1 - pow(ss->q, L / ss->period()));
      break;
    }
  }
  return sum;
}

int compare_words(const Representation& a, const Representation& b) {
  auto pre = [](const Representation& r) -> std::uint64_t {
    std::uint64_t m = r.support.empty() ? 0 : r.support.back();
    if (r.action != TailAction::None) m = std::max<std::uint64_t>(m, r.from);
    return m;
  };
  auto period = [](const Representation& r) -> std::uint64_t {
    return r.action == TailAction::Cycle ? r.cycle.size() : 1;
  };
  const std::uint64_t n_max = std::max(pre(a), pre(b)) + period(a) * period(b) + 1;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const bool x = a.takes(n), y = b.takes(n);
    if (x != y) return x ? 1 : -1;
  }
  return 0;
}

std::string to_string(const Representation& rep) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < rep.support.size(); ++i) os << (i ? "," : "") << rep.support[i];
  os << "}";
  if (rep.action == TailAction::AllFrom) {
    os << "+all>=" << rep.from;
  } else if (rep.action == TailAction::Cycle) {
    os << "+cycle@" << rep.from << ":";
    for (bool b : rep.cycle) os << (b ? '1' : '0');
  }
  return os.str();
}

StateGraph build_graph(const SeriesSpec& spec, const Rat& t, const CountOptions& options) {
  require_valid(spec);
  if (!has_exact_remainders(spec)) {
    throw Error(ErrorKind::Unsupported, "state graphs need an exact-remainder tail");
  }
  const Rat tot = total(spec).value();
  if (t < 0 || t > tot) {
    throw Error(ErrorKind::TargetOutOfRange,
                "target " + to_string(t) + " outside [0, " + to_string(tot) + "]");
  }
  StateGraph g;
  const std::uint32_t P = static_cast<std::uint32_t>(spec.prefix.size());
  auto ss = self_similar(spec.tail);
  const std::uint32_t p = ss ? static_cast<std::uint32_t>(ss->period()) : 0;
  g.prefix_size_ = P;
  g.period_ = p;
  if (auto n = interval_filling_from(spec)) g.filled_from_pos_ = static_cast<std::uint32_t>(*n - 1);

  std::vector<Rat> R(P + std::max<std::uint32_t>(p, 1));
  std::vector<Rat> x(P + p);
  for (std::uint32_t pos = 0; pos < P; ++pos) {
    R[pos] = exact_remainder(spec, pos);
    x[pos] = spec.prefix[pos];
  }
  for (std::uint32_t s = 0; s < p; ++s) {
    R[P + s] = ss->mass_from(s);
    x[P + s] = ss->coeffs[s];
  }
  if (!ss) R[P] = 0;

  g.nodes_.resize(2);
  g.nodes_[0].pos = g.nodes_[1].pos = 0;
  std::unordered_map<StateKey, std::int32_t, StateKeyHash> index;
  std::deque<std::int32_t> queue;

  auto child = [&](std::uint32_t pos, Rat u) -> std::int32_t {
    if (u == 0) return StateGraph::kZero;
    if (u == R[pos]) return StateGraph::kFull;
    StateKey key{pos, u};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const auto id = static_cast<std::int32_t>(g.nodes_.size());
    StateGraph::Node node;
    node.pos = pos;
    node.u = std::move(u);
    g.nodes_.push_back(std::move(node));
    index.emplace(std::move(key), id);
    queue.push_back(id);
    return id;
  };

  g.start_ = child(0, t);
  while (!queue.empty()) {
    const std::int32_t id = queue.front();
    queue.pop_front();
    if (g.nodes_.size() - 2 > options.budget) {
      g.complete_ = false;
      break;
    }
    const Rat u = g.nodes_[id].u;
    if (bit_size(u) > options.bit_cap) {
      g.complete_ = false;
      g.bit_cap_hit_ = true;
      continue;
    }
    const std::uint32_t pos = g.nodes_[id].pos;
    std::uint32_t next = pos + 1;
    bool wrap = false;
    if (pos >= P && pos + 1 == P + p) {
      next = P;
      wrap = true;
    }
    auto normalize = [&](Rat v) { return wrap ? Rat(v / ss->q) : v; };
    Rat skip_u = normalize(u);
    std::int32_t skip = StateGraph::kNone, take = StateGraph::kNone;
    if (skip_u <= R[next]) skip = child(next, std::move(skip_u));
    Rat rest = u - x[pos];
    if (rest >= 0) {
      Rat take_u = normalize(rest);
      if (take_u <= R[next]) take = child(next, std::move(take_u));
    }
    auto& node = g.nodes_[id];
    node.skip = skip;
    node.take = take;
    node.explored = true;
  }
  return g;
}

PathClass classify_paths(const StateGraph& graph) {
  auto a = analyze(graph);
  return {a.cardinality, a.live};
}

std::vector<Representation> graph_witnesses(const StateGraph& graph, const PathClass& cls,
                                            std::size_t limit) {
  if (limit == 0) return {};
  std::vector<Representation> found;
  const std::size_t max_cap = cls.cardinality.is_infinite() ? 4 : 1;
  for (std::size_t cap = 1; cap <= max_cap; ++cap) {
    auto reps = lassos(graph, cls.live, cap, 4 * limit + 16);
    found.insert(found.end(), reps.begin(), reps.end());
    sort_unique(found);
    if (found.size() >= limit) break;
  }
  if (found.size() > limit) found.resize(limit);
  return found;
}

namespace {

// Bounded search over block tails: prefix items one by one, then for each
// block and pattern entry the number of chosen copies.
class BlockSearch {
 public:
  BlockSearch(const SeriesSpec& spec, const BlocksTail& tail, const CountOptions& options)
      : spec_(spec), tail_(tail), options_(options), P_(spec.prefix.size()) {
    suffix_.assign(P_ + 1, Rat(0));
    for (std::uint64_t i = P_; i-- > 0;) suffix_[i] = suffix_[i + 1] + spec.prefix[i];
  }

  CountResult run(const Rat& t) {
    CountResult result;
    if (t == 0) {
      result.cardinality = Cardinality::fin(1);
      result.witnesses.push_back(Representation{});
      return result;
    }
    visit(Stage{0, 1, 0}, t, Int(1));
    const std::uint64_t k = to_u64(closed_);
    result.cardinality = open_ || k == kSaturated ? Cardinality::at_least(k) : Cardinality::fin(k);
    if (k == kSaturated) result.note = "count does not fit in 64 bits";
    result.states = visited_;
    result.budget_exceeded = budget_hit_;
    if (undecided_) result.note = "unresolved remainder comparison on some branch";
    sort_unique(witnesses_);
    if (witnesses_.size() > options_.witnesses) witnesses_.resize(options_.witnesses);
    result.witnesses = std::move(witnesses_);
    result.truncated = open_ || closed_ > Int(std::to_string(result.witnesses.size()));
    return result;
  }

 private:
  struct Stage {
    std::uint64_t prefix;  // < P: prefix item; == P: block stage
    std::uint64_t block;
    std::size_t entry;
  };
  struct Choice {
    Stage stage;
    std::uint64_t count;
  };

  Stage next(const Stage& s) const {
    if (s.prefix < P_) return {s.prefix + 1, 1, 0};
    if (s.entry + 1 < tail_.pattern.size()) return {P_, s.block, s.entry + 1};
    return {P_, s.block + 1, 0};
  }

  // Enclosure of the mass that follows stage s at refinement level `level`.
  std::pair<Rat, Rat> rest_after(const Stage& s, unsigned level) const {
    if (s.prefix < P_) {
      auto enc = detail::tail_enclosure(tail_, 0, level);
      return {suffix_[s.prefix + 1] + enc.lo, suffix_[s.prefix + 1] + enc.hi};
    }
    Rat exact = 0;
    const Rat copies(Int(std::to_string(tail_.sizes.at(s.block))));
    for (std::size_t e = s.entry + 1; e < tail_.pattern.size(); ++e) {
      exact += copies * detail::entry_value(tail_, s.block, e);
    }
    for (unsigned l = 1; l <= level; ++l) exact += detail::block_sum(tail_, s.block + l);
    return {exact, exact + detail::tail_bound_after(tail_, s.block + level)};
  }

  // -1: below the remaining mass, 1: above it. Throws when unresolved.
  int against_rest(const Rat& u, const Stage& s) const {
    for (unsigned level = 0; level <= options_.refinements; ++level) {
      auto [lo, hi] = rest_after(s, level);
      if (u <= lo) return -1;
      if (u > hi) return 1;
    }
    throw Error(ErrorKind::UndecidableComparison, "remainder comparison unresolved");
  }

  std::uint64_t first_index(const Stage& s) const {
    if (s.prefix < P_) return s.prefix + 1;
    std::uint64_t idx = P_;
    for (std::uint64_t n = 1; n < s.block; ++n) idx += detail::entries_in_block(tail_, n);
    return idx + s.entry + 1;
  }

  void record(const std::vector<Choice>& path) {
    std::vector<std::uint64_t> support;
    expand_copies(path, 0, support);
  }

  // Every choice of which copies to take, until the witness pool is full.
  void expand_copies(const std::vector<Choice>& path, std::size_t i, std::vector<std::uint64_t>& support) {
    if (witnesses_.size() >= 4 * options_.witnesses + 16) return;
    if (i == path.size()) {
      Representation rep;
      rep.support = support;
      std::sort(rep.support.begin(), rep.support.end());
      witnesses_.push_back(std::move(rep));
      return;
    }
    const auto& c = path[i];
    if (c.count == 0) {
      expand_copies(path, i + 1, support);
      return;
    }
    if (c.stage.prefix < P_) {
      support.push_back(c.stage.prefix + 1);
      expand_copies(path, i + 1, support);
      support.pop_back();
      return;
    }
    const std::uint64_t copies = tail_.sizes.at(c.stage.block);
    const std::uint64_t base = first_index(c.stage);
    const std::uint64_t E = tail_.pattern.size();
    std::vector<bool> mask(copies, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(c.count), true);
    do {
      const std::size_t mark = support.size();
      for (std::uint64_t k = 0; k < copies; ++k) {
        if (mask[k]) support.push_back(base + k * E);
      }
      expand_copies(path, i + 1, support);
      support.resize(mark);
      if (witnesses_.size() >= 4 * options_.witnesses + 16) return;
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }

  void visit(const Stage& s, const Rat& u, const Int& mult) {
    // Past the budget, keep going only until the first branch closes.
    if (++visited_ > options_.budget && (closed_ > 0 || visited_ > 16 * options_.budget + 1024)) {
      open_ = true;
      budget_hit_ = true;
      return;
    }
    Rat value;
    std::uint64_t max_count;
    if (s.prefix < P_) {
      value = spec_.prefix[s.prefix];
      max_count = 1;
    } else {
      value = detail::entry_value(tail_, s.block, s.entry);
      max_count = tail_.sizes.at(s.block);
    }
    Rat ratio = u / value;
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
    std::uint64_t top = fl > Int(std::to_string(max_count)) ? max_count : fl.get_ui();
    for (std::uint64_t c = top + 1; c-- > 0;) {
      Rat rest = u - Rat(Int(std::to_string(c))) * value;
      const Int m = mult * (s.prefix < P_ ? Int(1) : Int(binomial(max_count, c).get_num()));
      path_.push_back({s, c});
      if (rest == 0) {
        closed_ += m;
        record(path_);
      } else {
        int side = 1;
        try {
          side = against_rest(rest, s);
        } catch (const Error&) {
          undecided_ = true;
          open_ = true;
          side = 1;
        }
        if (side < 0) visit(next(s), rest, m);
      }
      path_.pop_back();
      if (budget_hit_) return;
    }
  }

  const SeriesSpec& spec_;
  const BlocksTail& tail_;
  CountOptions options_;
  std::uint64_t P_;
  std::vector<Rat> suffix_;
  Int closed_ = 0;
  bool open_ = false;
  bool budget_hit_ = false;
  bool undecided_ = false;
  std::size_t visited_ = 0;
  std::vector<Choice> path_;
  std::vector<Representation> witnesses_;
};

}  // namespace

CountResult count(const SeriesSpec& spec, const Rat& t, const CountOptions& options) {
  require_valid(spec);
  if (const auto* b = std::get_if<BlocksTail>(&spec.tail)) {
    if (t < 0 || compare(t, total(spec), options.refinements) > 0) {
      throw Error(ErrorKind::TargetOutOfRange, "target " + to_string(t) + " outside the range");
    }
    return BlockSearch(spec, *b, options).run(t);
  }
  auto graph = build_graph(spec, t, options);
  auto a = analyze(graph);
  CountResult result;
  result.cardinality = a.cardinality;
  result.states = graph.states();
  result.budget_exceeded = !graph.complete();
  if (graph.bit_cap_hit()) result.note = "residual bit cap reached";
  result.witnesses = graph_witnesses(graph, {a.cardinality, a.live}, options.witnesses);
  const auto& c = result.cardinality;
  result.truncated = !c.is_fin() || c.count() > result.witnesses.size();
  return result;
}

EnumerateResult enumerate_reps(const SeriesSpec& spec, const Rat& t, std::size_t limit,
                               const CountOptions& options) {
  if (limit == 0) throw Error(ErrorKind::Precondition, "limit must be positive");
  CountOptions opts = options;
  opts.witnesses = limit;
  auto r = count(spec, t, opts);
  return {r.witnesses, r.truncated, r.cardinality};
}

QuasiregularExpansion quasiregular_expand(const SeriesSpec& spec, const Rat& x,
                                          std::size_t horizon) {
  require_valid(spec);
  const Remainder tot = total(spec);
  if (x <= 0 || compare(x, tot) > 0) {
    throw Error(ErrorKind::TargetOutOfRange, "x must lie in (0, total]");
  }
  QuasiregularExpansion out;
  Layout layout{spec.prefix.size(), self_similar(spec.tail)};
  const bool exact = has_exact_remainders(spec);
  const bool finite = is_zero_tail(spec);
  std::unordered_map<StateKey, std::uint64_t, StateKeyHash> seen;
  Rat u = x;
  std::vector<bool> word;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    if (u == 0) {
      out.closed = true;
      out.rep = make_rep(word, TailAction::None, 0);
      break;
    }
    if (finite && n > layout.P) break;
    if (exact && u == exact_remainder(spec, n - 1)) {
      out.closed = true;
      out.rep = make_rep(word, TailAction::AllFrom, n);
      break;
    }
    if (layout.ss && n > layout.P) {
      StateKey key{layout.phase_of(n), u / pow(layout.ss->q, layout.block_of(n))};
      auto [it, fresh] = seen.emplace(key, n);
      if (!fresh) {
        const std::uint64_t n0 = it->second;
        std::vector<bool> cyc(word.begin() + static_cast<std::ptrdiff_t>(n0 - 1), word.end());
        out.closed = true;
        out.rep = make_rep(word, TailAction::Cycle, n0, std::move(cyc));
        break;
      }
    }
    const Rat xn = term(spec, n);
    const bool take = xn < u;
    word.push_back(take);
    if (take) u -= xn;
  }
  if (!out.closed) out.rep = make_rep(word, TailAction::None, 0);
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    out.digits.push_back(out.closed ? out.rep.takes(n) : (n <= word.size() && word[n - 1]));
  }
  return out;
}

SegmentResult greedy_segments(const SeriesSpec& spec, const Rat& t, std::uint64_t after,
                              std::size_t horizon) {
  require_valid(spec);
  auto ss = self_similar(spec.tail);
  if (!ss) throw Error(ErrorKind::Precondition, "segment greedy needs a self-similar tail");
  for (std::uint64_t n = after + 1; n <= spec.prefix.size(); ++n) {
    if (term(spec, n) > exact_remainder(spec, n)) {
      throw Error(ErrorKind::Precondition,
                  "not slowly convergent: x_" + std::to_string(n) + " > r_" + std::to_string(n));
    }
  }
  for (std::size_t s = 0; s < ss->period(); ++s) {
    if (ss->coeffs[s] > ss->mass_from(s + 1)) {
      throw Error(ErrorKind::Precondition, "not slowly convergent in the tail");
    }
  }
  const Rat bound = exact_remainder(spec, after);
  if (t < 0 || t > bound) {
    throw Error(ErrorKind::TargetOutOfRange, "target outside [0, r_" + std::to_string(after) + "]");
  }
  SegmentResult out;
  Layout layout{spec.prefix.size(), ss};
  std::unordered_map<StateKey, std::uint64_t, StateKeyHash> seen;
  std::vector<bool> word(after, false);
  Rat u = t;
  bool in_segment = true;
  for (std::uint64_t n = after + 1; n <= after + horizon; ++n) {
    if (u == 0) {
      out.closed = true;
      out.rep = make_rep(word, TailAction::None, 0);
      break;
    }
    if (u == exact_remainder(spec, n - 1)) {
      out.closed = true;
      out.rep = make_rep(word, TailAction::AllFrom, n);
      break;
    }
    if (n > layout.P) {
      Rat norm = u / pow(ss->q, layout.block_of(n));
      StateKey key{layout.phase_of(n) * 2 + (in_segment ? 1u : 0u), norm};
      auto [it, fresh] = seen.emplace(key, n);
      if (!fresh) {
        const std::uint64_t n0 = it->second;
        std::vector<bool> cyc(word.begin() + static_cast<std::ptrdiff_t>(n0 - 1), word.end());
        out.closed = true;
        out.rep = make_rep(word, TailAction::Cycle, n0, std::move(cyc));
        break;
      }
    }
    const Rat xn = term(spec, n);
    const bool take = in_segment ? xn <= u : xn < u;
    if (take) {
      if (!in_segment || out.segments.empty() || out.segments.back().second + 1 != n) {
        out.segments.push_back({n, n});
      } else {
        out.segments.back().second = n;
      }
      u -= xn;
    }
    in_segment = take;
    word.push_back(take);
  }
  if (!out.closed) out.rep = make_rep(word, TailAction::None, 0);
  out.residual = u;
  return out;
}

OmegaWitness omega_witness(const SeriesSpec& spec) {
  require_valid(spec);
  auto ss = self_similar(spec.tail);
  if (!ss) {
    throw Error(ErrorKind::Precondition, "needs an infinite self-similar tail");
  }
  auto d = dominance(spec);
  if (d.quick) throw Error(ErrorKind::Precondition, "quickly convergent: every point is unique");
  if (!d.all_slow) throw Error(ErrorKind::Precondition, "x_n > r_n for some n");
  if (!d.tail_strict_slow) {
    throw Error(ErrorKind::Precondition, "x_n < r_n holds only finitely often: f is bounded");
  }
  const std::uint64_t P = spec.prefix.size();
  auto filled = interval_filling_from(spec);
  if (!filled) throw Error(ErrorKind::Precondition, "tail is not eventually sorted");
  for (std::size_t s = 0; s < ss->period(); ++s) {
    const Rat& k = ss->coeffs[s];
    const Rat rest = ss->mass_from(s + 1);
    if (k >= rest) continue;
    const std::uint64_t first = P + s + 1;
    if (first < *filled) continue;
    for (std::uint64_t dd = 1;; ++dd) {
      Rat sum = k / (1 - pow(ss->q, dd));
      if (sum < rest) return {sum, first, dd * ss->period()};
    }
  }
  throw Error(ErrorKind::Precondition, "no strict phase inside the sorted region");
}

Cardinality block_count(const std::vector<std::uint64_t>& block_sizes,
                        const std::vector<std::uint64_t>& chosen, bool partial_blocks_infinite) {
  if (partial_blocks_infinite) return Cardinality::continuum();
  if (block_sizes.size() != chosen.size()) {
    throw Error(ErrorKind::Precondition, "block sizes and chosen counts differ in length");
  }
  Int product = 1;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i] > block_sizes[i]) throw Error(ErrorKind::Precondition, "chosen exceeds block size");
    product *= binomial(block_sizes[i], chosen[i]).get_num();
  }
  const std::uint64_t k = to_u64(product);
  return k == kSaturated ? Cardinality::at_least(k) : Cardinality::fin(k);
}

DenseWitness omega_dense_witness(const SeriesSpec& spec, const std::vector<std::uint64_t>& v_support,
                                 const Rat& epsilon, const CountOptions& options) {
  require_valid(spec);
  if (epsilon <= 0) throw Error(ErrorKind::Precondition, "epsilon must be positive");
  if (!has_exact_remainders(spec)) {
    throw Error(ErrorKind::Unsupported, "dense witnesses need an exact-remainder tail");
  }
  auto ss = self_similar(spec.tail);
  if (!ss) throw Error(ErrorKind::NoOmegaPoint, "finite series: every value has finitely many representations");
  if (dominance(spec).quick) {
    throw Error(ErrorKind::NoOmegaPoint, "quickly convergent: every value is unique");
  }
  std::vector<std::uint64_t> support = v_support;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  Rat v = 0;
  for (auto n : support) {
    if (n == 0) throw Error(ErrorKind::Precondition, "indices are 1-based");
    v += term(spec, n);
  }
  auto here = count(spec, v, options);
  if (here.cardinality.is_infinite()) return {v, here.cardinality};

  // Candidate omega points: terms and remainders, then the progression sum.
  std::vector<Rat> candidates;
  const std::uint64_t span = 2 * (spec.prefix.size() + 2 * ss->period()) + 8;
  for (std::uint64_t n = 0; n <= span; ++n) {
    if (n >= 1) candidates.push_back(term(spec, n));
    candidates.push_back(exact_remainder(spec, n));
  }
  try {
    candidates.push_back(omega_witness(spec).t);
  } catch (const Error&) {
  }
  std::optional<Rat> t;
  for (const auto& c : candidates) {
    if (count(spec, c, options).cardinality.is_infinite()) {
      t = c;
      break;
    }
  }
  if (!t) throw Error(ErrorKind::NoOmegaPoint, "no point with infinitely many representations found");

  auto g = build_graph(spec, *t, options);
  auto a = analyze(g);
  const auto& nodes = g.nodes();
  // Rich nodes reach a cycle with a live exit (or two live cycle edges).
  std::vector<bool> rich(nodes.size(), false);
  for (auto id : a.order) {
    if (id <= StateGraph::kFull || !a.live[id]) continue;
    int live_out = 0;
    for (auto c : children(nodes[id])) {
      if (a.live[c]) ++live_out;
      if (rich[c]) rich[id] = true;
    }
    if (a.cyclic[id] && live_out >= 2) rich[id] = true;
  }
  // Cycles: propagate richness around strongly connected components.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t id = 2; id < nodes.size(); ++id) {
      if (rich[id] || !a.live[id]) continue;
      for (auto c : children(nodes[id])) {
        if (rich[c]) {
          rich[id] = true;
          changed = true;
        }
      }
    }
  }
  std::int32_t cur = g.start();
  if (cur <= StateGraph::kFull || !rich[cur]) {
    throw Error(ErrorKind::NoOmegaPoint, "omega point has no explored branching structure");
  }
  const std::uint64_t m = support.empty() ? 0 : support.back();
  const std::uint64_t P = spec.prefix.size();
  Rat residual = *t;
  for (std::uint64_t n = 0; n < 1000000; ++n) {
    const auto& node = nodes[cur];
    const std::uint64_t j = node.pos >= P ? (n - P) / ss->period() : 0;
    residual = node.u * pow(ss->q, j);
    if (n >= m && residual <= epsilon) break;
    if (node.take > StateGraph::kFull && rich[node.take]) {
      cur = node.take;
    } else if (node.skip > StateGraph::kFull && rich[node.skip]) {
      cur = node.skip;
    } else {
      throw Error(ErrorKind::NoOmegaPoint, "rich walk left the explored graph");
    }
  }
  const Rat u = v + residual;
  return {u, count(spec, u, options).cardinality};
}

RangeReport range_scan(const SeriesSpec& spec, std::size_t depth, const CountOptions& options,
                       const std::vector<Rat>& extra_targets) {
  require_valid(spec);
  if (depth > kMaxScanDepth) {
    throw Error(ErrorKind::SizeLimit,
                "scan depth " + std::to_string(depth) + " exceeds " + std::to_string(kMaxScanDepth));
  }
  std::size_t d = depth;
  if (is_zero_tail(spec)) d = std::min<std::size_t>(d, spec.prefix.size());
  std::vector<Rat> sums{Rat(0)};
  for (std::size_t n = 1; n <= d; ++n) {
    const Rat x = term(spec, n);
    const std::size_t half = sums.size();
    for (std::size_t i = 0; i < half; ++i) sums.push_back(sums[i] + x);
  }
  std::set<Rat> targets(sums.begin(), sums.end());
  if (has_exact_remainders(spec)) {
    for (std::size_t k = 0; k <= d; ++k) targets.insert(exact_remainder(spec, k));
  }
  targets.insert(extra_targets.begin(), extra_targets.end());

  RangeReport report;
  for (const auto& t : targets) {
    RangeEntry entry;
    try {
      auto r = count(spec, t, options);
      entry.cardinality = r.cardinality;
      entry.witnesses = std::move(r.witnesses);
      entry.states = r.states;
      entry.budget_exceeded = r.budget_exceeded;
      report.states += r.states;
      if (!r.cardinality.is_exact()) {
        report.budget_limited = true;
      } else if (r.cardinality != Cardinality::fin(0)) {
        report.cardinality_set.insert(r.cardinality);
      }
    } catch (const Error& e) {
      entry.error = e.what();
      entry.cardinality = Cardinality::at_least(0);
      report.budget_limited = true;
    }
    report.entries.emplace(t, std::move(entry));
  }
  return report;
}

}  // namespace cardfn
