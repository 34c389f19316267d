#ifndef CARDFN_COUNTER_HPP
#define CARDFN_COUNTER_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cardfn/cardinality.hpp"
#include "cardfn/series.hpp"

namespace cardfn {

struct CountOptions {
  std::size_t budget = 100000;  // states (graph) or search nodes (blocks)
  std::size_t bit_cap = 4096;   // residual numerator/denominator size
  std::size_t witnesses = 4;
  unsigned refinements = kDefaultRefinements;
};

enum class TailAction { None, AllFrom, Cycle };

// One subset A with sum t. Indices are 1-based. `support` lists the chosen
// indices before `from`; the tail action describes what happens from `from`
// on: nothing, every index, or `cycle` repeated forever.
struct Representation {
  std::vector<std::uint64_t> support;
  TailAction action = TailAction::None;
  std::uint64_t from = 0;
  std::vector<bool> cycle;

  bool infinite() const { return action != TailAction::None; }
  // Decision for index n (1-based).
  bool takes(std::uint64_t n) const;
  friend bool operator==(const Representation&, const Representation&) = default;
};

// Exact sum of the decoded subset. Throws Error(Unsupported) when the sum
// involves a block-tail remainder.
Rat representation_sum(const SeriesSpec& spec, const Representation& rep);

// Lexicographic comparison of the infinite decision words (skip < take).
int compare_words(const Representation& a, const Representation& b);

std::string to_string(const Representation& rep);

// Residual automaton. Positions 0..P-1 are prefix terms (u unnormalized),
// P + s is tail phase s with u divided by q^j in block j. Closures are the
// dedicated nodes kZero and kFull.
class StateGraph {
 public:
  static constexpr std::int32_t kNone = -1;
  static constexpr std::int32_t kZero = 0;
  static constexpr std::int32_t kFull = 1;

  struct Node {
    std::uint32_t pos = 0;
    Rat u;
    std::int32_t skip = kNone;
    std::int32_t take = kNone;
    bool explored = false;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  std::int32_t start() const { return start_; }
  // Every reachable state was expanded.
  bool complete() const { return complete_; }
  bool bit_cap_hit() const { return bit_cap_hit_; }
  std::size_t states() const { return nodes_.size() - 2; }
  // Nodes at positions >= this are known to have a completion; empty if
  // no such certificate applies.
  std::optional<std::uint32_t> filled_from_pos() const { return filled_from_pos_; }
  std::uint32_t prefix_size() const { return prefix_size_; }
  std::uint32_t period() const { return period_; }

 private:
  friend StateGraph build_graph(const SeriesSpec&, const Rat&, const CountOptions&);

  std::vector<Node> nodes_;
  std::int32_t start_ = kNone;
  bool complete_ = true;
  bool bit_cap_hit_ = false;
  std::optional<std::uint32_t> filled_from_pos_;
  std::uint32_t prefix_size_ = 0;
  std::uint32_t period_ = 0;
};

// Breadth-first exploration of the states reachable from t. A budget or bit
// cap overrun returns a partial graph (complete() == false). Throws
// Error(TargetOutOfRange) and, for block tails, Error(Unsupported).
StateGraph build_graph(const SeriesSpec& spec, const Rat& t, const CountOptions& options = {});

struct PathClass {
  Cardinality cardinality = Cardinality::fin(0);
  std::vector<bool> live;  // per node
};

// Fin(k), Omega or Continuum on complete graphs; lower bounds (AtLeast,
// Infinite) or an exact Continuum on partial graphs.
PathClass classify_paths(const StateGraph& graph);

// Lassos of the live graph, sorted by decision word, at most `limit`.
std::vector<Representation> graph_witnesses(const StateGraph& graph, const PathClass& cls,
                                            std::size_t limit);

struct CountResult {
  Cardinality cardinality = Cardinality::fin(0);
  std::vector<Representation> witnesses;
  bool truncated = false;  // more representations exist than were listed
  std::size_t states = 0;
  bool budget_exceeded = false;
  std::string note;
};

CountResult count(const SeriesSpec& spec, const Rat& t, const CountOptions& options = {});

struct EnumerateResult {
  std::vector<Representation> reps;
  bool truncated = false;
  Cardinality cardinality = Cardinality::fin(0);
};

EnumerateResult enumerate_reps(const SeriesSpec& spec, const Rat& t, std::size_t limit,
                               const CountOptions& options = {});

struct QuasiregularExpansion {
  std::vector<bool> digits;  // first `horizon` digits
  // Closure detected within the horizon: None means a finite expansion
  // (all later digits zero) when `closed` is set.
  bool closed = false;
  Representation rep;
};

// Quasiregular digits: take x_n iff the partial sum plus x_n is below x.
QuasiregularExpansion quasiregular_expand(const SeriesSpec& spec, const Rat& x, std::size_t horizon);

struct SegmentResult {
  Representation rep;
  bool closed = false;  // rep describes the whole subset
  std::vector<std::pair<std::uint64_t, std::uint64_t>> segments;  // [first, last]
  Rat residual;  // t minus the listed segments
};

// Segment-greedy representation of t over indices > after.
SegmentResult greedy_segments(const SeriesSpec& spec, const Rat& t, std::uint64_t after,
                              std::size_t horizon = 4096);

struct OmegaWitness {
  Rat t;
  std::uint64_t first = 0;  // k_0
  std::uint64_t step = 0;   // k_j = k_0 + j * step
};

// t = sum_j x_{k_j} for an arithmetic progression satisfying the strict
// nesting condition, on series with x_n <= r_n everywhere and x_n < r_n for
// infinitely many n.
OmegaWitness omega_witness(const SeriesSpec& spec);

Cardinality block_count(const std::vector<std::uint64_t>& block_sizes,
                        const std::vector<std::uint64_t>& chosen, bool partial_blocks_infinite);

struct DenseWitness {
  Rat u;
  Cardinality cardinality;
};

// A point within epsilon of v with at least omega representations. v must be
// given by a finite support.
DenseWitness omega_dense_witness(const SeriesSpec& spec, const std::vector<std::uint64_t>& v_support,
                                 const Rat& epsilon, const CountOptions& options = {});

struct RangeEntry {
  Cardinality cardinality = Cardinality::fin(0);
  std::vector<Representation> witnesses;
  std::size_t states = 0;
  bool budget_exceeded = false;
  std::string error;  // nonempty when the target could not be counted
};

struct RangeReport {
  std::map<Rat, RangeEntry> entries;
  std::set<Cardinality> cardinality_set;  // exact nonzero counts seen
  std::size_t states = 0;
  bool budget_limited = false;
};

inline constexpr std::size_t kMaxScanDepth = 20;

RangeReport range_scan(const SeriesSpec& spec, std::size_t depth, const CountOptions& options = {},
                       const std::vector<Rat>& extra_targets = {});

}  // namespace cardfn

#endif  // CARDFN_COUNTER_HPP
