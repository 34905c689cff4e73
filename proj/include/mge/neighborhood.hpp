#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mge/corpus.hpp"
#include "mge/graphspec.hpp"
#include "mge/vocabulary.hpp"

namespace mge {

enum class Side : std::uint8_t { src = 0, tgt = 1 };

/// One token occurrence. `word` is kNoWord for out-of-vocabulary occurrences: such nodes
/// carry paths but never appear in emitted pairs.
struct GraphNode {
  Side side = Side::src;
  int index = 0;
  WordId word = kNoWord;
};

/// Undirected edge; its position in UnitGraph::edges() is its identity.
struct GraphEdge {
  int a = 0;
  int b = 0;
  Label label = Label::T;
};

/// Multigraph over the token occurrences of one training unit.
class UnitGraph {
 public:
  struct Incidence {
    int edge;
    int other;
    Label label;
  };

  UnitGraph() = default;
  /// Throws std::invalid_argument on out-of-range endpoints or self-loops.
  UnitGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  std::span<const Incidence> incident(int node) const noexcept {
    return {incidence_.data() + offsets_[static_cast<std::size_t>(node)],
            incidence_.data() + offsets_[static_cast<std::size_t>(node) + 1]};
  }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<Incidence> incidence_;
  std::vector<std::size_t> offsets_{0};
};

/// A unit with tokens replaced by vocabulary ids (kNoWord when absent).
struct EncodedUnit {
  std::vector<WordId> src;
  std::vector<WordId> tgt;
  std::vector<DepArc> src_deps;
  std::vector<DepArc> tgt_deps;
  std::vector<AlignLink> alignments;
};

EncodedUnit encode_unit(const TrainingUnit& unit, const Vocabulary& vocab);

/// Source nodes come first (positions 0..n-1), then target nodes. T edges join adjacent
/// positions on one side, A edges follow the alignment, D edges the dependency arcs.
UnitGraph build_unit_graph(const EncodedUnit& unit, LabelSet needed_labels);
UnitGraph build_unit_graph(const TrainingUnit& unit, const Vocabulary& vocab, LabelSet needed_labels);

/// Computes neighborhoods: all c reachable from w over a path e1..ek with
/// k <= min over the path's labels of d(label). Reuses scratch buffers across queries, so one
/// searcher per thread.
class NeighborhoodSearcher {
 public:
  /// Sorted node indices, w excluded.
  const std::vector<int>& query(const UnitGraph& graph, int w, const ModelSpec& spec);

 private:
  struct State {
    int node;
    int budget;
  };
  std::vector<int> result_;
  std::vector<std::uint32_t> visited_;  // stamp per (node, budget)
  std::vector<std::uint32_t> marked_;   // stamp per node
  std::vector<State> queue_;
  std::uint32_t stamp_ = 0;
};

std::vector<int> neighborhood(const UnitGraph& graph, int w, const ModelSpec& spec);

inline constexpr std::size_t kBruteForceMaxNodes = 16;

/// Reference enumeration of simple paths; throws std::invalid_argument above 16 nodes.
std::vector<int> brute_force_neighborhood(const UnitGraph& graph, int w, const ModelSpec& spec);

struct NeighborPair {
  WordId center = kNoWord;
  WordId context = kNoWord;
  friend bool operator==(const NeighborPair&, const NeighborPair&) = default;
  friend auto operator<=>(const NeighborPair&, const NeighborPair&) = default;
};

/// Calls fn(center_node, contexts) for every in-vocabulary node in position order, where
/// contexts are the in-vocabulary neighborhood nodes in position order. Centers with no
/// context are skipped.
template <typename Fn>
void for_each_neighborhood(const UnitGraph& graph, const ModelSpec& spec, NeighborhoodSearcher& searcher,
                           std::vector<int>& scratch, Fn&& fn) {
  for (int w = 0; w < static_cast<int>(graph.size()); ++w) {
    if (graph.nodes()[static_cast<std::size_t>(w)].word == kNoWord) continue;
    scratch.clear();
    for (int c : searcher.query(graph, w, spec))
      if (graph.nodes()[static_cast<std::size_t>(c)].word != kNoWord) scratch.push_back(c);
    if (!scratch.empty()) fn(w, std::span<const int>(scratch));
  }
}

std::vector<NeighborPair> generate_pairs(const UnitGraph& graph, const ModelSpec& spec);

}  // namespace mge
