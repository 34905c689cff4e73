#include "mge/neighborhood.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace mge {

UnitGraph::UnitGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const int n = static_cast<int>(nodes_.size());
  std::vector<std::size_t> degree(nodes_.size(), 0);
  for (const auto& e : edges_) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (e.a == e.b) throw std::invalid_argument("self-loop edge");
    ++degree[static_cast<std::size_t>(e.a)];
    ++degree[static_cast<std::size_t>(e.b)];
  }
  offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  incidence_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    incidence_[fill[static_cast<std::size_t>(e.a)]++] = {static_cast<int>(k), e.b, e.label};
    incidence_[fill[static_cast<std::size_t>(e.b)]++] = {static_cast<int>(k), e.a, e.label};
  }
}

EncodedUnit encode_unit(const TrainingUnit& unit, const Vocabulary& vocab) {
  EncodedUnit out;
  out.src.reserve(unit.src.size());
  for (const auto& tok : unit.src.tokens) out.src.push_back(vocab.id_or_none(tok));
  out.src_deps = unit.src.deps;
  if (unit.tgt) {
    out.tgt.reserve(unit.tgt->size());
    for (const auto& tok : unit.tgt->tokens) out.tgt.push_back(vocab.id_or_none(tok));
    out.tgt_deps = unit.tgt->deps;
    out.alignments = unit.alignments;
  }
  return out;
}

UnitGraph build_unit_graph(const EncodedUnit& unit, LabelSet needed) {
  const int ns = static_cast<int>(unit.src.size());
  const int nt = static_cast<int>(unit.tgt.size());
  std::vector<GraphNode> nodes;
  nodes.reserve(static_cast<std::size_t>(ns + nt));
  for (int i = 0; i < ns; ++i) nodes.push_back({Side::src, i, unit.src[static_cast<std::size_t>(i)]});
  for (int j = 0; j < nt; ++j) nodes.push_back({Side::tgt, j, unit.tgt[static_cast<std::size_t>(j)]});

  std::vector<GraphEdge> edges;
  if (needed.contains(Label::T)) {
    for (int i = 0; i + 1 < ns; ++i) edges.push_back({i, i + 1, Label::T});
    for (int j = 0; j + 1 < nt; ++j) edges.push_back({ns + j, ns + j + 1, Label::T});
  }
  if (needed.contains(Label::A))
    for (const auto& link : unit.alignments) edges.push_back({link.src, ns + link.tgt, Label::A});
  if (needed.contains(Label::D)) {
    for (const auto& arc : unit.src_deps) edges.push_back({arc.head, arc.dep, Label::D});
    for (const auto& arc : unit.tgt_deps) edges.push_back({ns + arc.head, ns + arc.dep, Label::D});
  }
  return UnitGraph(std::move(nodes), std::move(edges));
}

UnitGraph build_unit_graph(const TrainingUnit& unit, const Vocabulary& vocab, LabelSet needed) {
  return build_unit_graph(encode_unit(unit, vocab), needed);
}

const std::vector<int>& NeighborhoodSearcher::query(const UnitGraph& graph, int w, const ModelSpec& spec) {
  result_.clear();
  const int max_d = spec.max_distance();
  const std::size_t n = graph.size();
  if (max_d == 0 || n == 0) return result_;

  // Budget of a state = min label distance seen so far on the path, in 1..max_d.
  const std::size_t budgets = static_cast<std::size_t>(max_d) + 1;
  if (visited_.size() < n * budgets) visited_.assign(n * budgets, 0);
  if (marked_.size() < n) marked_.assign(n, 0);
  if (++stamp_ == 0) {
    std::fill(visited_.begin(), visited_.end(), 0);
    std::fill(marked_.begin(), marked_.end(), 0);
    stamp_ = 1;
  }
  std::array<int, 3> dist{spec.distance_of(Label::T), spec.distance_of(Label::A), spec.distance_of(Label::D)};

  queue_.clear();
  queue_.push_back({w, max_d});
  visited_[static_cast<std::size_t>(w) * budgets + static_cast<std::size_t>(max_d)] = stamp_;
  // Level-by-level BFS: every state in [level_begin, level_end) sits at `depth`.
  std::size_t level_begin = 0;
  int depth = 0;
  while (level_begin < queue_.size()) {
    const std::size_t level_end = queue_.size();
    for (std::size_t q = level_begin; q < level_end; ++q) {
      const State s = queue_[q];
      if (depth >= s.budget) continue;
      for (const auto& inc : graph.incident(s.node)) {
        const int d = dist[static_cast<std::size_t>(inc.label)];
        const int budget = std::min(s.budget, d);
        if (depth + 1 > budget) continue;
        if (inc.other != w && marked_[static_cast<std::size_t>(inc.other)] != stamp_) {
          marked_[static_cast<std::size_t>(inc.other)] = stamp_;
          result_.push_back(inc.other);
        }
        auto& v = visited_[static_cast<std::size_t>(inc.other) * budgets + static_cast<std::size_t>(budget)];
        if (v != stamp_) {
          v = stamp_;
          queue_.push_back({inc.other, budget});
        }
      }
    }
    level_begin = level_end;
    ++depth;
  }
  std::sort(result_.begin(), result_.end());
  return result_;
}

std::vector<int> neighborhood(const UnitGraph& graph, int w, const ModelSpec& spec) {
  NeighborhoodSearcher searcher;
  return searcher.query(graph, w, spec);
}

namespace {

void enumerate_paths(const UnitGraph& graph, const ModelSpec& spec, int node, int length, int min_distance,
                     int max_length, std::vector<bool>& on_path, std::vector<bool>& reached) {
  if (length > 0 && length <= min_distance) reached[static_cast<std::size_t>(node)] = true;
  if (length == max_length) return;
  for (const auto& inc : graph.incident(node)) {
    if (on_path[static_cast<std::size_t>(inc.other)]) continue;
    on_path[static_cast<std::size_t>(inc.other)] = true;
    enumerate_paths(graph, spec, inc.other, length + 1, std::min(min_distance, spec.distance_of(inc.label)),
                    max_length, on_path, reached);
    on_path[static_cast<std::size_t>(inc.other)] = false;
  }
}

}  // namespace

std::vector<int> brute_force_neighborhood(const UnitGraph& graph, int w, const ModelSpec& spec) {
  if (graph.size() > kBruteForceMaxNodes)
    throw std::invalid_argument("brute_force_neighborhood is limited to 16 nodes");
  std::vector<bool> on_path(graph.size(), false), reached(graph.size(), false);
  on_path[static_cast<std::size_t>(w)] = true;
  const int max_length = spec.max_distance();
  // The empty path has no labels; start min at "infinity".
  enumerate_paths(graph, spec, w, 0, 1 << 30, max_length, on_path, reached);
  std::vector<int> out;
  for (std::size_t i = 0; i < graph.size(); ++i)
    if (reached[i] && static_cast<int>(i) != w) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<NeighborPair> generate_pairs(const UnitGraph& graph, const ModelSpec& spec) {
  std::vector<NeighborPair> out;
  NeighborhoodSearcher searcher;
  std::vector<int> scratch;
  for_each_neighborhood(graph, spec, searcher, scratch, [&](int w, std::span<const int> contexts) {
    for (int c : contexts)
      out.push_back({graph.nodes()[static_cast<std::size_t>(w)].word, graph.nodes()[static_cast<std::size_t>(c)].word});
  });
  return out;
}

}  // namespace mge
