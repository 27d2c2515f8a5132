#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "levelblend/generation.hpp"
#include "levelblend/model.hpp"

namespace levelblend {

/// Edge of an S-structure graph: a high-probability relation between two
/// styles. The feature is the mean 8-dim cardinal vector across observations,
/// sign-canonicalized so it does not depend on endpoint ordering.
struct SEdge {
  int a = -1;  // endpoint style ids, a < b
  int b = -1;
  double probability = 0.0;
  std::array<double, 8> feature{};
};

struct SStructureGraph {
  std::vector<int> nodes;  // style ids, ascending
  std::vector<SEdge> edges;
  std::map<int, double> thresholds;  // final theta per node
  int last_lowered = -1;   // node lowered in the final iteration, -1 if none
  int last_admitted = 0;   // edges admitted in the final iteration
  bool connected = false;
};

/// Every style pair observed together in a chunk, with probability equal to
/// the larger of the two co-occurrence directions.
std::vector<SEdge> candidate_edges(const LNode& lnode);

/// Edges whose probability reaches the threshold of at least one endpoint.
std::vector<SEdge> admitted_edges(const std::vector<SEdge>& candidates,
                                  const std::map<int, double>& thresholds);

/// Style ids appearing in at least one candidate edge.
std::set<int> observed_nodes(const std::vector<SEdge>& candidates);

/// True when the given nodes form one component under the edges.
bool edges_connect(const std::set<int>& nodes, const std::vector<SEdge>& edges);

/// Threshold descent: every node starts at 1.0; the most unconnected node
/// (fewest admitted incident edges, ties to the lower id) drops by 0.05 and
/// admits its incident candidates at or above its threshold, until the
/// observed nodes are connected or no admissible edges remain.
SStructureGraph build_sgraph(const LNode& lnode);

/// Equal weighting of probability difference and cosine distance, both
/// rescaled to [0, 1].
double edge_distance(const SEdge& e1, const SEdge& e2);

struct EdgeMapping {
  SEdge source_edge;
  SEdge target_edge;
  double distance = 0.0;
};

/// Each source edge independently maps to its closest target edge; ties go to
/// the lexicographically smallest target endpoint pair.
std::vector<EdgeMapping> map_edges(const SStructureGraph& source,
                                   const SStructureGraph& target);

struct StyleMapping {
  int source_style = -1;
  int target_style = -1;
  int evidence = 0;
};

/// Tallies endpoint pairings voted by the edge mappings (orientation resolved
/// greedily by global vote count), keeps the highest-evidence target per
/// source, filters by the optional blend-target set, and drops sources with
/// no surviving candidate (they stay unmapped). The result is injective.
std::vector<StyleMapping> derive_style_mappings(
    const std::vector<EdgeMapping>& edge_mappings,
    const std::optional<std::set<int>>& target_set = std::nullopt);

/// Transforms the source model through the mapping: mapped styles are replaced
/// by the corresponding target styles, unmapped styles are kept, and all
/// probability-table keys are relabeled with values unchanged.
LNode blend_lnode(const LNode& source, const LNode& target,
                  const std::vector<StyleMapping>& mappings);

/// Target-model styles assignable from the shapes of a level.
std::set<int> assignable_styles(const LNode& lnode, const Level& level,
                                int chunk_width);

struct BlendSetResult {
  std::vector<LNode> lnodes;
  bool degenerate = false;  // fewer than 2 distinct explaining models
};

/// Unsupervised blend set: selects the models that best explain the target
/// level's chunks, blends every ordered pair of them with the level-derived
/// target set, and returns the originals plus all blends.
BlendSetResult auto_blend(const std::vector<LNode>& models,
                          const Level& blend_target_level, int chunk_width,
                          const TileLegend& legend);

/// Supervised upper bound: blends all ordered cross-tag pairs with the
/// level-derived target set; returns the tagged originals plus all blends.
std::vector<LNode> full_blend(const std::vector<LNode>& tagged_models,
                              const std::string& type_a, const std::string& type_b,
                              const Level& target_level, int chunk_width,
                              const TileLegend& legend);

/// DOT export; nodes labeled "type:style", edges labeled with probability to
/// three decimals.
std::string sgraph_to_dot(const SStructureGraph& graph, const LNode& lnode,
                          const TileLegend& legend);

}  // namespace levelblend
