#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "levelblend/model.hpp"

namespace levelblend {

struct PlacedShape {
  int style_id = -1;
  SpriteId sprite_type = 0;
  GeometryMask mask;
  int top = 0;
  int left = 0;

  double center_x() const { return left + mask.width * 0.5; }
  double center_y() const { return top + mask.height * 0.5; }
};

RelKey rel_key(const PlacedShape& of, const PlacedShape& relative_to);

/// Working state of chunk generation. Placed shapes never overlap; the grid
/// mirrors them exactly.
struct Assembly {
  int width = 0;
  int height = 0;
  std::vector<PlacedShape> placed;
  std::vector<std::vector<SpriteId>> grid;
  CountVector n_target;
  std::deque<int> pending_required;
  std::map<SpriteId, int> type_cells;
  std::set<int> placed_style_ids;
  std::set<int> ever_required;
  double pair_sum = 0.0;  // running sum of ordered-pair probabilities

  static Assembly make(int width, int height);
  bool in_bounds(const GeometryMask& mask, int top, int left) const;
  bool conflicts(const GeometryMask& mask, int top, int left) const;
  void place(const LNode& lnode, int style_id, const GeometryMask& mask, int top,
             int left);
  bool targets_met() const;
  LevelChunk to_chunk(const std::string& source) const;
};

/// Average of the pairwise conditional probabilities over all ordered pairs
/// of placed shapes; assemblies with one or zero shapes score 0.
double score_assembly(const Assembly& assembly, const LNode& lnode);

struct Move {
  int style_id = -1;
  GeometryMask mask;
  int top = 0;
  int left = 0;
};

/// Candidate styles are the pending required styles plus styles whose sprite
/// type is still under the target count; positions come from the top_p
/// relation keys against each placed shape. Out-of-bounds or conflicting
/// placements are dropped.
std::vector<Move> candidate_moves(const Assembly& assembly, const LNode& lnode,
                                  int top_p);

enum class StopReason { targets_met, no_candidates, low_probability };

struct GenOptions {
  int top_p = 5;
  bool sample_geometry = false;  // sample member masks instead of the modal mask
};

struct GenResult {
  LevelChunk chunk;
  CountVector n_target;
  StopReason reason = StopReason::targets_met;
  double final_best_pair_prob = 0.0;
  int steps = 0;
};

GenResult generate_chunk_detailed(const LNode& lnode, int width, int height,
                                  std::uint64_t seed, const GenOptions& options = {});
LevelChunk generate_chunk(const LNode& lnode, int width, int height,
                          std::uint64_t seed, const GenOptions& options = {});

struct ChunkExplanation {
  int chunk_index = 0;
  std::string lnode_id;
  double score = 0.0;
};

/// Best-explaining model per uniform chunk; ties go to the lower model id.
std::vector<ChunkExplanation> explain_sequence(const Level& level,
                                               const std::vector<LNode>& models,
                                               int chunk_width);

/// Horizontal concatenation of generated chunks, one per model in sequence.
Level generate_level(const std::vector<const LNode*>& sequence, int width_per_chunk,
                     int height, std::uint64_t seed, const GenOptions& options = {});

}  // namespace levelblend
