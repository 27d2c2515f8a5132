#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "levelblend/corpus.hpp"

namespace levelblend {

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

struct Vec2 {
  double x = 0.0;  // columns
  double y = 0.0;  // rows
};

/// Maximal 4-connected region of one non-background sprite type.
/// Cardinal points are midpoints of the bounding-box edges in continuous
/// (col, row) coordinates.
struct Shape {
  SpriteId sprite_type = 0;
  std::vector<Cell> cells;  // sorted row-major
  int top = 0, left = 0, bottom = 0, right = 0;
  int source_chunk = -1;

  double center_x() const { return (left + right + 1) * 0.5; }
  double center_y() const { return (top + bottom + 1) * 0.5; }
  Vec2 north() const { return {center_x(), static_cast<double>(top)}; }
  Vec2 south() const { return {center_x(), static_cast<double>(bottom + 1)}; }
  Vec2 west() const { return {static_cast<double>(left), center_y()}; }
  Vec2 east() const { return {static_cast<double>(right + 1), center_y()}; }
};

/// Same-cardinal difference vectors for an ordered shape pair (A, B):
/// n = B.N - A.N and so on. Negates under pair reversal.
struct RelationVectors {
  Vec2 n, s, e, w;
  Vec2 centroid_offset() const {
    return {(n.x + s.x + e.x + w.x) / 4.0, (n.y + s.y + e.y + w.y) / 4.0};
  }
  std::array<double, 8> as_array() const {
    return {n.x, n.y, s.x, s.y, e.x, e.y, w.x, w.y};
  }
};

/// All relative relationships from one shape to every other shape in its
/// chunk. Partners are indices into the chunk's shape list.
struct RelationSet {
  int owner = -1;
  std::vector<std::pair<int, RelationVectors>> relations;
};

/// Per-sprite-type cell counts of a chunk, background excluded.
struct CountVector {
  std::map<SpriteId, int> counts;
  int source_chunk = -1;

  int total() const;
  int count_for(SpriteId id) const;
};

/// Integer tile offset: the centroid offset of one shape relative to another,
/// rounded half away from zero.
struct RelKey {
  int dx = 0;
  int dy = 0;
  auto operator<=>(const RelKey&) const = default;
};

/// Cell mask normalized so the minimum row and column are zero.
struct GeometryMask {
  std::vector<Cell> cells;  // sorted row-major
  int width = 0;
  int height = 0;
  bool operator==(const GeometryMask&) const = default;
};

/// A shape observation reduced to what style comparison needs: normalized
/// geometry plus the 8-dim concatenated cardinal vectors of its relation set.
struct StyleExemplar {
  SpriteId sprite_type = 0;
  GeometryMask mask;
  std::vector<std::array<double, 8>> relations;
};

struct StyleMember {
  int mask_index = -1;  // into the style's geometry pool
  int top = 0;          // bbox top-left in the source chunk
  int left = 0;
  int chunk = -1;       // source chunk index within the category
};

/// A learned cluster of (shape, relation-set) pairs of one sprite type.
struct Style {
  int id = -1;
  SpriteId sprite_type = 0;
  std::vector<GeometryMask> geometry_pool;  // distinct masks, first-seen order
  std::vector<int> pool_counts;
  std::vector<StyleMember> members;
  int medoid = -1;  // member index
  StyleExemplar medoid_exemplar;
  std::set<int> chunk_ids;

  const GeometryMask& modal_mask() const;
  int modal_mask_index() const;
};

struct EdgeStat {
  int observations = 0;
  std::array<double, 8> mean_feature{};
};

/// A learned model of one chunk category: styles, count vectors, the
/// conditional table P(style, rel | style) and chunk-level co-occurrence.
struct LNode {
  std::string id;
  std::optional<std::string> tag;
  int chunk_width = 0;
  int chunk_height = 0;
  std::vector<Style> styles;  // ascending id
  std::vector<CountVector> count_vectors;
  // cond_table[s2][(s1, rel)] = P(s1 at rel | s2); sums to 1 per observed s2
  std::map<int, std::map<std::pair<int, RelKey>, double>> cond_table;
  std::map<std::pair<int, int>, double> cooccur;       // (s1, s2) -> p(s1 | s2)
  std::map<std::pair<int, int>, EdgeStat> edge_stats;  // style id pair, low < high

  // derived by finalize(): per (s1, s2) relation keys sorted by p descending
  std::map<std::pair<int, int>, std::vector<std::pair<RelKey, double>>> pair_keys;

  const Style* style_by_id(int id) const;
  const Style& style_at(int id) const;  // throws on unknown id
  double chunk_diag() const;
  /// Rebuilds derived indexes and checks per-conditioning normalization.
  void finalize();
};

std::vector<Shape> extract_shapes(const LevelChunk& chunk, int chunk_index = -1);
RelationVectors relation_vectors(const Shape& a, const Shape& b);
RelationSet build_relation_set(int owner, const std::vector<Shape>& chunk_shapes);
std::vector<RelationSet> build_relation_sets(const std::vector<Shape>& chunk_shapes);
CountVector count_vector(const LevelChunk& chunk);

GeometryMask normalize_mask(const std::vector<Cell>& cells);
StyleExemplar make_exemplar(const Shape& shape, const RelationSet& relations);

RelKey rel_key_from_offset(const Vec2& offset);
/// RelKey of `of` relative to `relative_to` (of.center - relative_to.center).
RelKey rel_key(const Shape& of, const Shape& relative_to);

/// Blend of geometry and relation-set dissimilarity in [0, 1]:
/// 0.5 * (1 - mask Jaccard) + 0.5 * (symmetric mean Chamfer / chunk_diag).
double style_distance(const StyleExemplar& a, const StyleExemplar& b,
                      double chunk_diag);

std::vector<Style> learn_styles(const std::vector<LevelChunk>& category_chunks,
                                SpriteId sprite_type, std::uint64_t seed,
                                int first_style_id = 0);

LNode learn_lnode(const std::string& category_id,
                  const std::vector<LevelChunk>& category_chunks,
                  std::uint64_t seed);

/// Table lookup; 0 for unseen (s1, rel) combinations. No smoothing.
double cond_prob(const LNode& lnode, int s1, const RelKey& rel, int s2);

/// Nearest style of the exemplar's type by style_distance to the medoid;
/// empty when the model has no style of that type. Ties go to the lower id.
std::optional<int> assign_style(const LNode& lnode, const StyleExemplar& exemplar);

/// Average pair probability of a chunk under a model: shapes are style-assigned
/// and scored with the same pair sum as assemblies; unassignable shapes
/// contribute zero pair probabilities but still count toward N.
double score_chunk(const LevelChunk& chunk, const LNode& lnode);

}  // namespace levelblend
