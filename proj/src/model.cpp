#include "levelblend/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "levelblend/clustering.hpp"
#include "levelblend/rng.hpp"

namespace levelblend {

int CountVector::total() const {
  int sum = 0;
  for (const auto& [id, c] : counts) sum += c;
  return sum;
}

int CountVector::count_for(SpriteId id) const {
  auto it = counts.find(id);
  return it == counts.end() ? 0 : it->second;
}

int Style::modal_mask_index() const {
  int best = 0;
  for (size_t i = 1; i < pool_counts.size(); ++i)
    if (pool_counts[i] > pool_counts[best]) best = static_cast<int>(i);
  return best;
}

const GeometryMask& Style::modal_mask() const { return geometry_pool[modal_mask_index()]; }

const Style* LNode::style_by_id(int sid) const {
  for (const auto& s : styles)
    if (s.id == sid) return &s;
  return nullptr;
}

const Style& LNode::style_at(int sid) const {
  const Style* s = style_by_id(sid);
  if (!s) throw std::invalid_argument("unknown style id " + std::to_string(sid) +
                                      " in model " + id);
  return *s;
}

double LNode::chunk_diag() const {
  return std::hypot(static_cast<double>(chunk_width), static_cast<double>(chunk_height));
}

void LNode::finalize() {
  pair_keys.clear();
  for (const auto& [s2, dist] : cond_table) {
    double sum = 0.0;
    for (const auto& [key, p] : dist) {
      sum += p;
      pair_keys[{key.first, s2}].push_back({key.second, p});
    }
    if (!dist.empty() && std::abs(sum - 1.0) > 1e-9)
      throw std::logic_error("model " + id + ": conditional table for style " +
                             std::to_string(s2) + " sums to " + std::to_string(sum));
  }
  for (auto& [pair, keys] : pair_keys) {
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
  }
}

std::vector<Shape> extract_shapes(const LevelChunk& chunk, int chunk_index) {
  const int h = chunk.height();
  const int w = chunk.width();
  std::vector<Shape> shapes;
  std::vector<std::vector<bool>> seen(h, std::vector<bool>(w, false));

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (seen[r][c] || chunk.grid[r][c] == 0) continue;
      const SpriteId type = chunk.grid[r][c];
      Shape shape;
      shape.sprite_type = type;
      shape.source_chunk = chunk_index;

      // flood fill, 4-connectivity
      std::vector<Cell> stack{{r, c}};
      seen[r][c] = true;
      while (!stack.empty()) {
        Cell cell = stack.back();
        stack.pop_back();
        shape.cells.push_back(cell);
        const int dr[] = {-1, 1, 0, 0};
        const int dc[] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          int nr = cell.row + dr[k];
          int nc = cell.col + dc[k];
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          if (seen[nr][nc] || chunk.grid[nr][nc] != type) continue;
          seen[nr][nc] = true;
          stack.push_back({nr, nc});
        }
      }
      std::sort(shape.cells.begin(), shape.cells.end());
      shape.top = shape.bottom = shape.cells.front().row;
      shape.left = shape.right = shape.cells.front().col;
      for (const Cell& cell : shape.cells) {
        shape.top = std::min(shape.top, cell.row);
        shape.bottom = std::max(shape.bottom, cell.row);
        shape.left = std::min(shape.left, cell.col);
        shape.right = std::max(shape.right, cell.col);
      }
      shapes.push_back(std::move(shape));
    }
  }
  return shapes;
}

RelationVectors relation_vectors(const Shape& a, const Shape& b) {
  if (&a == &b || (a.source_chunk == b.source_chunk && a.sprite_type == b.sprite_type &&
                   a.cells == b.cells))
    throw std::invalid_argument("relation_vectors: same shape passed twice");
  auto diff = [](Vec2 to, Vec2 from) { return Vec2{to.x - from.x, to.y - from.y}; };
  RelationVectors rv;
  rv.n = diff(b.north(), a.north());
  rv.s = diff(b.south(), a.south());
  rv.e = diff(b.east(), a.east());
  rv.w = diff(b.west(), a.west());
  return rv;
}

RelationSet build_relation_set(int owner, const std::vector<Shape>& chunk_shapes) {
  if (owner < 0 || owner >= static_cast<int>(chunk_shapes.size()))
    throw std::invalid_argument("build_relation_set: owner not in shape list");
  RelationSet set;
  set.owner = owner;
  for (int i = 0; i < static_cast<int>(chunk_shapes.size()); ++i) {
    if (i == owner) continue;
    set.relations.push_back({i, relation_vectors(chunk_shapes[owner], chunk_shapes[i])});
  }
  return set;
}

std::vector<RelationSet> build_relation_sets(const std::vector<Shape>& chunk_shapes) {
  std::vector<RelationSet> sets;
  sets.reserve(chunk_shapes.size());
  for (int i = 0; i < static_cast<int>(chunk_shapes.size()); ++i)
    sets.push_back(build_relation_set(i, chunk_shapes));
  return sets;
}

CountVector count_vector(const LevelChunk& chunk) {
  CountVector cv;
  for (const auto& row : chunk.grid)
    for (SpriteId id : row)
      if (id != 0) ++cv.counts[id];
  return cv;
}

GeometryMask normalize_mask(const std::vector<Cell>& cells) {
  if (cells.empty()) throw std::invalid_argument("normalize_mask: empty cell set");
  int min_r = cells.front().row, min_c = cells.front().col;
  int max_r = min_r, max_c = min_c;
  for (const Cell& cell : cells) {
    min_r = std::min(min_r, cell.row);
    min_c = std::min(min_c, cell.col);
    max_r = std::max(max_r, cell.row);
    max_c = std::max(max_c, cell.col);
  }
  GeometryMask mask;
  mask.cells.reserve(cells.size());
  for (const Cell& cell : cells) mask.cells.push_back({cell.row - min_r, cell.col - min_c});
  std::sort(mask.cells.begin(), mask.cells.end());
  mask.height = max_r - min_r + 1;
  mask.width = max_c - min_c + 1;
  return mask;
}

StyleExemplar make_exemplar(const Shape& shape, const RelationSet& relations) {
  StyleExemplar ex;
  ex.sprite_type = shape.sprite_type;
  ex.mask = normalize_mask(shape.cells);
  ex.relations.reserve(relations.relations.size());
  for (const auto& [partner, rv] : relations.relations) ex.relations.push_back(rv.as_array());
  return ex;
}

RelKey rel_key_from_offset(const Vec2& offset) {
  return {static_cast<int>(std::lround(offset.x)), static_cast<int>(std::lround(offset.y))};
}

RelKey rel_key(const Shape& of, const Shape& relative_to) {
  return rel_key_from_offset(
      {of.center_x() - relative_to.center_x(), of.center_y() - relative_to.center_y()});
}

namespace {

double mask_jaccard(const GeometryMask& a, const GeometryMask& b) {
  size_t i = 0, j = 0, both = 0;
  while (i < a.cells.size() && j < b.cells.size()) {
    if (a.cells[i] == b.cells[j]) {
      ++both;
      ++i;
      ++j;
    } else if (a.cells[i] < b.cells[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  size_t either = a.cells.size() + b.cells.size() - both;
  return either == 0 ? 1.0 : static_cast<double>(both) / either;
}

double vec8_dist(const std::array<double, 8>& a, const std::array<double, 8>& b) {
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double chamfer_one_way(const std::vector<std::array<double, 8>>& from,
                       const std::vector<std::array<double, 8>>& to) {
  double sum = 0.0;
  for (const auto& f : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : to) best = std::min(best, vec8_dist(f, t));
    sum += best;
  }
  return sum / from.size();
}

}  // namespace

double style_distance(const StyleExemplar& a, const StyleExemplar& b, double chunk_diag) {
  if (a.sprite_type != b.sprite_type)
    throw std::invalid_argument("style_distance: sprite type mismatch");
  if (chunk_diag <= 0.0)
    throw std::invalid_argument("style_distance: chunk_diag must be positive");

  double geometry = 1.0 - mask_jaccard(a.mask, b.mask);

  double relation;
  if (a.relations.empty() && b.relations.empty()) {
    relation = 0.0;
  } else if (a.relations.empty() || b.relations.empty()) {
    relation = 1.0;
  } else {
    double chamfer =
        0.5 * (chamfer_one_way(a.relations, b.relations) +
               chamfer_one_way(b.relations, a.relations));
    relation = std::clamp(chamfer / chunk_diag, 0.0, 1.0);
  }
  return 0.5 * geometry + 0.5 * relation;
}

namespace {

struct TypeMember {
  int chunk = -1;
  int shape_index = -1;  // within the chunk's shape list
  StyleExemplar exemplar;
  int top = 0;
  int left = 0;
};

struct ChunkAnalysis {
  std::vector<std::vector<Shape>> shapes;        // per chunk
  std::vector<std::vector<RelationSet>> relsets; // per chunk
};

ChunkAnalysis analyze_chunks(const std::vector<LevelChunk>& chunks) {
  ChunkAnalysis out;
  out.shapes.reserve(chunks.size());
  out.relsets.reserve(chunks.size());
  for (int ci = 0; ci < static_cast<int>(chunks.size()); ++ci) {
    out.shapes.push_back(extract_shapes(chunks[ci], ci));
    out.relsets.push_back(build_relation_sets(out.shapes.back()));
  }
  return out;
}

std::vector<TypeMember> collect_type_members(const ChunkAnalysis& analysis,
                                             SpriteId type) {
  std::vector<TypeMember> members;
  for (int ci = 0; ci < static_cast<int>(analysis.shapes.size()); ++ci) {
    for (int si = 0; si < static_cast<int>(analysis.shapes[ci].size()); ++si) {
      const Shape& shape = analysis.shapes[ci][si];
      if (shape.sprite_type != type) continue;
      TypeMember m;
      m.chunk = ci;
      m.shape_index = si;
      m.exemplar = make_exemplar(shape, analysis.relsets[ci][si]);
      m.top = shape.top;
      m.left = shape.left;
      members.push_back(std::move(m));
    }
  }
  return members;
}

/// Clusters one type's members; returns the assignment with medoid indices.
ClusterAssignment cluster_type_members(const std::vector<TypeMember>& members,
                                       double diag, std::uint64_t seed) {
  const int n = static_cast<int>(members.size());
  std::vector<std::vector<double>> cache(n, std::vector<double>(n, -1.0));
  DistanceFn dist = [&](int i, int j) {
    if (i == j) return 0.0;
    if (cache[i][j] >= 0.0) return cache[i][j];
    double d = style_distance(members[i].exemplar, members[j].exemplar, diag);
    cache[i][j] = cache[j][i] = d;
    return d;
  };
  const int k_max = std::clamp(n / 2, 1, 8);
  auto [k, curve] = estimate_k_medoids(n, dist, k_max, derive_seed(seed, 0));
  return kmedoids(n, dist, k, derive_seed(seed, k));
}

/// Builds one style per nonempty cluster with dense ids from first_style_id.
/// style_of_cluster maps cluster index -> style id (-1 for empty clusters,
/// which occur only when duplicate members tie at distance zero).
std::vector<Style> build_styles_for_type(const std::vector<TypeMember>& members,
                                         const ClusterAssignment& assignment,
                                         SpriteId type, int first_style_id,
                                         std::vector<int>& style_of_cluster) {
  std::vector<Style> styles;
  style_of_cluster.assign(assignment.k, -1);
  for (int c = 0; c < assignment.k; ++c) {
    Style style;
    style.sprite_type = type;
    int medoid_global = assignment.medoids[c];
    for (int i = 0; i < static_cast<int>(members.size()); ++i) {
      if (assignment.labels[i] != c) continue;
      const TypeMember& m = members[i];
      int mask_index = -1;
      for (int g = 0; g < static_cast<int>(style.geometry_pool.size()); ++g) {
        if (style.geometry_pool[g] == m.exemplar.mask) {
          mask_index = g;
          break;
        }
      }
      if (mask_index < 0) {
        mask_index = static_cast<int>(style.geometry_pool.size());
        style.geometry_pool.push_back(m.exemplar.mask);
        style.pool_counts.push_back(0);
      }
      ++style.pool_counts[mask_index];
      if (i == medoid_global) style.medoid = static_cast<int>(style.members.size());
      style.members.push_back({mask_index, m.top, m.left, m.chunk});
      style.chunk_ids.insert(m.chunk);
    }
    if (style.members.empty()) continue;
    if (style.medoid < 0) style.medoid = 0;  // medoid tied away to another cluster
    style.medoid_exemplar = members[medoid_global].exemplar;
    style.id = first_style_id + static_cast<int>(styles.size());
    style_of_cluster[c] = style.id;
    styles.push_back(std::move(style));
  }
  return styles;
}

}  // namespace

std::vector<Style> learn_styles(const std::vector<LevelChunk>& category_chunks,
                                SpriteId sprite_type, std::uint64_t seed,
                                int first_style_id) {
  if (category_chunks.empty())
    throw std::invalid_argument("learn_styles: empty category");
  auto analysis = analyze_chunks(category_chunks);
  auto members = collect_type_members(analysis, sprite_type);
  if (members.empty()) return {};
  const double diag = std::hypot(static_cast<double>(category_chunks.front().width()),
                                 static_cast<double>(category_chunks.front().height()));
  auto assignment = cluster_type_members(members, diag, seed);
  return build_styles_for_type(members, assignment, sprite_type, first_style_id, nullptr);
}

LNode learn_lnode(const std::string& category_id,
                  const std::vector<LevelChunk>& category_chunks, std::uint64_t seed) {
  if (category_chunks.empty()) throw std::invalid_argument("learn_lnode: empty category");
  const int w = category_chunks.front().width();
  const int h = category_chunks.front().height();
  for (const auto& chunk : category_chunks)
    if (chunk.width() != w || chunk.height() != h)
      throw std::invalid_argument("learn_lnode: chunks must share dimensions");

  LNode lnode;
  lnode.id = category_id;
  lnode.chunk_width = w;
  lnode.chunk_height = h;

  auto analysis = analyze_chunks(category_chunks);

  std::set<SpriteId> types;
  for (const auto& shapes : analysis.shapes)
    for (const auto& shape : shapes) types.insert(shape.sprite_type);

  // style id per (chunk, shape index)
  std::vector<std::vector<int>> shape_style(category_chunks.size());
  for (size_t ci = 0; ci < category_chunks.size(); ++ci)
    shape_style[ci].assign(analysis.shapes[ci].size(), -1);

  // the same derived seed for every type keeps style clustering a function of
  // the member geometry alone, independent of sprite-id numbering
  const std::uint64_t type_seed = derive_seed(seed, 0x57);
  int next_style_id = 0;
  for (SpriteId type : types) {
    auto members = collect_type_members(analysis, type);
    auto assignment = cluster_type_members(members, lnode.chunk_diag(), type_seed);
    std::vector<std::pair<int, int>> member_keys(members.size());
    auto styles =
        build_styles_for_type(members, assignment, type, next_style_id, &member_keys);
    for (size_t i = 0; i < members.size(); ++i)
      shape_style[member_keys[i].first][member_keys[i].second] =
          next_style_id + assignment.labels[i];
    next_style_id += static_cast<int>(styles.size());
    for (auto& style : styles) lnode.styles.push_back(std::move(style));
  }

  for (int ci = 0; ci < static_cast<int>(category_chunks.size()); ++ci) {
    CountVector cv = count_vector(category_chunks[ci]);
    cv.source_chunk = ci;
    lnode.count_vectors.push_back(std::move(cv));
  }

  // conditional table: ordered shape pairs (A, B), keyed by A's position
  // relative to B, conditioned on B's style
  std::map<int, std::map<std::pair<int, RelKey>, int>> counts;
  std::map<int, int> totals;
  for (size_t ci = 0; ci < category_chunks.size(); ++ci) {
    const auto& shapes = analysis.shapes[ci];
    for (size_t i = 0; i < shapes.size(); ++i) {
      for (size_t j = 0; j < shapes.size(); ++j) {
        if (i == j) continue;
        int s1 = shape_style[ci][i];
        int s2 = shape_style[ci][j];
        RelKey key = rel_key(shapes[i], shapes[j]);
        ++counts[s2][{s1, key}];
        ++totals[s2];
      }
    }
  }
  for (const auto& [s2, dist] : counts)
    for (const auto& [key, c] : dist)
      lnode.cond_table[s2][key] = static_cast<double>(c) / totals[s2];

  // chunk-level co-occurrence, p(s1 | s2)
  for (const auto& s1 : lnode.styles) {
    for (const auto& s2 : lnode.styles) {
      int both = 0;
      for (int chunk : s1.chunk_ids)
        if (s2.chunk_ids.count(chunk)) ++both;
      if (!s2.chunk_ids.empty())
        lnode.cooccur[{s1.id, s2.id}] =
            static_cast<double>(both) / static_cast<double>(s2.chunk_ids.size());
    }
  }

  // per-edge mean cardinal vectors, canonical low-id-to-high-id direction
  std::map<std::pair<int, int>, std::pair<int, std::array<double, 8>>> sums;
  for (size_t ci = 0; ci < category_chunks.size(); ++ci) {
    const auto& shapes = analysis.shapes[ci];
    for (size_t i = 0; i < shapes.size(); ++i) {
      for (size_t j = 0; j < shapes.size(); ++j) {
        if (i == j) continue;
        int sa = shape_style[ci][i];
        int sb = shape_style[ci][j];
        if (sa >= sb) continue;
        auto feature = relation_vectors(shapes[i], shapes[j]).as_array();
        auto& [count, sum] = sums[{sa, sb}];
        ++count;
        for (int d = 0; d < 8; ++d) sum[d] += feature[d];
      }
    }
  }
  for (const auto& [pair, cs] : sums) {
    EdgeStat stat;
    stat.observations = cs.first;
    for (int d = 0; d < 8; ++d) stat.mean_feature[d] = cs.second[d] / cs.first;
    lnode.edge_stats[pair] = stat;
  }

  lnode.finalize();
  return lnode;
}

double cond_prob(const LNode& lnode, int s1, const RelKey& rel, int s2) {
  if (!lnode.style_by_id(s1))
    throw std::invalid_argument("cond_prob: unknown style id " + std::to_string(s1));
  if (!lnode.style_by_id(s2))
    throw std::invalid_argument("cond_prob: unknown style id " + std::to_string(s2));
  auto it = lnode.cond_table.find(s2);
  if (it == lnode.cond_table.end()) return 0.0;
  auto jt = it->second.find({s1, rel});
  return jt == it->second.end() ? 0.0 : jt->second;
}

std::optional<int> assign_style(const LNode& lnode, const StyleExemplar& exemplar) {
  const double diag = lnode.chunk_diag();
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& style : lnode.styles) {
    if (style.sprite_type != exemplar.sprite_type) continue;
    double d = style_distance(exemplar, style.medoid_exemplar, diag);
    if (d < best_d) {
      best_d = d;
      best = style.id;
    }
  }
  return best;
}

double score_chunk(const LevelChunk& chunk, const LNode& lnode) {
  auto shapes = extract_shapes(chunk);
  const int n = static_cast<int>(shapes.size());
  if (n <= 1) return 0.0;
  auto relsets = build_relation_sets(shapes);

  std::vector<std::optional<int>> styles(n);
  for (int i = 0; i < n; ++i)
    styles[i] = assign_style(lnode, make_exemplar(shapes[i], relsets[i]));

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!styles[i] || !styles[j]) continue;  // unassignable shapes contribute 0
      sum += cond_prob(lnode, *styles[i], rel_key(shapes[i], shapes[j]), *styles[j]);
    }
  }
  return sum / n;
}

}  // namespace levelblend
