#include "levelblend/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "levelblend/rng.hpp"

namespace levelblend {

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

/// First seed random, then repeatedly the point farthest from its nearest
/// chosen seed (ties to the lower index).
std::vector<int> farthest_point_seeds(const PointMatrix& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.size());
  std::vector<int> seeds;
  seeds.reserve(k);
  seeds.push_back(static_cast<int>(rng.index(n)));

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(seeds.size()) < k) {
    const auto& last = points[seeds.back()];
    for (int i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], sqdist(points[i], last));
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (nearest[i] > nearest[best]) best = i;
    seeds.push_back(best);
  }
  return seeds;
}

double alpha_for(int k, int dims) {
  // recurrence of the distortion-ratio method; defined for k >= 2
  double a = 1.0 - 3.0 / (4.0 * dims);
  for (int i = 3; i <= k; ++i) a = a + (1.0 - a) / 6.0;
  return a;
}

std::pair<int, DistortionCurve> select_k(const std::vector<double>& inertia_by_k,
                                         int k_max, int dims) {
  DistortionCurve curve;
  curve.f_values[1] = 1.0;
  for (int k = 2; k <= k_max; ++k) {
    double prev = inertia_by_k[k - 1];
    double cur = inertia_by_k[k];
    curve.f_values[k] = prev > 0.0 ? cur / (alpha_for(k, dims) * prev) : 1.0;
  }
  int best_k = 1;
  double best_f = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= k_max; ++k) {
    double f = curve.f_values[k];
    if (f < 0.85 && f < best_f) {
      best_f = f;
      best_k = k;
    }
  }
  return {best_k, curve};
}

}  // namespace

ClusterAssignment kmeans(const PointMatrix& points, int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw std::invalid_argument("kmeans: empty input");
  if (k < 1 || k > n)
    throw std::invalid_argument("kmeans: k must be in [1, " + std::to_string(n) + "]");
  const size_t dims = points.front().size();
  if (dims == 0) throw std::invalid_argument("kmeans: zero-dimensional points");
  for (const auto& p : points)
    if (p.size() != dims) throw std::invalid_argument("kmeans: ragged point matrix");

  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  for (int s : farthest_point_seeds(points, k, rng)) centers.push_back(points[s]);

  ClusterAssignment result;
  result.k = k;
  result.labels.assign(n, 0);

  for (int iter = 0; iter < 300; ++iter) {
    // assign
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sqdist(points[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        double d = sqdist(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.labels[i] = best;
    }

    // refill empty clusters with the currently worst-fit point
    std::vector<int> counts(k, 0);
    for (int l : result.labels) ++counts[l];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int worst = -1;
      double worst_d = 0.0;
      for (int i = 0; i < n; ++i) {
        if (counts[result.labels[i]] <= 1) continue;
        double d = sqdist(points[i], centers[result.labels[i]]);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      if (worst < 0 || worst_d == 0.0) break;  // nothing to steal
      --counts[result.labels[worst]];
      result.labels[worst] = c;
      counts[c] = 1;
      centers[c] = points[worst];
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += sqdist(points[i], centers[result.labels[i]]);
    result.inertia_history.push_back(inertia);

    // update
    std::vector<std::vector<double>> next(k, std::vector<double>(dims, 0.0));
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      ++counts[result.labels[i]];
      for (size_t d = 0; d < dims; ++d) next[result.labels[i]][d] += points[i][d];
    }
    double max_move = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // keep the old center
      for (size_t d = 0; d < dims; ++d) next[c][d] /= counts[c];
      max_move = std::max(max_move, sqdist(next[c], centers[c]));
      centers[c] = std::move(next[c]);
    }
    if (max_move < 1e-9 * 1e-9) break;
  }

  result.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    result.inertia += sqdist(points[i], centers[result.labels[i]]);
  return result;
}

std::pair<int, DistortionCurve> estimate_k(const PointMatrix& points, int k_max,
                                           std::uint64_t seed) {
  if (k_max < 1) throw std::invalid_argument("estimate_k: k_max must be positive");
  if (points.empty()) throw std::invalid_argument("estimate_k: empty input");
  if (k_max > static_cast<int>(points.size()))
    throw std::invalid_argument("estimate_k: k_max exceeds point count");
  const int dims = static_cast<int>(points.front().size());
  if (dims < 1) throw std::invalid_argument("estimate_k: zero-dimensional points");

  std::vector<double> inertia_by_k(k_max + 1, 0.0);
  for (int k = 1; k <= k_max; ++k)
    inertia_by_k[k] = kmeans(points, k, derive_seed(seed, k)).inertia;
  return select_k(inertia_by_k, k_max, dims);
}

ClusterAssignment kmedoids(int n, const DistanceFn& distance, int k,
                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("kmedoids: empty input");
  if (k < 1 || k > n)
    throw std::invalid_argument("kmedoids: k must be in [1, " + std::to_string(n) + "]");

  // cache the full matrix; spot-check symmetry and the zero diagonal
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dij = distance(i, j);
      if (dij < 0.0) throw std::invalid_argument("kmedoids: negative distance");
      d[i][j] = d[j][i] = dij;
    }
  }
  const int probe = std::min(n, 12);
  for (int i = 0; i < probe; ++i) {
    if (distance(i, i) != 0.0)
      throw std::invalid_argument("kmedoids: nonzero distance on diagonal");
    for (int j = i + 1; j < probe; ++j)
      if (std::abs(distance(j, i) - d[i][j]) > 1e-9)
        throw std::invalid_argument("kmedoids: asymmetric distance");
  }

  Rng rng(seed);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    size_t j = i + rng.index(n - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> medoids(pool.begin(), pool.begin() + k);

  auto cost_of = [&](const std::vector<int>& meds) {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int m : meds) best = std::min(best, d[i][m]);
      cost += best * best;
    }
    return cost;
  };

  double cost = cost_of(medoids);
  bool improved = true;
  while (improved) {
    improved = false;
    int best_pos = -1, best_h = -1;
    double best_cost = cost;
    for (int pos = 0; pos < k; ++pos) {
      for (int h = 0; h < n; ++h) {
        if (std::find(medoids.begin(), medoids.end(), h) != medoids.end()) continue;
        std::vector<int> trial = medoids;
        trial[pos] = h;
        double c = cost_of(trial);
        if (c < best_cost - 1e-15) {
          best_cost = c;
          best_pos = pos;
          best_h = h;
        }
      }
    }
    if (best_pos >= 0) {
      medoids[best_pos] = best_h;
      cost = best_cost;
      improved = true;
    }
  }

  std::sort(medoids.begin(), medoids.end());

  ClusterAssignment result;
  result.k = k;
  result.medoids = medoids;
  result.labels.assign(n, 0);
  result.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = d[i][medoids[0]];
    for (int c = 1; c < k; ++c) {
      if (d[i][medoids[c]] < best_d) {
        best_d = d[i][medoids[c]];
        best = c;
      }
    }
    result.labels[i] = best;
    result.inertia += best_d * best_d;
  }
  return result;
}

std::pair<int, DistortionCurve> estimate_k_medoids(int n, const DistanceFn& distance,
                                                   int k_max, std::uint64_t seed) {
  if (k_max < 1) throw std::invalid_argument("estimate_k_medoids: k_max must be positive");
  if (k_max > n) throw std::invalid_argument("estimate_k_medoids: k_max exceeds item count");

  std::vector<double> inertia_by_k(k_max + 1, 0.0);
  for (int k = 1; k <= k_max; ++k)
    inertia_by_k[k] = kmedoids(n, distance, k, derive_seed(seed, k)).inertia;
  return select_k(inertia_by_k, k_max, /*dims=*/2);
}

namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  return std::sqrt(sqdist(a, b));
}

double mean_pairwise(const PointMatrix& pts, const std::vector<int>& idx) {
  if (idx.size() < 2) return 0.0;
  double sum = 0.0;
  int pairs = 0;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j) {
      sum += euclid(pts[idx[i]], pts[idx[j]]);
      ++pairs;
    }
  return sum / pairs;
}

int chunk_k_max(int n) { return std::clamp(n / 2, 1, 16); }

}  // namespace

CategorizeResult categorize_chunks(const std::vector<LevelChunk>& chunks,
                                   const TileLegend& legend, std::uint64_t seed,
                                   double recluster_threshold) {
  const int n = static_cast<int>(chunks.size());
  if (n < 2) throw std::invalid_argument("categorize_chunks: need at least 2 chunks");

  PointMatrix features;
  features.reserve(n);
  for (const auto& chunk : chunks) features.push_back(chunk_features(chunk, legend).values);

  CategorizeResult result;
  auto [k, curve] = estimate_k(features, chunk_k_max(n), derive_seed(seed, 0));
  result.curve = std::move(curve);
  auto assignment = kmeans(features, k, derive_seed(seed, 1));

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const double corpus_mean = mean_pairwise(features, all);

  for (int parent = 0; parent < k; ++parent) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (assignment.labels[i] == parent) members.push_back(i);
    if (members.empty()) continue;

    const std::string parent_id = std::to_string(parent + 1);
    bool split = false;
    if (members.size() >= 2 && corpus_mean > 0.0 &&
        std::isfinite(recluster_threshold) &&
        mean_pairwise(features, members) > recluster_threshold * corpus_mean) {
      PointMatrix sub;
      sub.reserve(members.size());
      for (int i : members) sub.push_back(features[i]);
      auto [k2, sub_curve] =
          estimate_k(sub, chunk_k_max(static_cast<int>(sub.size())),
                     derive_seed(seed, 2 + parent));
      if (k2 > 1) {
        auto sub_assignment = kmeans(sub, k2, derive_seed(seed, 1000 + parent));
        for (int child = 0; child < k2; ++child) {
          ChunkCategory cat;
          cat.id = parent_id + "-" + std::to_string(child + 1);
          for (size_t m = 0; m < members.size(); ++m) {
            if (sub_assignment.labels[m] != child) continue;
            cat.chunk_indices.push_back(members[m]);
            cat.chunks.push_back(chunks[members[m]]);
          }
          if (!cat.chunk_indices.empty()) result.categories.push_back(std::move(cat));
        }
        split = true;
      }
    }
    if (!split) {
      ChunkCategory cat;
      cat.id = parent_id;
      cat.chunk_indices = members;
      for (int i : members) cat.chunks.push_back(chunks[i]);
      result.categories.push_back(std::move(cat));
    }
  }
  return result;
}

}  // namespace levelblend
