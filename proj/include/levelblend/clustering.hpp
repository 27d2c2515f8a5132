#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "levelblend/corpus.hpp"

namespace levelblend {

struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;
  double inertia = 0.0;  // sum of squared distances to assigned center/medoid
  std::vector<int> medoids;             // kmedoids only, ascending
  std::vector<double> inertia_history;  // kmeans only, one entry per Lloyd pass
};

/// f(K) values of the distortion-ratio model-selection statistic. f(1) = 1.
struct DistortionCurve {
  std::map<int, double> f_values;
};

using PointMatrix = std::vector<std::vector<double>>;
using DistanceFn = std::function<double(int, int)>;

/// Lloyd's algorithm with greedy farthest-point seeding from the seeded RNG.
/// Converges when no center moves more than 1e-9, or after 300 passes.
ClusterAssignment kmeans(const PointMatrix& points, int k, std::uint64_t seed);

/// Cluster-count selection over K-means inertia. Candidate counts are those
/// with f(K) < 0.85; among them the minimizer of f wins, otherwise K = 1.
std::pair<int, DistortionCurve> estimate_k(const PointMatrix& points, int k_max,
                                           std::uint64_t seed);

/// PAM-style best-improvement swap descent from seeded random medoids,
/// minimizing the sum of squared distances to medoids.
ClusterAssignment kmedoids(int n, const DistanceFn& distance, int k,
                           std::uint64_t seed);

/// Distortion-ratio selection in medoid space (squared-distance distortion,
/// heuristic dimension 2 for the alpha recurrence).
std::pair<int, DistortionCurve> estimate_k_medoids(int n, const DistanceFn& distance,
                                                   int k_max, std::uint64_t seed);

struct ChunkCategory {
  std::string id;                 // "<parent>" or "<parent>-<child>", 1-based
  std::vector<int> chunk_indices; // into the input chunk list
  std::vector<LevelChunk> chunks;
};

struct CategorizeResult {
  std::vector<ChunkCategory> categories;
  DistortionCurve curve;  // top-level K selection curve
};

/// Clusters chunks by feature vector; any cluster whose mean within-cluster
/// distance exceeds recluster_threshold times the corpus mean pairwise
/// distance is reclustered once by the same procedure.
CategorizeResult categorize_chunks(const std::vector<LevelChunk>& chunks,
                                   const TileLegend& legend, std::uint64_t seed,
                                   double recluster_threshold);

}  // namespace levelblend
