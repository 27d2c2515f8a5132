#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "levelblend/clustering.hpp"
#include "levelblend/corpus.hpp"
#include "levelblend/model.hpp"

namespace levelblend {

inline constexpr const char* kModelFormat = "levelblend-model";
inline constexpr int kModelVersion = 1;

/// A learned model set: the legend it was learned against, the chunk
/// geometry, the run seed, the top-level distortion curve and the models.
struct ModelFile {
  int version = kModelVersion;
  TileLegend legend;
  int chunk_width = 16;
  int chunk_height = 0;
  std::uint64_t seed = 0;
  DistortionCurve curve;
  std::vector<LNode> lnodes;
};

/// Deterministic JSON; re-serializing a loaded file is byte-identical and
/// cond_prob round-trips exactly for every key.
std::string serialize_model(const ModelFile& model);
ModelFile deserialize_model(const std::string& json_text);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace levelblend
