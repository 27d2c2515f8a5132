#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levelblend {

using SpriteId = int;

struct SpriteType {
  SpriteId id = 0;
  std::string name;
};

/// Raised on malformed legend or level text. row/col are 0-based and -1 when
/// the location is not meaningful.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int row_ = -1, int col_ = -1)
      : std::runtime_error(msg), row(row_), col(col_) {}
  int row;
  int col;
};

/// Glyph-to-sprite-type mapping for a corpus. Sprite id 0 is always the
/// background ("empty") type.
struct TileLegend {
  std::map<char, SpriteType> entries;
  SpriteId empty_id = 0;

  int type_count() const { return static_cast<int>(entries.size()); }
  bool has_id(SpriteId id) const;
  SpriteId id_for(char glyph) const;
  char glyph_for(SpriteId id) const;
  const std::string& name_for(SpriteId id) const;
  /// Sprite ids in ascending order; defines feature-vector indexing.
  std::vector<SpriteId> sorted_ids() const;
  int index_of(SpriteId id) const;
};

struct Level {
  std::string id;
  std::vector<std::vector<SpriteId>> grid;  // [row][col], row 0 at the top
  std::optional<std::string> tag;

  int height() const { return static_cast<int>(grid.size()); }
  int width() const { return grid.empty() ? 0 : static_cast<int>(grid.front().size()); }
};

/// A fixed-width vertical slice of a level; the unit of learning, generation
/// and scoring. dwell_time stays empty for text-ingested corpora.
struct LevelChunk {
  std::vector<std::vector<SpriteId>> grid;
  int origin_col = 0;
  std::string source_level;
  std::optional<double> dwell_time;

  int height() const { return static_cast<int>(grid.size()); }
  int width() const { return grid.empty() ? 0 : static_cast<int>(grid.front().size()); }
};

/// Per-sprite-type normalized cell counts, indexed by TileLegend::sorted_ids.
struct FeatureVector {
  std::vector<double> values;
};

TileLegend parse_legend(const std::string& text);
Level parse_level(const std::string& text, const TileLegend& legend,
                  const std::string& id = "");
/// Inverse of parse_level; emits the optional #tag: line and LF-terminated rows.
std::string render_level(const Level& level, const TileLegend& legend);

std::vector<LevelChunk> segment_chunks(const Level& level, int width, int stride);
FeatureVector chunk_features(const LevelChunk& chunk, const TileLegend& legend);

struct Corpus {
  TileLegend legend;
  std::vector<Level> levels;
};

/// Loads `legend.txt` plus `levels/*.txt` from a corpus directory.
Corpus load_corpus(const std::filesystem::path& dir);

}  // namespace levelblend
