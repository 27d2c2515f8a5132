#include "levelblend/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace levelblend {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == '\t') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

int parse_int(const std::string& s, int line_no) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("legend: invalid integer '" + s + "'", line_no);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

bool TileLegend::has_id(SpriteId id) const {
  for (const auto& [g, t] : entries)
    if (t.id == id) return true;
  return false;
}

SpriteId TileLegend::id_for(char glyph) const {
  auto it = entries.find(glyph);
  if (it == entries.end())
    throw std::invalid_argument(std::string("unknown glyph '") + glyph + "'");
  return it->second.id;
}

char TileLegend::glyph_for(SpriteId id) const {
  for (const auto& [g, t] : entries)
    if (t.id == id) return g;
  throw std::invalid_argument("sprite id " + std::to_string(id) + " not in legend");
}

const std::string& TileLegend::name_for(SpriteId id) const {
  for (const auto& [g, t] : entries)
    if (t.id == id) return t.name;
  throw std::invalid_argument("sprite id " + std::to_string(id) + " not in legend");
}

std::vector<SpriteId> TileLegend::sorted_ids() const {
  std::vector<SpriteId> ids;
  ids.reserve(entries.size());
  for (const auto& [g, t] : entries) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

int TileLegend::index_of(SpriteId id) const {
  auto ids = sorted_ids();
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id)
    throw std::invalid_argument("sprite id " + std::to_string(id) + " not in legend");
  return static_cast<int>(it - ids.begin());
}

TileLegend parse_legend(const std::string& text) {
  TileLegend legend;
  std::set<SpriteId> seen_ids;
  bool have_empty = false;
  SpriteId declared_empty = -1;

  auto lines = split_lines(text);
  for (int line_no = 0; line_no < static_cast<int>(lines.size()); ++line_no) {
    const std::string& line = lines[line_no];
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields[0] == "empty") {
      if (fields.size() != 2)
        throw ParseError("legend: expected 'empty<TAB>id'", line_no);
      if (have_empty)
        throw ParseError("legend: duplicate background declaration", line_no);
      declared_empty = parse_int(fields[1], line_no);
      have_empty = true;
      continue;
    }
    if (fields.size() != 3)
      throw ParseError("legend: expected 'glyph<TAB>id<TAB>name'", line_no);
    if (fields[0].size() != 1)
      throw ParseError("legend: glyph must be a single character, got '" + fields[0] + "'",
                       line_no);
    char glyph = fields[0][0];
    int id = parse_int(fields[1], line_no);
    if (legend.entries.count(glyph))
      throw ParseError(std::string("legend: duplicate glyph '") + glyph + "'", line_no);
    if (seen_ids.count(id))
      throw ParseError("legend: duplicate sprite id " + std::to_string(id), line_no);
    legend.entries[glyph] = SpriteType{id, fields[2]};
    seen_ids.insert(id);
  }

  if (!have_empty)
    throw ParseError("legend: missing background declaration ('empty<TAB>id')");
  if (declared_empty != 0)
    throw ParseError("legend: background sprite id must be 0, got " +
                     std::to_string(declared_empty));
  if (!seen_ids.count(0)) throw ParseError("legend: no sprite type with id 0");
  legend.empty_id = 0;
  return legend;
}

Level parse_level(const std::string& text, const TileLegend& legend,
                  const std::string& id) {
  Level level;
  level.id = id;

  auto lines = split_lines(text);
  size_t start = 0;
  if (!lines.empty() && lines[0].rfind("#tag:", 0) == 0) {
    level.tag = lines[0].substr(5);
    start = 1;
  }

  for (size_t i = start; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    int row = static_cast<int>(i - start);
    std::vector<SpriteId> grid_row;
    grid_row.reserve(line.size());
    for (int col = 0; col < static_cast<int>(line.size()); ++col) {
      auto it = legend.entries.find(line[col]);
      if (it == legend.entries.end())
        throw ParseError(std::string("level: unknown glyph '") + line[col] + "' at row " +
                             std::to_string(row) + ", col " + std::to_string(col),
                         row, col);
      grid_row.push_back(it->second.id);
    }
    if (!level.grid.empty() && grid_row.size() != level.grid.front().size())
      throw ParseError("level: ragged row " + std::to_string(row) + " (expected width " +
                           std::to_string(level.grid.front().size()) + ", got " +
                           std::to_string(grid_row.size()) + ")",
                       row);
    level.grid.push_back(std::move(grid_row));
  }

  if (level.grid.empty() || level.grid.front().empty())
    throw ParseError("level: empty grid");
  return level;
}

std::string render_level(const Level& level, const TileLegend& legend) {
  std::map<SpriteId, char> glyphs;
  for (const auto& [g, t] : legend.entries) glyphs[t.id] = g;

  std::string out;
  if (level.tag) out += "#tag:" + *level.tag + "\n";
  for (const auto& row : level.grid) {
    for (SpriteId id : row) {
      auto it = glyphs.find(id);
      if (it == glyphs.end())
        throw std::invalid_argument("render_level: sprite id " + std::to_string(id) +
                                    " not in legend");
      out.push_back(it->second);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<LevelChunk> segment_chunks(const Level& level, int width, int stride) {
  if (width < 1) throw std::invalid_argument("segment_chunks: width must be positive");
  if (stride < 1) throw std::invalid_argument("segment_chunks: stride must be positive");
  if (width > level.width())
    throw std::invalid_argument("segment_chunks: width " + std::to_string(width) +
                                " exceeds level width " + std::to_string(level.width()));

  std::vector<LevelChunk> chunks;
  for (int origin = 0; origin + width <= level.width(); origin += stride) {
    LevelChunk chunk;
    chunk.origin_col = origin;
    chunk.source_level = level.id;
    chunk.grid.reserve(level.grid.size());
    for (const auto& row : level.grid)
      chunk.grid.emplace_back(row.begin() + origin, row.begin() + origin + width);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

FeatureVector chunk_features(const LevelChunk& chunk, const TileLegend& legend) {
  FeatureVector features;
  features.values.assign(legend.type_count(), 0.0);

  const double cells = static_cast<double>(chunk.width()) * chunk.height();
  for (const auto& row : chunk.grid) {
    for (SpriteId id : row) {
      if (id == legend.empty_id) continue;
      features.values[legend.index_of(id)] += 1.0;
    }
  }
  for (double& v : features.values) v /= cells;
  // background entry stays zero by construction
  return features;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus corpus;
  const auto legend_path = dir / "legend.txt";
  try {
    corpus.legend = parse_legend(read_file(legend_path));
  } catch (const ParseError& e) {
    throw ParseError(legend_path.string() + ": " + e.what(), e.row, e.col);
  }

  const auto levels_dir = dir / "levels";
  if (!std::filesystem::is_directory(levels_dir))
    throw std::runtime_error("corpus: missing levels directory " + levels_dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(levels_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    try {
      corpus.levels.push_back(parse_level(read_file(file), corpus.legend,
                                          file.stem().string()));
    } catch (const ParseError& e) {
      throw ParseError(file.string() + ": " + e.what(), e.row, e.col);
    }
  }
  if (corpus.levels.empty())
    throw std::runtime_error("corpus: no levels found in " + levels_dir.string());
  return corpus;
}

}  // namespace levelblend
