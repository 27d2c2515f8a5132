#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levelblend/model.hpp"

namespace levelblend {

struct ScoreDistribution {
  std::vector<double> scores;  // one per scored chunk
  std::string level_id;
  std::string model_set_id;
};

/// Scores every uniform chunk of a level with the maximum-scoring model.
/// With `sample`, uniformly subsamples that many chunks without replacement.
ScoreDistribution score_level(const Level& level, const std::vector<LNode>& models,
                              int chunk_width, std::optional<int> sample = std::nullopt,
                              std::uint64_t seed = 0);

struct RankedLevel {
  std::string level_id;
  double median = 0.0;
  double mean = 0.0;
};

/// Descending by median score; ties by descending mean, then level id.
std::vector<RankedLevel> rank_levels(const std::vector<Level>& levels,
                                     const std::vector<LNode>& models,
                                     int chunk_width);

enum class Alternative { two_sided, greater, less };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Mann-Whitney U test (U of the first sample). Exact p by enumeration when
/// n_a + n_b <= 12, otherwise normal approximation with tie and continuity
/// correction.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          Alternative alternative = Alternative::two_sided);

/// Wilcoxon signed-rank test on paired samples; zero differences are dropped.
/// W is the positive-rank sum. Exact p for n <= 12 by sign enumeration.
TestResult wilcoxon_signed_rank(const std::vector<double>& a,
                                const std::vector<double>& b,
                                Alternative alternative = Alternative::two_sided);

/// Tie-corrected Spearman rank correlation, p via the t approximation with
/// n - 2 degrees of freedom.
TestResult spearman(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

}  // namespace levelblend
