#pragma once

#include "latent_diversity/embedding.hpp"
#include "latent_diversity/latent_core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace latent_diversity {

/// Random-subset protocol: `n_subsets` subsets of `subset_size` rows, each
/// drawn without replacement and independently of the others.
struct ResamplingPlan {
  int n_subsets = 10;
  int subset_size = 30;
  std::uint64_t seed = 0;
};

enum class Metric { Tie, Tce, Generic };

enum class SignificanceTest { MannWhitneyU, WelchT };

std::string_view to_string(Metric m);
std::string_view to_string(SignificanceTest t);

inline constexpr std::string_view kOverlapCaveat =
    "subsets overlap, so per-subset scores are not independent; p-values overstate significance";

// Row indices of subset `subset_index`, sorted ascending. The generator is
// seeded from (plan.seed, subset_index) alone, so subsets can be drawn in any
// order or in parallel.
std::vector<Eigen::Index> subset_indices(Eigen::Index n_rows, const ResamplingPlan& plan, int subset_index);

DiversityScore score_set(const EmbeddingSet& set, int k, Metric metric,
                         Denominator denominator = Denominator::NMinus1);

std::vector<DiversityScore> resample_scores(const EmbeddingSet& set, const ResamplingPlan& plan, int k,
                                            Metric metric, Denominator denominator = Denominator::NMinus1);

struct PairwiseResult {
  double statistic = 0.0;  // U of the first sample, or Welch's t
  double p_value = 1.0;    // two-sided
  std::vector<double> significant_at;  // subset of {0.05, 0.01}
  SignificanceTest test = SignificanceTest::MannWhitneyU;
  bool exact = false;  // Mann-Whitney only: exact null distribution used
};

/// Two-sided test on raw values. Mann-Whitney uses the exact null
/// distribution when there are no ties and n*m <= 10000, the tie-corrected
/// normal approximation otherwise.
PairwiseResult compare_values(std::span<const double> a, std::span<const double> b,
                              SignificanceTest test = SignificanceTest::MannWhitneyU);

/// As compare_values, after checking all scores share kind, space and k.
PairwiseResult compare_sets(std::span<const DiversityScore> a, std::span<const DiversityScore> b,
                            SignificanceTest test = SignificanceTest::MannWhitneyU);

struct PairwiseEntry {
  std::string set_a;
  std::string set_b;
  PairwiseResult result;
};

struct ComparisonReport {
  std::vector<std::pair<std::string, std::vector<DiversityScore>>> per_set;  // input order
  std::vector<PairwiseEntry> pairwise;  // every unordered pair, input order
  SignificanceTest test = SignificanceTest::MannWhitneyU;
  ScoreKind kind = ScoreKind::Generic;
  SpaceTag space = SpaceTag::custom(1);
  int k_used = 0;
  ResamplingPlan plan;
  std::string caveat{kOverlapCaveat};

  // Symmetric lookup; throws std::out_of_range for unknown names.
  const PairwiseResult& pair(std::string_view a, std::string_view b) const;
  const std::vector<DiversityScore>& scores(std::string_view name) const;
};

ComparisonReport compare_regimes(const std::vector<std::pair<std::string, EmbeddingSet>>& sets,
                                 const ResamplingPlan& plan, int k, Metric metric,
                                 SignificanceTest test = SignificanceTest::MannWhitneyU,
                                 Denominator denominator = Denominator::NMinus1);

double mean_value(std::span<const DiversityScore> scores);

}  // namespace latent_diversity
