#pragma once

#include "latent_diversity/embedding.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace latent_diversity {

inline constexpr int kDefaultK = 20;

// Absolute and relative parts of the eigenvalue clamp floor.
inline constexpr double kClampAbs = 1e-12;
inline constexpr double kClampRel = 1e-10;

// Jitter added to both covariances when the Frechet square root fails once.
inline constexpr double kSqrtmJitter = 1e-6;

enum class Denominator { NMinus1, N };

enum class EigenMethod { Auto, Dense, Gram };

enum class ScoreKind { TIE, TCE, Generic };

std::string_view to_string(Denominator d);
std::string_view to_string(EigenMethod m);
std::string_view to_string(ScoreKind k);

struct CovarianceSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::Index n_samples = 0;
  Denominator denominator = Denominator::NMinus1;
  SpaceTag space = SpaceTag::custom(1);
};

/// Descending covariance eigenvalues. Negative round-off is clamped to zero;
/// `effective_rank` counts entries strictly above `clamp_floor`.
struct EigenSpectrum {
  std::vector<double> eigenvalues;
  Eigen::Index effective_rank = 0;
  double clamp_floor = kClampAbs;
  EigenMethod method = EigenMethod::Dense;
  SpaceTag space = SpaceTag::custom(1);
  Eigen::Index n_samples = 0;
};

struct DiversityScore {
  double value = 0.0;  // nats
  int k_used = 0;
  SpaceTag space = SpaceTag::custom(1);
  Eigen::Index n_samples = 0;
  ScoreKind kind = ScoreKind::Generic;
};

struct FidScore {
  double value = 0.0;
  SpaceTag space = SpaceTag::custom(1);
  Eigen::Index n_ref = 0;
  Eigen::Index n_gen = 0;
  double sqrtm_jitter = 0.0;
};

ScoreKind kind_for_space(const SpaceTag& space);

/// Column mean and (1/den) * Xc^T Xc of the row-centered data, symmetrized.
/// Requires N >= 2.
CovarianceSummary compute_summary(const EmbeddingSet& set, Denominator denominator = Denominator::NMinus1);

/// Builds a spectrum from raw eigenvalues: sorts descending, clamps negative
/// round-off to zero and counts the effective rank.
EigenSpectrum make_spectrum(std::vector<double> eigenvalues, EigenMethod method, SpaceTag space,
                            Eigen::Index n_samples);

/// Full dense eigendecomposition of an existing covariance (length D).
/// Throws RankDeficient when k exceeds the effective rank.
EigenSpectrum top_k_eigenvalues(const CovarianceSummary& summary, int k);

/// Spectrum straight from the data. The gram route diagonalizes the N x N
/// inner-product matrix of the centered rows instead of the D x D covariance
/// and returns min(N-1, D) values; `Auto` uses it when N < D.
EigenSpectrum top_k_eigenvalues(const EmbeddingSet& set, int k, EigenMethod method = EigenMethod::Auto,
                                Denominator denominator = Denominator::NMinus1);

/// (k/2) ln(2 pi e) + (1/2) sum_{j<k} ln(lambda_j) over the k largest values.
DiversityScore truncated_entropy(const EigenSpectrum& spectrum, int k);

/// The same formula on a known population spectrum, with no clamping.
double gaussian_truncated_entropy(std::span<const double> eigenvalues, int k);

/// Truncated Inception entropy; the set must be tagged inception2048.
DiversityScore tie(const EmbeddingSet& set, int k = kDefaultK, Denominator denominator = Denominator::NMinus1);

/// Truncated CLIP entropy; the set must be tagged clip512.
DiversityScore tce(const EmbeddingSet& set, int k = kDefaultK, Denominator denominator = Denominator::NMinus1);

/// Truncated entropy for a set in any space; kind follows the tag.
DiversityScore diversity(const EmbeddingSet& set, int k = kDefaultK,
                         Denominator denominator = Denominator::NMinus1);

// Throws SpaceMismatch unless kind, space and k all match.
void require_comparable(const DiversityScore& a, const DiversityScore& b);

// a - b, for comparable scores only.
double score_difference(const DiversityScore& a, const DiversityScore& b);

/// |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}). The square root is taken
/// through the symmetric product S1^{1/2} S2 S1^{1/2}, retried once with
/// jitter on failure.
FidScore frechet_distance(const CovarianceSummary& ref, const CovarianceSummary& gen);

}  // namespace latent_diversity
