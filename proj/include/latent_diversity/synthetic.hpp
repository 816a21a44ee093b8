#pragma once

#include "latent_diversity/embedding.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latent_diversity::synthetic {

/// Population spectrum embedded in R^d by a random orthogonal map drawn from
/// `rotation_seed`.
struct SpectrumSpec {
  Eigen::Index d = 1;
  std::vector<double> eigenvalues;  // descending, positive
  std::uint64_t rotation_seed = 0;
};

struct GaussianSample {
  EmbeddingSet set;
  std::vector<double> population_eigenvalues;

  // Entropy of the population Gaussian truncated to its k largest eigenvalues.
  double population_entropy(int k) const;
};

/// Rows drawn from N(0, Q diag(eigenvalues) Q^T).
GaussianSample sample_gaussian(const SpectrumSpec& spec, Eigen::Index n, std::uint64_t seed,
                               std::optional<SpaceTag> space = std::nullopt);

// d x m matrix with orthonormal columns, deterministic in `seed`.
Eigen::MatrixXd random_orthonormal(Eigen::Index d, Eigen::Index m, std::uint64_t seed);

enum class Regime { ControlLow, ControlHigh, Usual, Unusual, Style };

std::string_view to_string(Regime r);
std::optional<Regime> parse_regime(std::string_view name);
inline constexpr Regime kAllRegimes[] = {Regime::ControlLow, Regime::ControlHigh, Regime::Usual, Regime::Unusual,
                                         Regime::Style};

struct RegimePreset {
  Regime name = Regime::ControlHigh;
  int n_clusters = 1;
  double cluster_spread = 1.0;   // within-cluster std
  double center_spread = 0.0;    // between-cluster std
  double style_axis_gain = 0.0;  // std along the style subspace; style regime only
};

// Frozen defaults. Low-noise control uses 0.2x the high-noise spread.
RegimePreset default_preset(Regime regime);

inline constexpr Eigen::Index kStyleAxes = 8;

/// Fixed orthonormal d x 8 basis (DCT-II vectors 1..8) carrying the style
/// regime's extra variance. Depends only on d.
Eigen::MatrixXd style_subspace(Eigen::Index d);

/// Removes the style subspace component from every row; the "semantic"
/// view used by the restricted metric.
EmbeddingSet project_out_style(const EmbeddingSet& set);

/// Centers ~ N(0, center_spread^2 I), rows assigned round-robin to clusters
/// and perturbed by N(0, cluster_spread^2 I); the style regime adds
/// N(0, style_axis_gain^2) noise along each style axis.
EmbeddingSet generate_regime(const RegimePreset& preset, Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                             std::optional<SpaceTag> space = std::nullopt);

}  // namespace latent_diversity::synthetic
