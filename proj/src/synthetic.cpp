#include "latent_diversity/synthetic.hpp"

#include "latent_diversity/error.hpp"
#include "latent_diversity/latent_core.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace latent_diversity::synthetic {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

[[noreturn]] void bad_parameter(const std::string& what) { throw Error(ErrorCode::InvalidData, what); }

}  // namespace

double GaussianSample::population_entropy(int k) const {
  return gaussian_truncated_entropy(population_eigenvalues, k);
}

Eigen::MatrixXd random_orthonormal(Eigen::Index d, Eigen::Index m, std::uint64_t seed) {
  if (m > d) bad_parameter("cannot draw " + std::to_string(m) + " orthonormal columns in dimension " + std::to_string(d));
  auto rng = make_rng(seed, 0x51u);
  const Eigen::MatrixXd g = gaussian_matrix(d, m, 1.0, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
}

GaussianSample sample_gaussian(const SpectrumSpec& spec, Eigen::Index n, std::uint64_t seed,
                               std::optional<SpaceTag> space) {
  if (n < 2) bad_parameter("sample_gaussian needs n >= 2, got " + std::to_string(n));
  if (spec.eigenvalues.empty()) bad_parameter("spectrum has no eigenvalues");
  const auto m = static_cast<Eigen::Index>(spec.eigenvalues.size());
  if (m > spec.d) bad_parameter("spectrum has more eigenvalues than dimensions");
  Eigen::VectorXd root(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = spec.eigenvalues[static_cast<std::size_t>(i)];
    if (!(v > 0.0)) bad_parameter("population eigenvalues must be positive");
    root(i) = std::sqrt(v);
  }
  const Eigen::MatrixXd basis = random_orthonormal(spec.d, m, spec.rotation_seed);
  auto rng = make_rng(seed, 0x6au);
  const Eigen::MatrixXd z = gaussian_matrix(n, m, 1.0, rng);
  Eigen::MatrixXd data = z * root.asDiagonal() * basis.transpose();
  return {EmbeddingSet(std::move(data), space.value_or(SpaceTag::infer(spec.d))), spec.eigenvalues};
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::ControlLow: return "control_low";
    case Regime::ControlHigh: return "control_high";
    case Regime::Usual: return "usual";
    case Regime::Unusual: return "unusual";
    case Regime::Style: return "style";
  }
  return "?";
}

std::optional<Regime> parse_regime(std::string_view name) {
  for (Regime r : kAllRegimes) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

RegimePreset default_preset(Regime regime) {
  switch (regime) {
    case Regime::ControlLow: return {regime, 1, 0.2, 0.0, 0.0};
    case Regime::ControlHigh: return {regime, 1, 1.0, 0.0, 0.0};
    case Regime::Usual: return {regime, 15, 1.0, 0.6, 0.0};
    case Regime::Unusual: return {regime, 45, 1.0, 1.5, 0.0};
    case Regime::Style: return {regime, 1, 1.0, 0.0, 20.07};
  }
  return {};
}

Eigen::MatrixXd style_subspace(Eigen::Index d) {
  if (d <= kStyleAxes) bad_parameter("style subspace needs d > " + std::to_string(kStyleAxes));
  Eigen::MatrixXd basis(d, kStyleAxes);
  const double scale = std::sqrt(2.0 / static_cast<double>(d));
  for (Eigen::Index j = 0; j < kStyleAxes; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      basis(i, j) = scale * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) *
                                     static_cast<double>(j + 1) / static_cast<double>(d));
    }
  }
  return basis;
}

EmbeddingSet project_out_style(const EmbeddingSet& set) {
  const Eigen::MatrixXd basis = style_subspace(set.dims());
  Eigen::MatrixXd projected = set.data() - (set.data() * basis) * basis.transpose();
  return EmbeddingSet(std::move(projected), set.space(), set.source_ids());
}

EmbeddingSet generate_regime(const RegimePreset& preset, Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                             std::optional<SpaceTag> space) {
  if (preset.n_clusters < 1) bad_parameter("n_clusters must be at least 1");
  if (n < preset.n_clusters) {
    bad_parameter("n=" + std::to_string(n) + " is smaller than n_clusters=" + std::to_string(preset.n_clusters));
  }
  if (d < 1) bad_parameter("d must be at least 1");
  if (preset.cluster_spread < 0.0 || preset.center_spread < 0.0 || preset.style_axis_gain < 0.0) {
    bad_parameter("spreads and gains must be nonnegative");
  }
  auto rng = make_rng(seed, 0x100u + static_cast<std::uint32_t>(preset.name));
  const Eigen::MatrixXd centers = gaussian_matrix(preset.n_clusters, d, 1.0, rng) * preset.center_spread;
  Eigen::MatrixXd data = gaussian_matrix(n, d, 1.0, rng) * preset.cluster_spread;
  for (Eigen::Index r = 0; r < n; ++r) data.row(r) += centers.row(r % preset.n_clusters);
  if (preset.name == Regime::Style && preset.style_axis_gain > 0.0) {
    const Eigen::MatrixXd basis = style_subspace(d);
    data += gaussian_matrix(n, kStyleAxes, preset.style_axis_gain, rng) * basis.transpose();
  }
  return EmbeddingSet(std::move(data), space.value_or(SpaceTag::infer(d)));
}

}  // namespace latent_diversity::synthetic
