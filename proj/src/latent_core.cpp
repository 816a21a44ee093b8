#include "latent_diversity/latent_core.hpp"

#include "latent_diversity/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace latent_diversity {

namespace {

const double kLog2PiE = std::log(2.0 * std::numbers::pi * std::numbers::e);

double denominator_value(Eigen::Index n, Denominator d) {
  return d == Denominator::NMinus1 ? static_cast<double>(n - 1) : static_cast<double>(n);
}

double clamp_floor_for(double largest) { return std::max(kClampAbs, kClampRel * std::max(largest, 0.0)); }

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, std::string("eigen-iteration did not converge for ") + what);
  }
  return solver.eigenvalues();
}

void require_k(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidData, "k must be at least 1, got " + std::to_string(k));
}

[[noreturn]] void throw_rank_deficient(int k, Eigen::Index rank) {
  throw Error(ErrorCode::RankDeficient,
              "k=" + std::to_string(k) + " exceeds effective_rank " + std::to_string(rank));
}

EigenSpectrum spectrum_of(const EmbeddingSet& set, EigenMethod method, Denominator denominator) {
  if (set.rows() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "covariance needs at least 2 samples, got " +
                                                    std::to_string(set.rows()));
  }
  if (method == EigenMethod::Auto) method = set.rows() < set.dims() ? EigenMethod::Gram : EigenMethod::Dense;

  if (method == EigenMethod::Dense) {
    const auto summary = compute_summary(set, denominator);
    const Eigen::VectorXd values = symmetric_eigenvalues(summary.covariance, "covariance");
    return make_spectrum({values.data(), values.data() + values.size()}, EigenMethod::Dense, set.space(),
                         set.rows());
  }

  const Eigen::Index n = set.rows();
  const Eigen::MatrixXd centered = set.data().rowwise() - set.data().colwise().mean();
  Eigen::MatrixXd gram = centered * centered.transpose() / denominator_value(n, denominator);
  gram = 0.5 * (gram + gram.transpose()).eval();
  const Eigen::VectorXd values = symmetric_eigenvalues(gram, "gram matrix");
  // Centering removes one degree of freedom, so only the top min(N-1, D)
  // values can be nonzero.
  const Eigen::Index keep = std::min(n - 1, set.dims());
  std::vector<double> top(static_cast<std::size_t>(keep));
  for (Eigen::Index i = 0; i < keep; ++i) top[static_cast<std::size_t>(i)] = values(n - 1 - i);
  return make_spectrum(std::move(top), EigenMethod::Gram, set.space(), n);
}

struct SqrtTrace {
  double value;
  bool ok;
};

// Tr((S1 S2)^{1/2}) via the nonzero spectrum of S1^{1/2} S2 S1^{1/2}, formed in
// the eigenbasis of S1 restricted to eigenvalues above the clamp floor.
SqrtTrace sqrt_product_trace(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig1(s1);
  if (eig1.info() != Eigen::Success) return {0.0, false};
  const Eigen::VectorXd& lam = eig1.eigenvalues();
  const Eigen::Index d = lam.size();
  const double floor = clamp_floor_for(lam(d - 1));
  Eigen::Index rank = 0;
  while (rank < d && lam(d - 1 - rank) > floor) ++rank;
  if (rank == 0) return {0.0, true};

  const Eigen::MatrixXd basis = eig1.eigenvectors().rightCols(rank);
  const Eigen::VectorXd root = lam.tail(rank).cwiseSqrt();
  Eigen::MatrixXd inner = root.asDiagonal() * (basis.transpose() * s2 * basis) * root.asDiagonal();
  inner = 0.5 * (inner + inner.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(inner, Eigen::EigenvaluesOnly);
  if (eig2.info() != Eigen::Success) return {0.0, false};
  const Eigen::VectorXd& mu = eig2.eigenvalues();
  if (!mu.allFinite()) return {0.0, false};
  const double mu_max = std::max(mu.maxCoeff(), 0.0);
  if (mu.minCoeff() < -1e-8 * mu_max) return {0.0, false};
  double trace = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) trace += std::sqrt(std::max(mu(i), 0.0));
  return {trace, true};
}

}  // namespace

std::string_view to_string(Denominator d) { return d == Denominator::NMinus1 ? "n-1" : "n"; }

std::string_view to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::Auto: return "auto";
    case EigenMethod::Dense: return "dense";
    case EigenMethod::Gram: return "gram";
  }
  return "?";
}

std::string_view to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::TIE: return "TIE";
    case ScoreKind::TCE: return "TCE";
    case ScoreKind::Generic: return "generic_truncated_entropy";
  }
  return "?";
}

ScoreKind kind_for_space(const SpaceTag& space) {
  switch (space.kind()) {
    case SpaceTag::Kind::Inception2048: return ScoreKind::TIE;
    case SpaceTag::Kind::Clip512: return ScoreKind::TCE;
    case SpaceTag::Kind::Custom: break;
  }
  return ScoreKind::Generic;
}

CovarianceSummary compute_summary(const EmbeddingSet& set, Denominator denominator) {
  if (set.rows() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "covariance needs at least 2 samples, got " +
                                                    std::to_string(set.rows()));
  }
  require_finite(set.data());
  CovarianceSummary s;
  s.mean = set.data().colwise().mean().transpose();
  const Eigen::MatrixXd centered = set.data().rowwise() - s.mean.transpose();
  s.covariance = centered.transpose() * centered / denominator_value(set.rows(), denominator);
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose()).eval();
  s.n_samples = set.rows();
  s.denominator = denominator;
  s.space = set.space();
  return s;
}

EigenSpectrum make_spectrum(std::vector<double> eigenvalues, EigenMethod method, SpaceTag space,
                            Eigen::Index n_samples) {
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  EigenSpectrum s;
  s.clamp_floor = clamp_floor_for(eigenvalues.empty() ? 0.0 : eigenvalues.front());
  for (double& v : eigenvalues) {
    if (v < 0.0) v = 0.0;
    if (v > s.clamp_floor) ++s.effective_rank;
  }
  s.eigenvalues = std::move(eigenvalues);
  s.method = method;
  s.space = space;
  s.n_samples = n_samples;
  return s;
}

EigenSpectrum top_k_eigenvalues(const CovarianceSummary& summary, int k) {
  require_k(k);
  const Eigen::VectorXd values = symmetric_eigenvalues(summary.covariance, "covariance");
  auto spectrum = make_spectrum({values.data(), values.data() + values.size()}, EigenMethod::Dense,
                                summary.space, summary.n_samples);
  if (k > spectrum.effective_rank) throw_rank_deficient(k, spectrum.effective_rank);
  return spectrum;
}

EigenSpectrum top_k_eigenvalues(const EmbeddingSet& set, int k, EigenMethod method, Denominator denominator) {
  require_k(k);
  auto spectrum = spectrum_of(set, method, denominator);
  if (k > spectrum.effective_rank) throw_rank_deficient(k, spectrum.effective_rank);
  return spectrum;
}

DiversityScore truncated_entropy(const EigenSpectrum& spectrum, int k) {
  require_k(k);
  if (spectrum.effective_rank == 0) {
    throw Error(ErrorCode::DegenerateSpectrum, "spectrum has no eigenvalue above the clamp floor " +
                                                   std::to_string(spectrum.clamp_floor));
  }
  if (k > spectrum.effective_rank) throw_rank_deficient(k, spectrum.effective_rank);
  double log_sum = 0.0;
  for (int j = 0; j < k; ++j) {
    const double v = spectrum.eigenvalues[static_cast<std::size_t>(j)];
    if (!(v > spectrum.clamp_floor)) {
      throw Error(ErrorCode::DegenerateSpectrum, "eigenvalue " + std::to_string(j + 1) + " (" +
                                                     std::to_string(v) + ") is at or below the clamp floor");
    }
    log_sum += std::log(v);
  }
  DiversityScore score;
  score.value = 0.5 * k * kLog2PiE + 0.5 * log_sum;
  score.k_used = k;
  score.space = spectrum.space;
  score.n_samples = spectrum.n_samples;
  score.kind = kind_for_space(spectrum.space);
  return score;
}

double gaussian_truncated_entropy(std::span<const double> eigenvalues, int k) {
  require_k(k);
  if (static_cast<std::size_t>(k) > eigenvalues.size()) throw_rank_deficient(k, eigenvalues.size());
  std::vector<double> sorted(eigenvalues.begin(), eigenvalues.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double log_sum = 0.0;
  for (int j = 0; j < k; ++j) {
    if (!(sorted[static_cast<std::size_t>(j)] > 0.0)) {
      throw Error(ErrorCode::DegenerateSpectrum, "population eigenvalues must be positive");
    }
    log_sum += std::log(sorted[static_cast<std::size_t>(j)]);
  }
  return 0.5 * k * kLog2PiE + 0.5 * log_sum;
}

DiversityScore diversity(const EmbeddingSet& set, int k, Denominator denominator) {
  require_k(k);
  return truncated_entropy(spectrum_of(set, EigenMethod::Auto, denominator), k);
}

DiversityScore tie(const EmbeddingSet& set, int k, Denominator denominator) {
  if (set.space().kind() != SpaceTag::Kind::Inception2048) {
    throw Error(ErrorCode::SpaceMismatch, "TIE requires an inception2048 set, got " + set.space().name());
  }
  return diversity(set, k, denominator);
}

DiversityScore tce(const EmbeddingSet& set, int k, Denominator denominator) {
  if (set.space().kind() != SpaceTag::Kind::Clip512) {
    throw Error(ErrorCode::SpaceMismatch, "TCE requires a clip512 set, got " + set.space().name());
  }
  return diversity(set, k, denominator);
}

void require_comparable(const DiversityScore& a, const DiversityScore& b) {
  if (a.kind != b.kind || !(a.space == b.space) || a.k_used != b.k_used) {
    throw Error(ErrorCode::SpaceMismatch,
                "scores are not comparable: " + std::string(to_string(a.kind)) + "/" + a.space.name() +
                    "/k=" + std::to_string(a.k_used) + " vs " + std::string(to_string(b.kind)) + "/" +
                    b.space.name() + "/k=" + std::to_string(b.k_used));
  }
}

double score_difference(const DiversityScore& a, const DiversityScore& b) {
  require_comparable(a, b);
  return a.value - b.value;
}

FidScore frechet_distance(const CovarianceSummary& ref, const CovarianceSummary& gen) {
  const Eigen::Index d = ref.covariance.rows();
  if (gen.covariance.rows() != d || ref.mean.size() != d || gen.mean.size() != d) {
    throw Error(ErrorCode::SpaceMismatch, "Frechet distance needs equal dimensions, got D=" + std::to_string(d) +
                                              " and D=" + std::to_string(gen.covariance.rows()));
  }
  FidScore score;
  score.space = ref.space;
  score.n_ref = ref.n_samples;
  score.n_gen = gen.n_samples;

  auto root = sqrt_product_trace(ref.covariance, gen.covariance);
  double trace_sum = ref.covariance.trace() + gen.covariance.trace();
  if (!root.ok) {
    const Eigen::MatrixXd jitter = kSqrtmJitter * Eigen::MatrixXd::Identity(d, d);
    root = sqrt_product_trace(ref.covariance + jitter, gen.covariance + jitter);
    if (!root.ok) {
      throw Error(ErrorCode::NumericalFailure, "matrix square root failed even with jitter " +
                                                   std::to_string(kSqrtmJitter));
    }
    score.sqrtm_jitter = kSqrtmJitter;
    trace_sum += 2.0 * kSqrtmJitter * static_cast<double>(d);
  }
  const double mean_term = (ref.mean - gen.mean).squaredNorm();
  score.value = std::max(0.0, mean_term + trace_sum - 2.0 * root.value);
  return score;
}

}  // namespace latent_diversity
