#pragma once

// Test-only helpers: random data generators and independent oracles that do
// not share code paths with the library.

#include "latent_diversity/embedding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace test_support {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline latent_diversity::EmbeddingSet random_set(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  // Anisotropic so the spectrum is not flat.
  Eigen::MatrixXd m = random_matrix(rows, cols, seed);
  for (Eigen::Index c = 0; c < cols; ++c) m.col(c) *= 1.0 + 3.0 / (1.0 + static_cast<double>(c));
  return latent_diversity::EmbeddingSet(m, latent_diversity::SpaceTag::infer(cols));
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(d, d, seed ^ 0xabcdefULL));
  return qr.householderQ();
}

// Cyclic Jacobi rotations; slow but independent of Eigen's solvers.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// Two-sided exact Mann-Whitney p by enumerating every split of the pooled
// ranks (no ties). Feasible for n + m <= 20.
inline double brute_force_mann_whitney_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  const int n = static_cast<int>(a.size());
  const int total = static_cast<int>(pooled.size());
  auto u_of = [&](const std::vector<int>& ranks) {
    int sum = 0;
    for (int r : ranks) sum += r;
    return sum - n * (n + 1) / 2;
  };
  std::vector<int> observed;
  for (double v : a) observed.push_back(static_cast<int>(std::find(pooled.begin(), pooled.end(), v) - pooled.begin()) + 1);
  const int u_obs = u_of(observed);
  long long le = 0, ge = 0, all = 0;
  std::vector<bool> mask(static_cast<std::size_t>(total), false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    std::vector<int> ranks;
    for (int i = 0; i < total; ++i)
      if (mask[static_cast<std::size_t>(i)]) ranks.push_back(i + 1);
    const int u = u_of(ranks);
    le += u <= u_obs;
    ge += u >= u_obs;
    ++all;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(all));
}

inline std::filesystem::path fixture_dir() { return std::filesystem::path(LATENT_DIVERSITY_FIXTURES); }

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() /
           (name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace test_support
