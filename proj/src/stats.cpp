#include "latent_diversity/stats.hpp"

#include "latent_diversity/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace latent_diversity {

namespace {

constexpr double kExactCellLimit = 10000.0;

void attach_significance(PairwiseResult& r) {
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  for (double alpha : {0.05, 0.01}) {
    if (r.p_value < alpha) r.significant_at.push_back(alpha);
  }
}

// Number of orderings of n x-values and m y-values with U = u, for all u.
std::vector<long double> mann_whitney_counts(int n, int m) {
  // f(i, j, u) = f(i-1, j, u-j) + f(i, j-1, u), swept over i.
  const int max_u = n * m;
  std::vector<std::vector<long double>> prev(static_cast<std::size_t>(m + 1)), cur(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) prev[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(max_u + 1), 0.0L);
  for (int j = 0; j <= m; ++j) prev[static_cast<std::size_t>(j)][0] = 1.0L;  // i = 0
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      auto& row = cur[static_cast<std::size_t>(j)];
      row.assign(static_cast<std::size_t>(max_u + 1), 0.0L);
      for (int u = 0; u <= i * j; ++u) {
        long double v = 0.0L;
        if (u - j >= 0) v += prev[static_cast<std::size_t>(j)][static_cast<std::size_t>(u - j)];
        if (j > 0) v += cur[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(u)];
        row[static_cast<std::size_t>(u)] = v;
      }
    }
    std::swap(prev, cur);
  }
  return prev[static_cast<std::size_t>(m)];
}

PairwiseResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t total = n + m;

  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(total);
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t q = i; q < j; ++q) {
      if (pooled[q].second == 0) rank_sum_a += avg_rank;
    }
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  PairwiseResult r;
  r.test = SignificanceTest::MannWhitneyU;
  r.statistic = rank_sum_a - nd * (nd + 1.0) / 2.0;

  if (!ties && nd * md <= kExactCellLimit) {
    const int small = static_cast<int>(std::min(n, m));
    const int large = static_cast<int>(std::max(n, m));
    const auto counts = mann_whitney_counts(small, large);
    long double all = 0.0L;
    for (auto c : counts) all += c;
    // The null distribution is symmetric, so the lower tail at min(U, nm - U)
    // covers both orientations of the pair.
    const auto low = static_cast<std::size_t>(std::lround(std::min(r.statistic, nd * md - r.statistic)));
    long double tail = 0.0L;
    for (std::size_t u = 0; u <= low; ++u) tail += counts[u];
    r.p_value = static_cast<double>(std::min(1.0L, 2.0L * tail / all));
    r.exact = true;
  } else {
    const double mean = nd * md / 2.0;
    const double big_n = nd + md;
    const double variance = nd * md / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if (variance <= 0.0) {
      r.p_value = 1.0;
    } else {
      const double z = std::max(0.0, std::abs(r.statistic - mean) - 0.5) / std::sqrt(variance);
      r.p_value = std::erfc(z / std::sqrt(2.0));
    }
  }
  attach_significance(r);
  return r;
}

double sample_variance(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

PairwiseResult welch(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "Welch's t needs at least 2 values per group");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
  const double va = sample_variance(a, ma) / na;
  const double vb = sample_variance(b, mb) / nb;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) {
    throw Error(ErrorCode::DegenerateVariance, "both groups have zero variance; Welch's t is undefined");
  }
  PairwiseResult r;
  r.test = SignificanceTest::WelchT;
  r.statistic = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  attach_significance(r);
  return r;
}

std::vector<double> values_of(std::span<const DiversityScore> scores) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.value);
  return out;
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Tie: return "tie";
    case Metric::Tce: return "tce";
    case Metric::Generic: return "generic";
  }
  return "?";
}

std::string_view to_string(SignificanceTest t) {
  return t == SignificanceTest::MannWhitneyU ? "mann-whitney-u" : "welch-t";
}

std::vector<Eigen::Index> subset_indices(Eigen::Index n_rows, const ResamplingPlan& plan, int subset_index) {
  if (plan.subset_size > n_rows) {
    throw Error(ErrorCode::InsufficientSamples, "subset size " + std::to_string(plan.subset_size) +
                                                    " exceeds the " + std::to_string(n_rows) + " available rows");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                    static_cast<std::uint32_t>(subset_index)};
  std::mt19937_64 rng(seq);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n_rows));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  const auto take = static_cast<std::size_t>(plan.subset_size);
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  rows.resize(take);
  std::sort(rows.begin(), rows.end());
  return rows;
}

DiversityScore score_set(const EmbeddingSet& set, int k, Metric metric, Denominator denominator) {
  switch (metric) {
    case Metric::Tie: return tie(set, k, denominator);
    case Metric::Tce: return tce(set, k, denominator);
    case Metric::Generic: break;
  }
  return diversity(set, k, denominator);
}

std::vector<DiversityScore> resample_scores(const EmbeddingSet& set, const ResamplingPlan& plan, int k,
                                            Metric metric, Denominator denominator) {
  if (plan.n_subsets < 1) throw Error(ErrorCode::InvalidData, "plan needs at least one subset");
  if (plan.subset_size < 2) throw Error(ErrorCode::InsufficientSamples, "subset size must be at least 2");
  if (plan.subset_size > set.rows()) {
    throw Error(ErrorCode::InsufficientSamples, "subset size " + std::to_string(plan.subset_size) +
                                                    " exceeds the " + std::to_string(set.rows()) + " available rows");
  }
  if (k > plan.subset_size - 1) {
    throw Error(ErrorCode::RankDeficient, "k=" + std::to_string(k) + " exceeds subset_size-1 = " +
                                              std::to_string(plan.subset_size - 1));
  }
  std::vector<DiversityScore> scores;
  scores.reserve(static_cast<std::size_t>(plan.n_subsets));
  for (int i = 0; i < plan.n_subsets; ++i) {
    const auto subset = set.select_rows(subset_indices(set.rows(), plan, i));
    try {
      scores.push_back(score_set(subset, k, metric, denominator));
    } catch (const Error& e) {
      rethrow_with_context(e, "subset " + std::to_string(i));
    }
  }
  return scores;
}

PairwiseResult compare_values(std::span<const double> a, std::span<const double> b, SignificanceTest test) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InsufficientSamples, "both score lists must be nonempty");
  return test == SignificanceTest::MannWhitneyU ? mann_whitney(a, b) : welch(a, b);
}

PairwiseResult compare_sets(std::span<const DiversityScore> a, std::span<const DiversityScore> b,
                            SignificanceTest test) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InsufficientSamples, "both score lists must be nonempty");
  for (const auto& s : a) require_comparable(a.front(), s);
  for (const auto& s : b) require_comparable(a.front(), s);
  const auto va = values_of(a);
  const auto vb = values_of(b);
  return compare_values(va, vb, test);
}

const PairwiseResult& ComparisonReport::pair(std::string_view a, std::string_view b) const {
  for (const auto& e : pairwise) {
    if ((e.set_a == a && e.set_b == b) || (e.set_a == b && e.set_b == a)) return e.result;
  }
  throw std::out_of_range("no pairwise entry for " + std::string(a) + " / " + std::string(b));
}

const std::vector<DiversityScore>& ComparisonReport::scores(std::string_view name) const {
  for (const auto& [set_name, s] : per_set) {
    if (set_name == name) return s;
  }
  throw std::out_of_range("no set named " + std::string(name));
}

ComparisonReport compare_regimes(const std::vector<std::pair<std::string, EmbeddingSet>>& sets,
                                 const ResamplingPlan& plan, int k, Metric metric, SignificanceTest test,
                                 Denominator denominator) {
  if (sets.size() < 2) throw Error(ErrorCode::InsufficientSamples, "comparison needs at least two sets");
  if (plan.n_subsets < 2) throw Error(ErrorCode::InsufficientSamples, "significance tests need at least 2 subsets");
  for (const auto& [name, set] : sets) {
    if (!(set.space() == sets.front().second.space())) {
      throw Error(ErrorCode::SpaceMismatch, "set '" + name + "' is in " + set.space().name() + " but '" +
                                                sets.front().first + "' is in " + sets.front().second.space().name());
    }
  }
  ComparisonReport report;
  report.test = test;
  report.space = sets.front().second.space();
  report.kind = kind_for_space(report.space);
  report.k_used = k;
  report.plan = plan;
  for (const auto& [name, set] : sets) {
    try {
      report.per_set.emplace_back(name, resample_scores(set, plan, k, metric, denominator));
    } catch (const Error& e) {
      rethrow_with_context(e, "set '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < report.per_set.size(); ++i) {
    for (std::size_t j = i + 1; j < report.per_set.size(); ++j) {
      report.pairwise.push_back({report.per_set[i].first, report.per_set[j].first,
                                 compare_sets(report.per_set[i].second, report.per_set[j].second, test)});
    }
  }
  return report;
}

double mean_value(std::span<const DiversityScore> scores) {
  if (scores.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : scores) acc += s.value;
  return acc / static_cast<double>(scores.size());
}

}  // namespace latent_diversity
