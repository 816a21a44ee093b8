#include "latent_diversity/error.hpp"
#include "latent_diversity/stats.hpp"
#include "latent_diversity/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace latent_diversity;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidData;
}

std::vector<double> range(double from, double to) {
  std::vector<double> v;
  for (double x = from; x <= to; x += 1.0) v.push_back(x);
  return v;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("subset draws are seed-deterministic, without replacement") {
  const ResamplingPlan plan{10, 30, 7};
  for (int i = 0; i < plan.n_subsets; ++i) {
    const auto a = subset_indices(45, plan, i);
    CHECK(a == subset_indices(45, plan, i));
    CHECK(a.size() == 30);
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(a.front() >= 0);
    CHECK(a.back() < 45);
  }
  CHECK(subset_indices(45, plan, 0) != subset_indices(45, plan, 1));
  CHECK(subset_indices(45, plan, 0) != subset_indices(45, ResamplingPlan{10, 30, 8}, 0));
}

TEST_CASE("resampled scores repeat exactly under the same seed") {
  const auto set = synthetic::generate_regime(synthetic::default_preset(synthetic::Regime::Usual), 45, 512, 3);
  const ResamplingPlan plan{10, 30, 7};
  const auto first = resample_scores(set, plan, 20, Metric::Tce);
  const auto second = resample_scores(set, plan, 20, Metric::Tce);
  REQUIRE(first.size() == 10);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].value == second[i].value);
    CHECK(first[i].n_samples == 30);
    CHECK(first[i].kind == ScoreKind::TCE);
  }
}

TEST_CASE("resampling preconditions") {
  const auto set = test_support::random_set(45, 16, 1);
  CHECK(code_of([&] { resample_scores(set, {10, 50, 7}, 5, Metric::Generic); }) == ErrorCode::InsufficientSamples);
  CHECK(code_of([&] { resample_scores(set, {10, 30, 7}, 30, Metric::Generic); }) == ErrorCode::RankDeficient);
  CHECK(code_of([&] { resample_scores(set, {10, 30, 7}, 5, Metric::Tie); }) == ErrorCode::SpaceMismatch);
}

TEST_CASE("rank failures report the subset index") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(45, 16);
  m.col(0).setLinSpaced(45, 0.0, 1.0);  // rank 1 everywhere
  const EmbeddingSet set(m, SpaceTag::custom(16));
  try {
    resample_scores(set, {10, 30, 7}, 3, Metric::Generic);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
    CHECK(std::string(e.what()).find("subset 0") != std::string::npos);
  }
}

TEST_CASE("low-noise subsets all score below unusual subsets") {
  using namespace synthetic;
  const auto low = generate_regime(default_preset(Regime::ControlLow), 45, 512, 5);
  const auto unusual = generate_regime(default_preset(Regime::Unusual), 45, 512, 5);
  const ResamplingPlan plan{10, 30, 7};
  const auto a = resample_scores(low, plan, 20, Metric::Tce);
  const auto b = resample_scores(unusual, plan, 20, Metric::Tce);
  double max_low = -1e300, min_unusual = 1e300;
  for (const auto& s : a) max_low = std::max(max_low, s.value);
  for (const auto& s : b) min_unusual = std::min(min_unusual, s.value);
  CHECK(max_low < min_unusual);
}

TEST_CASE("exact Mann-Whitney p for separated samples matches enumeration") {
  const auto a = range(1, 10);
  const auto b = range(11, 20);
  const double oracle = test_support::brute_force_mann_whitney_p(a, b);
  CHECK(oracle == doctest::Approx(2.0 / 184756.0).epsilon(1e-15));
  const auto r = compare_values(a, b);
  CHECK(r.exact);
  CHECK(r.statistic == 0.0);
  CHECK(std::abs(r.p_value - 2.0 / 184756.0) <= 1e-12);
  CHECK(r.significant_at == std::vector<double>{0.05, 0.01});
}

TEST_CASE("exact Mann-Whitney agrees with enumeration on random splits") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 7;
    const int m = 3 + (trial * 5) % 9;
    std::vector<double> a, b;
    for (int i = 0; i < n; ++i) a.push_back(normal(rng) + 0.1 * (trial % 3));
    for (int i = 0; i < m; ++i) b.push_back(normal(rng));
    const auto r = compare_values(a, b);
    REQUIRE(r.exact);
    CHECK(r.p_value == doctest::Approx(test_support::brute_force_mann_whitney_p(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("identical lists give no separation") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  const auto r = compare_values(a, a);
  CHECK_FALSE(r.exact);
  CHECK(r.p_value >= 0.99);
  const std::vector<double> flat(10, 3.0);
  CHECK(compare_values(flat, flat).p_value >= 0.99);
  CHECK(compare_values(flat, flat).significant_at.empty());
}

TEST_CASE("tie-corrected normal approximation") {
  // Reference values from scipy.stats.mannwhitneyu(method="asymptotic",
  // use_continuity=True): a = [1,2,2,3,3,3,4,5], b = [3,4,4,5,5,6,6,7,7]
  const std::vector<double> a = {1, 2, 2, 3, 3, 3, 4, 5};
  const std::vector<double> b = {3, 4, 4, 5, 5, 6, 6, 7, 7};
  const auto r = compare_values(a, b);
  CHECK_FALSE(r.exact);
  CHECK(r.statistic == 7.5);
  CHECK(r.p_value == doctest::Approx(0.006340074742489072).epsilon(1e-10));
}

TEST_CASE("test symmetry") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) a.push_back(normal(rng));
    for (int i = 0; i < 12; ++i) b.push_back(normal(rng) + 0.5);
    if (trial % 2) a[0] = b[0];  // exercise the tie path too
    for (auto test : {SignificanceTest::MannWhitneyU, SignificanceTest::WelchT}) {
      CHECK(std::abs(compare_values(a, b, test).p_value - compare_values(b, a, test).p_value) <= 1e-12);
    }
  }
}

TEST_CASE("shifting the upper sample further up never raises the p-value") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) a.push_back(normal(rng));
    for (int i = 0; i < 10; ++i) b.push_back(normal(rng) + 0.3);
    if (compare_values(a, b).statistic > 50.0) std::swap(a, b);  // b is the upper sample
    double previous = compare_values(a, b).p_value;
    for (double shift = 0.05; shift < 4.0; shift += 0.05) {
      std::vector<double> moved(b);
      for (double& v : moved) v += shift;
      const double p = compare_values(a, moved).p_value;
      CHECK(p <= previous + 1e-15);
      previous = p;
    }
  }
}

TEST_CASE("Welch's t") {
  // scipy.stats.ttest_ind(a, b, equal_var=False)
  const std::vector<double> a = {19.8, 20.4, 19.6, 17.8, 18.5, 18.9, 18.3, 18.9, 19.5, 22.0};
  const std::vector<double> b = {28.2, 26.6, 20.1, 23.3, 25.2, 22.1, 17.7, 27.6, 20.6, 13.7};
  const auto r = compare_values(a, b, SignificanceTest::WelchT);
  CHECK(r.statistic == doctest::Approx(-2.0740146266783652).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.06427999772458466).epsilon(1e-9));

  const std::vector<double> zeros(6, 0.0), ones(6, 1.0);
  CHECK(code_of([&] { compare_values(zeros, ones, SignificanceTest::WelchT); }) == ErrorCode::DegenerateVariance);
  CHECK(code_of([&] { compare_values(std::vector<double>{1.0}, ones, SignificanceTest::WelchT); }) ==
        ErrorCode::InsufficientSamples);
}

TEST_CASE("compare_sets refuses mixed score kinds") {
  DiversityScore tie_score{1.0, 20, SpaceTag::inception2048(), 30, ScoreKind::TIE};
  DiversityScore tce_score{1.0, 20, SpaceTag::clip512(), 30, ScoreKind::TCE};
  const std::vector<DiversityScore> a{tie_score, tie_score};
  const std::vector<DiversityScore> b{tce_score, tce_score};
  CHECK(code_of([&] { compare_sets(a, b); }) == ErrorCode::SpaceMismatch);
  CHECK(code_of([&] { compare_sets(a, std::vector<DiversityScore>{}); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("comparison report over regimes") {
  using namespace synthetic;
  std::vector<std::pair<std::string, EmbeddingSet>> sets;
  for (auto r : {Regime::ControlLow, Regime::Usual, Regime::Unusual}) {
    sets.emplace_back(std::string(to_string(r)), generate_regime(default_preset(r), 45, 512, 9));
  }
  const auto report = compare_regimes(sets, {10, 30, 7}, 20, Metric::Tce);
  CHECK(report.per_set.size() == 3);
  CHECK(report.pairwise.size() == 3);
  CHECK(report.kind == ScoreKind::TCE);
  CHECK(report.caveat == kOverlapCaveat);
  CHECK(&report.pair("usual", "control_low") == &report.pair("control_low", "usual"));
  CHECK(report.pair("control_low", "unusual").p_value < 0.01);
  CHECK_THROWS_AS(report.pair("usual", "style"), std::out_of_range);

  auto mixed = sets;
  mixed.emplace_back("other", test_support::random_set(45, 64, 1));
  CHECK(code_of([&] { compare_regimes(mixed, {10, 30, 7}, 20, Metric::Generic); }) == ErrorCode::SpaceMismatch);
  CHECK(code_of([&] { compare_regimes(sets, {1, 30, 7}, 20, Metric::Tce); }) == ErrorCode::InsufficientSamples);
}

}  // TEST_SUITE
