// Finds the style-axis gain at which the style regime's mean full-space
// score matches the unusual regime's under the fixture plan. The result is
// frozen into default_preset(); rerun only when regenerating fixtures.
#include "latent_diversity/stats.hpp"
#include "latent_diversity/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace latent_diversity;

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the style regime gain"};
  std::uint64_t data_seed = 11;
  std::uint64_t plan_seed = 7;
  Eigen::Index n = 45;
  Eigen::Index d = 512;
  int k = kDefaultK;
  app.add_option("--data-seed", data_seed);
  app.add_option("--plan-seed", plan_seed);
  app.add_option("--n", n);
  app.add_option("--d", d);
  app.add_option("--k", k);
  CLI11_PARSE(app, argc, argv);

  const ResamplingPlan plan{10, 30, plan_seed};
  const auto unusual = synthetic::generate_regime(synthetic::default_preset(synthetic::Regime::Unusual), n, d, data_seed);
  const auto unusual_scores = resample_scores(unusual, plan, k, Metric::Generic);
  const double target = mean_value(unusual_scores);

  auto style_mean = [&](double gain) {
    auto preset = synthetic::default_preset(synthetic::Regime::Style);
    preset.style_axis_gain = gain;
    const auto scores = resample_scores(synthetic::generate_regime(preset, n, d, data_seed), plan, k, Metric::Generic);
    return mean_value(scores);
  };

  double lo = 1.0, hi = 200.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (style_mean(mid) < target ? lo : hi) = mid;
  }
  const double gain = 0.5 * (lo + hi);
  auto preset = synthetic::default_preset(synthetic::Regime::Style);
  preset.style_axis_gain = gain;
  const auto style_scores =
      resample_scores(synthetic::generate_regime(preset, n, d, data_seed), plan, k, Metric::Generic);
  const auto p = compare_sets(style_scores, unusual_scores).p_value;
  std::cout << "unusual mean " << target << "\nstyle_axis_gain " << gain << "\nstyle mean "
            << mean_value(style_scores) << "\nMann-Whitney p " << p << "\n";
}
