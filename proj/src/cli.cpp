#include "latent_diversity/cli.hpp"

#include "latent_diversity/error.hpp"
#include "latent_diversity/latent_core.hpp"
#include "latent_diversity/manifest.hpp"
#include "latent_diversity/npy.hpp"
#include "latent_diversity/report_json.hpp"
#include "latent_diversity/stats.hpp"
#include "latent_diversity/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace latent_diversity::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  int k = kDefaultK;
  std::string space;
  std::string denominator = "n-1";
  std::string format = "human";
};

const CLI::Validator kSpaceValidator(
    [](std::string& text) -> std::string {
      if (SpaceTag::parse(text)) return {};
      return "--space must be inception2048, clip512 or custom:D, got '" + text + "'";
    },
    "SPACE");

void add_format(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"human", "json"}));
}

void add_space(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--space", o.space, "Latent space: inception2048, clip512 or custom:D")->check(kSpaceValidator);
}

void add_denominator(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--denominator", o.denominator, "Covariance denominator")->check(CLI::IsMember({"n-1", "n"}));
}

void add_k(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--k", o.k, "Number of leading eigenvalues")->check(CLI::Range(1, 1 << 20));
}

std::optional<SpaceTag> space_of(const CommonOptions& o) {
  if (o.space.empty()) return std::nullopt;
  return SpaceTag::parse(o.space);
}

Denominator denominator_of(const CommonOptions& o) {
  return o.denominator == "n" ? Denominator::N : Denominator::NMinus1;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << v;
  return s.str();
}

std::string human(const DiversityScore& s, const std::string& label) {
  return label + ": " + std::string(to_string(s.kind)) + " k=" + std::to_string(s.k_used) +
         " n=" + std::to_string(s.n_samples) + " space=" + s.space.name() + " value=" + fixed(s.value) + " nats";
}

Metric metric_for(const SpaceTag& space) {
  switch (space.kind()) {
    case SpaceTag::Kind::Inception2048: return Metric::Tie;
    case SpaceTag::Kind::Clip512: return Metric::Tce;
    case SpaceTag::Kind::Custom: break;
  }
  return Metric::Generic;
}

int cmd_entropy(const CommonOptions& o, const std::string& path, std::ostream& out) {
  const auto input = load_embeddings(path, space_of(o));
  DiversityScore score;
  try {
    score = score_set(input.set, o.k, metric_for(input.set.space()), denominator_of(o));
  } catch (const Error& e) {
    rethrow_with_context(e, path);
  }
  if (o.format == "json") {
    out << stable_dump(to_json(score)) << "\n";
  } else {
    out << human(score, path) << "\n";
  }
  return kExitOk;
}

int cmd_fid(const CommonOptions& o, const std::string& ref_path, const std::string& gen_path, std::ostream& out) {
  const auto ref = load_embeddings(ref_path, space_of(o));
  const auto gen = load_embeddings(gen_path, space_of(o));
  if (!(ref.set.space() == gen.set.space())) {
    throw Error(ErrorCode::SpaceMismatch, ref_path + " is in " + ref.set.space().name() + " but " + gen_path +
                                              " is in " + gen.set.space().name());
  }
  FidScore score;
  try {
    score = frechet_distance(compute_summary(ref.set, denominator_of(o)), compute_summary(gen.set, denominator_of(o)));
  } catch (const Error& e) {
    rethrow_with_context(e, ref_path + " vs " + gen_path);
  }
  if (o.format == "json") {
    out << stable_dump(to_json(score)) << "\n";
  } else {
    out << "FID " << ref_path << " vs " << gen_path << ": space=" << score.space.name()
        << " n_ref=" << score.n_ref << " n_gen=" << score.n_gen << " value=" << fixed(score.value)
        << " sqrtm_jitter=" << score.sqrtm_jitter << "\n";
  }
  return kExitOk;
}

struct CompareOptions {
  int n_subsets = 10;
  int subset_size = 30;
  std::uint64_t seed = 0;
  std::string test = "mann-whitney-u";
};

int cmd_compare(const CommonOptions& o, const CompareOptions& c, const std::vector<std::string>& paths,
                std::ostream& out) {
  std::vector<std::pair<std::string, EmbeddingSet>> sets;
  for (const auto& p : paths) {
    auto input = load_embeddings(p, space_of(o));
    for (const auto& [name, existing] : sets) {
      if (name == input.name) {
        throw Error(ErrorCode::InvalidManifest, p + ": duplicate set name '" + input.name + "'");
      }
    }
    sets.emplace_back(input.name, std::move(input.set));
  }
  const ResamplingPlan plan{c.n_subsets, c.subset_size, c.seed};
  const auto test = c.test == "welch-t" ? SignificanceTest::WelchT : SignificanceTest::MannWhitneyU;
  const auto report =
      compare_regimes(sets, plan, o.k, metric_for(sets.front().second.space()), test, denominator_of(o));
  if (o.format == "json") {
    out << stable_dump(to_json(report)) << "\n";
    return kExitOk;
  }
  for (const auto& [name, scores] : report.per_set) {
    const double mean = mean_value(scores);
    double var = 0.0;
    for (const auto& s : scores) var += (s.value - mean) * (s.value - mean);
    const double sd = scores.size() > 1 ? std::sqrt(var / static_cast<double>(scores.size() - 1)) : 0.0;
    out << name << ": " << to_string(report.kind) << " k=" << report.k_used << " subsets=" << scores.size()
        << " mean=" << fixed(mean) << " sd=" << fixed(sd) << "\n";
  }
  for (const auto& e : report.pairwise) {
    out << e.set_a << " vs " << e.set_b << ": " << to_string(report.test) << " statistic=" << fixed(e.result.statistic, 4)
        << " p=" << std::setprecision(6) << std::defaultfloat << e.result.p_value << "\n";
  }
  return kExitOk;
}

struct SynthOptions {
  std::string preset;
  Eigen::Index n = 45;
  Eigen::Index d = 512;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string dtype = "f8";
};

int cmd_synth(const CommonOptions& o, const SynthOptions& s, std::ostream& out) {
  const auto regime = *synthetic::parse_regime(s.preset);
  const auto space = space_of(o);
  const auto set = synthetic::generate_regime(synthetic::default_preset(regime), s.n, s.d, s.seed, space);
  const fs::path dir(s.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::MissingInput, dir.string() + ": cannot create directory (" + ec.message() + ")");

  const std::string stem(synthetic::to_string(regime));
  const npy::RowMatrix rows = set.data();
  npy::write_array(rows, dir / (stem + ".npy"), s.dtype == "f4" ? npy::DType::Float32 : npy::DType::Float64);

  SetManifest manifest;
  manifest.set_name = stem;
  manifest.space = set.space();
  manifest.files = {stem + ".npy"};
  manifest.labels = std::vector<std::string>(static_cast<std::size_t>(set.rows()), stem);
  manifest.created_by = "latent-diversity synth --preset " + stem + " --n " + std::to_string(s.n) + " --d " +
                        std::to_string(s.d) + " --seed " + std::to_string(s.seed) + " --dtype " + s.dtype;
  const fs::path manifest_path = dir / (stem + ".manifest.json");
  save_manifest(manifest, manifest_path);

  if (o.format == "json") {
    out << stable_dump(nlohmann::json{{"manifest", manifest_path.generic_string()},
                                      {"n", set.rows()},
                                      {"d", set.dims()},
                                      {"preset", stem},
                                      {"space", set.space().name()}})
        << "\n";
  } else {
    out << "wrote " << manifest_path.string() << " (" << set.rows() << "x" << set.dims() << ", " << stem << ")\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Within-set diversity metrics on latent embeddings", "latent-diversity"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* entropy = app.add_subcommand("entropy", "Truncated entropy (TIE/TCE) of one embedding set");
  std::string entropy_path;
  entropy->add_option("path", entropy_path, "Array file, directory of array files, or manifest")->required();
  add_k(*entropy, common);
  add_space(*entropy, common);
  add_denominator(*entropy, common);
  add_format(*entropy, common);

  auto* fid = app.add_subcommand("fid", "Frechet distance between two embedding sets");
  std::string ref_path, gen_path;
  fid->add_option("reference", ref_path, "Reference set")->required();
  fid->add_option("generated", gen_path, "Generated set")->required();
  add_space(*fid, common);
  add_denominator(*fid, common);
  add_format(*fid, common);

  auto* compare = app.add_subcommand("compare", "Resampled scores and pairwise significance across sets");
  std::vector<std::string> compare_paths;
  CompareOptions compare_opts;
  compare->add_option("sets", compare_paths, "Two or more manifests or array inputs")->required()->expected(2, -1);
  add_k(*compare, common);
  add_space(*compare, common);
  add_denominator(*compare, common);
  add_format(*compare, common);
  compare->add_option("--seed", compare_opts.seed, "Resampling seed");
  compare->add_option("--subsets", compare_opts.n_subsets, "Number of random subsets")->check(CLI::Range(2, 1 << 20));
  compare->add_option("--subset-size", compare_opts.subset_size, "Rows per subset")->check(CLI::Range(2, 1 << 30));
  compare->add_option("--test", compare_opts.test, "Significance test")
      ->check(CLI::IsMember({"mann-whitney-u", "welch-t"}));

  auto* synth = app.add_subcommand("synth", "Write a synthetic regime set as an array file plus manifest");
  SynthOptions synth_opts;
  std::vector<std::string> regime_names;
  for (auto r : synthetic::kAllRegimes) regime_names.emplace_back(synthetic::to_string(r));
  synth->add_option("--preset", synth_opts.preset, "Regime preset")->required()->check(CLI::IsMember(regime_names));
  synth->add_option("--n", synth_opts.n, "Number of rows")->check(CLI::Range(1, 1 << 24));
  synth->add_option("--d", synth_opts.d, "Dimension")->check(CLI::Range(9, 1 << 16));
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--out", synth_opts.out_dir, "Output directory")->required();
  synth->add_option("--dtype", synth_opts.dtype, "Array dtype")->check(CLI::IsMember({"f4", "f8"}));
  add_space(*synth, common);
  add_format(*synth, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run `latent-diversity " << sub->get_name() << " --help` for usage\n";
    }
    return kExitUsage;
  }

  if (synth->parsed() && !common.space.empty() && space_of(common)->dim() != synth_opts.d) {
    err << "error: --space " << common.space << " does not match --d " << synth_opts.d << "\n";
    return kExitUsage;
  }

  try {
    if (entropy->parsed()) return cmd_entropy(common, entropy_path, out);
    if (fid->parsed()) return cmd_fid(common, ref_path, gen_path, out);
    if (compare->parsed()) return cmd_compare(common, compare_opts, compare_paths, out);
    if (synth->parsed()) return cmd_synth(common, synth_opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical(e.code()) ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace latent_diversity::cli
