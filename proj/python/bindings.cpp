#include "latent_diversity/cli.hpp"
#include "latent_diversity/error.hpp"
#include "latent_diversity/latent_core.hpp"
#include "latent_diversity/manifest.hpp"
#include "latent_diversity/npy.hpp"
#include "latent_diversity/stats.hpp"
#include "latent_diversity/synthetic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace latent_diversity;

namespace {

SpaceTag space_from(const std::optional<std::string>& name, Eigen::Index dim) {
  if (!name) return SpaceTag::infer(dim);
  const auto tag = SpaceTag::parse(*name);
  if (!tag) throw py::value_error("unknown space '" + *name + "'");
  return *tag;
}

EmbeddingSet make_set(const Eigen::MatrixXd& data, const std::optional<std::string>& space) {
  return EmbeddingSet(data, space_from(space, data.cols()));
}

Denominator denominator_from(const std::string& text) {
  if (text == "n-1") return Denominator::NMinus1;
  if (text == "n") return Denominator::N;
  throw py::value_error("denominator must be 'n-1' or 'n'");
}

EigenMethod method_from(const std::string& text) {
  if (text == "auto") return EigenMethod::Auto;
  if (text == "dense") return EigenMethod::Dense;
  if (text == "gram") return EigenMethod::Gram;
  throw py::value_error("method must be 'auto', 'dense' or 'gram'");
}

Metric metric_from(const std::string& text) {
  if (text == "tie") return Metric::Tie;
  if (text == "tce") return Metric::Tce;
  if (text == "generic") return Metric::Generic;
  throw py::value_error("metric must be 'tie', 'tce' or 'generic'");
}

SignificanceTest test_from(const std::string& text) {
  if (text == "mann-whitney-u") return SignificanceTest::MannWhitneyU;
  if (text == "welch-t") return SignificanceTest::WelchT;
  throw py::value_error("test must be 'mann-whitney-u' or 'welch-t'");
}

synthetic::Regime regime_from(const std::string& text) {
  const auto r = synthetic::parse_regime(text);
  if (!r) throw py::value_error("unknown regime '" + text + "'");
  return *r;
}

npy::DType dtype_from(const std::string& text) {
  if (text == "float32" || text == "f4") return npy::DType::Float32;
  if (text == "float64" || text == "f8") return npy::DType::Float64;
  throw py::value_error("dtype must be float32 or float64");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Truncated-entropy diversity metrics on latent embeddings";

  static py::exception<Error> error_type(m, "LatentDiversityError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = static_cast<py::object&>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.attr("DEFAULT_K") = kDefaultK;

  py::class_<DiversityScore>(m, "DiversityScore")
      .def_readonly("value", &DiversityScore::value)
      .def_readonly("k", &DiversityScore::k_used)
      .def_readonly("n", &DiversityScore::n_samples)
      .def_property_readonly("kind", [](const DiversityScore& s) { return std::string(to_string(s.kind)); })
      .def_property_readonly("space", [](const DiversityScore& s) { return s.space.name(); })
      .def("__float__", [](const DiversityScore& s) { return s.value; })
      .def("__repr__", [](const DiversityScore& s) {
        std::ostringstream os;
        os << "DiversityScore(kind=" << to_string(s.kind) << ", k=" << s.k_used << ", n=" << s.n_samples
           << ", value=" << s.value << ")";
        return os.str();
      });

  py::class_<FidScore>(m, "FidScore")
      .def_readonly("value", &FidScore::value)
      .def_readonly("n_ref", &FidScore::n_ref)
      .def_readonly("n_gen", &FidScore::n_gen)
      .def_readonly("sqrtm_jitter", &FidScore::sqrtm_jitter)
      .def_property_readonly("space", [](const FidScore& s) { return s.space.name(); });

  py::class_<EigenSpectrum>(m, "EigenSpectrum")
      .def_readonly("eigenvalues", &EigenSpectrum::eigenvalues)
      .def_readonly("effective_rank", &EigenSpectrum::effective_rank)
      .def_readonly("clamp_floor", &EigenSpectrum::clamp_floor)
      .def_property_readonly("method", [](const EigenSpectrum& s) { return std::string(to_string(s.method)); });

  py::class_<PairwiseResult>(m, "PairwiseResult")
      .def_readonly("statistic", &PairwiseResult::statistic)
      .def_readonly("p_value", &PairwiseResult::p_value)
      .def_readonly("significant_at", &PairwiseResult::significant_at)
      .def_readonly("exact", &PairwiseResult::exact);

  m.def(
      "diversity",
      [](const Eigen::MatrixXd& data, int k, std::optional<std::string> space, const std::string& denominator) {
        return diversity(make_set(data, space), k, denominator_from(denominator));
      },
      py::arg("data"), py::arg("k") = kDefaultK, py::arg("space") = py::none(), py::arg("denominator") = "n-1",
      "Truncated entropy of an (N, D) array; the kind follows the space.");
  m.def(
      "tie",
      [](const Eigen::MatrixXd& data, int k, const std::string& denominator) {
        return tie(EmbeddingSet(data, SpaceTag::inception2048()), k, denominator_from(denominator));
      },
      py::arg("data"), py::arg("k") = kDefaultK, py::arg("denominator") = "n-1");
  m.def(
      "tce",
      [](const Eigen::MatrixXd& data, int k, const std::string& denominator) {
        return tce(EmbeddingSet(data, SpaceTag::clip512()), k, denominator_from(denominator));
      },
      py::arg("data"), py::arg("k") = kDefaultK, py::arg("denominator") = "n-1");
  m.def(
      "top_k_eigenvalues",
      [](const Eigen::MatrixXd& data, int k, const std::string& method, const std::string& denominator) {
        return top_k_eigenvalues(make_set(data, std::nullopt), k, method_from(method), denominator_from(denominator));
      },
      py::arg("data"), py::arg("k"), py::arg("method") = "auto", py::arg("denominator") = "n-1");
  m.def(
      "covariance",
      [](const Eigen::MatrixXd& data, const std::string& denominator) {
        auto s = compute_summary(make_set(data, std::nullopt), denominator_from(denominator));
        return py::make_tuple(s.mean, s.covariance);
      },
      py::arg("data"), py::arg("denominator") = "n-1", "Returns (mean, covariance).");
  m.def(
      "fid",
      [](const Eigen::MatrixXd& ref, const Eigen::MatrixXd& gen, const std::string& denominator) {
        const auto d = denominator_from(denominator);
        return frechet_distance(compute_summary(make_set(ref, std::nullopt), d),
                                compute_summary(make_set(gen, std::nullopt), d));
      },
      py::arg("reference"), py::arg("generated"), py::arg("denominator") = "n-1");

  m.def(
      "read_array", [](const std::filesystem::path& path) { return Eigen::MatrixXd(npy::read_array(path).matrix); },
      py::arg("path"));
  m.def(
      "write_array",
      [](const Eigen::MatrixXd& data, const std::filesystem::path& path, const std::string& dtype) {
        const npy::RowMatrix rows = data;
        npy::write_array(rows, path, dtype_from(dtype));
      },
      py::arg("data"), py::arg("path"), py::arg("dtype") = "float64");
  m.def(
      "load_embeddings",
      [](const std::filesystem::path& path) {
        auto r = load_embeddings(path);
        return py::dict(py::arg("name") = r.name, py::arg("data") = r.set.data(),
                        py::arg("space") = r.set.space().name(), py::arg("labels") = r.labels);
      },
      py::arg("path"), "Loads an array file, a directory of array files, or a manifest.");

  m.def(
      "resample_scores",
      [](const Eigen::MatrixXd& data, int k, int n_subsets, int subset_size, std::uint64_t seed,
         std::optional<std::string> space, const std::string& metric) {
        return resample_scores(make_set(data, space), ResamplingPlan{n_subsets, subset_size, seed}, k,
                               metric_from(metric));
      },
      py::arg("data"), py::arg("k") = kDefaultK, py::arg("n_subsets") = 10, py::arg("subset_size") = 30,
      py::arg("seed") = 0, py::arg("space") = py::none(), py::arg("metric") = "generic");
  m.def(
      "compare_values",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& test) {
        return compare_values(a, b, test_from(test));
      },
      py::arg("a"), py::arg("b"), py::arg("test") = "mann-whitney-u");

  m.def(
      "generate_regime",
      [](const std::string& regime, Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
        return synthetic::generate_regime(synthetic::default_preset(regime_from(regime)), n, d, seed).data();
      },
      py::arg("regime"), py::arg("n") = 45, py::arg("d") = 512, py::arg("seed") = 0);
  m.def(
      "sample_gaussian",
      [](const std::vector<double>& eigenvalues, Eigen::Index d, Eigen::Index n, std::uint64_t seed,
         std::uint64_t rotation_seed) {
        return synthetic::sample_gaussian({d, eigenvalues, rotation_seed}, n, seed).set.data();
      },
      py::arg("eigenvalues"), py::arg("d"), py::arg("n"), py::arg("seed") = 0, py::arg("rotation_seed") = 0);
  m.def(
      "gaussian_entropy",
      [](const std::vector<double>& eigenvalues, int k) { return gaussian_truncated_entropy(eigenvalues, k); },
      py::arg("eigenvalues"), py::arg("k"), "Truncated entropy of a known population spectrum.");
  m.def(
      "project_out_style",
      [](const Eigen::MatrixXd& data) { return synthetic::project_out_style(make_set(data, std::nullopt)).data(); },
      py::arg("data"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}
