#include "latent_diversity/error.hpp"
#include "latent_diversity/manifest.hpp"
#include "latent_diversity/npy.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>

using namespace latent_diversity;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

void write_block(const fs::path& p, Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  npy::write_array(test_support::random_matrix(rows, cols, seed), p, npy::DType::Float32);
}

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

}  // namespace

TEST_SUITE("manifest") {

TEST_CASE("two 10x512 blocks concatenate in listed order") {
  test_support::TempDir dir("manifest_concat");
  write_block(dir.path / "b.npy", 10, 512, 1);
  write_block(dir.path / "a.npy", 10, 512, 2);
  write_text(dir.path / "set.json", R"({"set_name": "usual", "space_tag": "clip512",
      "files": ["b.npy", "a.npy"], "created_by": "unit test"})");
  const auto m = load_manifest(dir.path / "set.json");
  CHECK(m.set_name == "usual");
  CHECK(m.space == SpaceTag::clip512());
  CHECK_FALSE(m.labels.has_value());
  const auto resolved = resolve_manifest(m);
  CHECK(resolved.set.rows() == 20);
  CHECK(resolved.set.dims() == 512);
  CHECK(resolved.set.space() == SpaceTag::clip512());
  CHECK(resolved.set.source_ids().front() == "b.npy:0");
  CHECK(resolved.set.source_ids().back() == "a.npy:9");
  const auto b = npy::read_array(dir.path / "b.npy");
  CHECK(resolved.set.data().topRows(10) == b.matrix);
}

TEST_CASE("mixed dimensions are a space mismatch") {
  test_support::TempDir dir("manifest_mixed");
  write_block(dir.path / "a.npy", 3, 512, 1);
  write_block(dir.path / "b.npy", 3, 2048, 2);
  write_text(dir.path / "set.json", R"({"set_name": "x", "space_tag": "clip512",
      "files": ["a.npy", "b.npy"], "created_by": ""})");
  CHECK(code_of([&] { resolve_manifest(load_manifest(dir.path / "set.json")); }) == ErrorCode::SpaceMismatch);
}

TEST_CASE("space tag must match the files") {
  test_support::TempDir dir("manifest_tag");
  write_block(dir.path / "a.npy", 3, 64, 1);
  write_text(dir.path / "set.json", R"({"set_name": "x", "space_tag": "inception2048",
      "files": ["a.npy"], "created_by": ""})");
  CHECK(code_of([&] { resolve_manifest(load_manifest(dir.path / "set.json")); }) == ErrorCode::SpaceMismatch);
  write_text(dir.path / "custom.json", R"({"set_name": "x", "space_tag": {"custom": 64},
      "files": ["a.npy"], "created_by": ""})");
  CHECK(resolve_manifest(load_manifest(dir.path / "custom.json")).set.space() == SpaceTag::custom(64));
}

TEST_CASE("labels must cover every row") {
  test_support::TempDir dir("manifest_labels");
  write_block(dir.path / "a.npy", 3, 8, 1);
  write_text(dir.path / "short.json", R"({"set_name": "x", "space_tag": {"custom": 8},
      "files": ["a.npy"], "labels": ["usual", "usual"], "created_by": ""})");
  CHECK(code_of([&] { resolve_manifest(load_manifest(dir.path / "short.json")); }) == ErrorCode::InvalidManifest);
  write_text(dir.path / "ok.json", R"({"set_name": "x", "space_tag": {"custom": 8},
      "files": ["a.npy"], "labels": ["usual", "style", "usual"], "created_by": ""})");
  CHECK(resolve_manifest(load_manifest(dir.path / "ok.json")).labels[1] == "style");
}

TEST_CASE("missing files and malformed documents") {
  test_support::TempDir dir("manifest_bad");
  write_text(dir.path / "missing.json", R"({"set_name": "x", "space_tag": "clip512",
      "files": ["nope.npy"], "created_by": ""})");
  CHECK(code_of([&] { resolve_manifest(load_manifest(dir.path / "missing.json")); }) == ErrorCode::MissingInput);
  CHECK(code_of([&] { load_manifest(dir.path / "absent.json"); }) == ErrorCode::MissingInput);

  const char* bad[] = {
      "not json",
      R"([1, 2])",
      R"({"space_tag": "clip512", "files": ["a.npy"], "created_by": ""})",
      R"({"set_name": "x", "space_tag": "resnet", "files": ["a.npy"], "created_by": ""})",
      R"({"set_name": "x", "space_tag": {"custom": 0}, "files": ["a.npy"], "created_by": ""})",
      R"({"set_name": "x", "space_tag": "clip512", "files": [], "created_by": ""})",
      R"({"set_name": "x", "space_tag": "clip512", "files": ["a.npy"], "labels": "usual", "created_by": ""})",
      R"({"set_name": "x", "space_tag": "clip512", "files": ["a.npy"]})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK(code_of([&] { parse_manifest(text, dir.path, "inline"); }) == ErrorCode::InvalidManifest);
  }
}

TEST_CASE("manifests written by save_manifest load back") {
  test_support::TempDir dir("manifest_save");
  SetManifest m;
  m.set_name = "style";
  m.space = SpaceTag::custom(12);
  m.files = {"x.npy"};
  m.labels = std::vector<std::string>{"style"};
  m.created_by = "synth";
  save_manifest(m, dir.path / "m.json");
  const auto back = load_manifest(dir.path / "m.json");
  CHECK(back.set_name == m.set_name);
  CHECK(back.space == m.space);
  CHECK(back.files == m.files);
  CHECK(back.labels == m.labels);
  CHECK(back.created_by == m.created_by);
}

TEST_CASE("directory input concatenates .npy files lexicographically") {
  const auto resolved = load_embeddings(test_support::fixture_dir() / "numpy" / "dirinput");
  const auto whole = npy::read_array(test_support::fixture_dir() / "numpy" / "whole_40x16.npy");
  CHECK(resolved.set.rows() == 40);
  CHECK(resolved.set.data() == whole.matrix);
  CHECK(resolved.set.space() == SpaceTag::custom(16));
}

TEST_CASE("raw image directories point at the embedder bridge") {
  try {
    load_embeddings(test_support::fixture_dir() / "images");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedFormat);
    CHECK(std::string(e.what()).find("embed images") != std::string::npos);
  }
}

TEST_CASE("space override on bare arrays") {
  const auto path = test_support::fixture_dir() / "numpy" / "whole_40x16.npy";
  CHECK(load_embeddings(path, SpaceTag::custom(16)).set.space() == SpaceTag::custom(16));
  CHECK(code_of([&] { load_embeddings(path, SpaceTag::clip512()); }) == ErrorCode::SpaceMismatch);
}

}  // TEST_SUITE
