#include "latent_diversity/manifest.hpp"

#include "latent_diversity/error.hpp"
#include "latent_diversity/npy.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

namespace latent_diversity {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_manifest(const std::string& origin, const std::string& what) {
  throw Error(ErrorCode::InvalidManifest, origin + ": " + what);
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

bool is_image_extension(const std::string& ext) {
  static constexpr std::array<std::string_view, 8> kImages = {".png", ".jpg", ".jpeg", ".bmp",
                                                             ".gif", ".webp", ".tif", ".tiff"};
  return std::find(kImages.begin(), kImages.end(), ext) != kImages.end();
}

ResolvedSet concatenate(const std::string& name, const std::vector<fs::path>& files, std::optional<SpaceTag> space,
                        const std::string& origin) {
  std::vector<npy::ArrayData> blocks;
  blocks.reserve(files.size());
  Eigen::Index rows = 0;
  for (const auto& f : files) {
    if (!fs::exists(f)) throw Error(ErrorCode::MissingInput, f.string() + ": file not found (listed by " + origin + ")");
    blocks.push_back(npy::read_array(f));
    const auto& m = blocks.back().matrix;
    if (m.cols() != blocks.front().matrix.cols()) {
      throw Error(ErrorCode::SpaceMismatch, f.string() + ": D=" + std::to_string(m.cols()) + " differs from " +
                                                files.front().string() + " with D=" +
                                                std::to_string(blocks.front().matrix.cols()));
    }
    rows += m.rows();
  }
  const Eigen::Index cols = blocks.front().matrix.cols();
  const SpaceTag tag = space.value_or(SpaceTag::infer(cols));
  if (tag.dim() != cols) {
    throw Error(ErrorCode::SpaceMismatch, origin + ": space " + tag.name() + " expects D=" + std::to_string(tag.dim()) +
                                              " but files have D=" + std::to_string(cols));
  }
  Eigen::MatrixXd data(rows, cols);
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& m = blocks[i].matrix;
    data.middleRows(at, m.rows()) = m;
    for (Eigen::Index r = 0; r < m.rows(); ++r) ids.push_back(files[i].filename().string() + ":" + std::to_string(r));
    at += m.rows();
  }
  try {
    return ResolvedSet{name, EmbeddingSet(std::move(data), tag, std::move(ids)), {}};
  } catch (const Error& e) {
    rethrow_with_context(e, origin);
  }
}

}  // namespace

SetManifest parse_manifest(const std::string& json_text, const fs::path& base_dir, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad_manifest(origin, std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) bad_manifest(origin, "top level must be an object");

  SetManifest m;
  m.base_dir = base_dir;

  if (!doc.contains("set_name") || !doc["set_name"].is_string()) bad_manifest(origin, "'set_name' must be a string");
  m.set_name = doc["set_name"].get<std::string>();

  if (!doc.contains("space_tag")) bad_manifest(origin, "missing 'space_tag'");
  const auto& tag = doc["space_tag"];
  if (tag.is_string()) {
    const auto text = tag.get<std::string>();
    if (text == "inception2048") {
      m.space = SpaceTag::inception2048();
    } else if (text == "clip512") {
      m.space = SpaceTag::clip512();
    } else {
      bad_manifest(origin, "unknown space_tag '" + text + "'");
    }
  } else if (tag.is_object() && tag.size() == 1 && tag.contains("custom") && tag["custom"].is_number_integer() &&
             tag["custom"].get<long long>() >= 1) {
    m.space = SpaceTag::custom(tag["custom"].get<Eigen::Index>());
  } else {
    bad_manifest(origin, "space_tag must be \"inception2048\", \"clip512\" or {\"custom\": D}");
  }

  if (!doc.contains("files") || !doc["files"].is_array() || doc["files"].empty()) {
    bad_manifest(origin, "'files' must be a non-empty array of paths");
  }
  for (const auto& f : doc["files"]) {
    if (!f.is_string()) bad_manifest(origin, "'files' entries must be strings");
    m.files.emplace_back(f.get<std::string>());
  }

  if (doc.contains("labels") && !doc["labels"].is_null()) {
    if (!doc["labels"].is_array()) bad_manifest(origin, "'labels' must be an array of strings");
    std::vector<std::string> labels;
    for (const auto& l : doc["labels"]) {
      if (!l.is_string()) bad_manifest(origin, "'labels' entries must be strings");
      labels.push_back(l.get<std::string>());
    }
    m.labels = std::move(labels);
  }

  if (!doc.contains("created_by") || !doc["created_by"].is_string()) {
    bad_manifest(origin, "'created_by' must be a string");
  }
  m.created_by = doc["created_by"].get<std::string>();
  return m;
}

SetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, path.string() + ": cannot open manifest");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_manifest(text, path.parent_path(), path.string());
}

std::string manifest_to_json(const SetManifest& manifest) {
  json doc;
  doc["set_name"] = manifest.set_name;
  if (manifest.space.kind() == SpaceTag::Kind::Custom) {
    doc["space_tag"] = json{{"custom", manifest.space.dim()}};
  } else {
    doc["space_tag"] = manifest.space.name();
  }
  doc["files"] = json::array();
  for (const auto& f : manifest.files) doc["files"].push_back(f.generic_string());
  if (manifest.labels) doc["labels"] = *manifest.labels;
  doc["created_by"] = manifest.created_by;
  return doc.dump(2) + "\n";
}

void save_manifest(const SetManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingInput, path.string() + ": cannot open for writing");
  out << manifest_to_json(manifest);
}

ResolvedSet resolve_manifest(const SetManifest& manifest) {
  const std::string origin = "manifest '" + manifest.set_name + "'";
  if (manifest.files.empty()) bad_manifest(origin, "no files listed");
  std::vector<fs::path> files;
  for (const auto& f : manifest.files) files.push_back(f.is_absolute() ? f : manifest.base_dir / f);
  auto resolved = concatenate(manifest.set_name, files, manifest.space, origin);
  if (manifest.labels) {
    if (static_cast<Eigen::Index>(manifest.labels->size()) != resolved.set.rows()) {
      bad_manifest(origin, std::to_string(manifest.labels->size()) + " labels for " +
                               std::to_string(resolved.set.rows()) + " rows");
    }
    resolved.labels = *manifest.labels;
  }
  return resolved;
}

ResolvedSet load_embeddings(const fs::path& path, std::optional<SpaceTag> space) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingInput, path.string() + ": no such file or directory");
  if (fs::is_directory(path)) {
    std::vector<fs::path> arrays;
    bool saw_images = false;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = lower_extension(entry.path());
      if (ext == ".npy") arrays.push_back(entry.path());
      if (is_image_extension(ext)) saw_images = true;
    }
    if (arrays.empty()) {
      if (saw_images) {
        throw Error(ErrorCode::UnsupportedFormat,
                    path.string() + ": directory holds raw images; export embeddings first with the embedder "
                                    "bridge (`embed images --model <...> --out <dir>`)");
      }
      throw Error(ErrorCode::MissingInput, path.string() + ": directory contains no .npy files");
    }
    std::sort(arrays.begin(), arrays.end());
    return concatenate(path.filename().string(), arrays, space, path.string());
  }
  if (lower_extension(path) == ".json") {
    auto manifest = load_manifest(path);
    if (space) {
      if (!(*space == manifest.space)) {
        throw Error(ErrorCode::SpaceMismatch, path.string() + ": --space " + space->name() +
                                                  " conflicts with manifest space_tag " + manifest.space.name());
      }
    }
    return resolve_manifest(manifest);
  }
  if (is_image_extension(lower_extension(path))) {
    throw Error(ErrorCode::UnsupportedFormat,
                path.string() + ": raw image input; export embeddings first with the embedder bridge");
  }
  return concatenate(path.stem().string(), {path}, space, path.string());
}

}  // namespace latent_diversity
