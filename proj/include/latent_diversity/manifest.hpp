#pragma once

#include "latent_diversity/embedding.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace latent_diversity {

/// JSON description of one embedding set split over array files:
///
///   { "set_name": "...", "space_tag": "inception2048" | "clip512" | {"custom": D},
///     "files": ["a.npy", ...], "labels": ["..."]?, "created_by": "..." }
///
/// Relative file paths resolve against the manifest's own directory.
struct SetManifest {
  std::string set_name;
  SpaceTag space = SpaceTag::clip512();
  std::vector<std::filesystem::path> files;
  std::optional<std::vector<std::string>> labels;
  std::string created_by;
  std::filesystem::path base_dir;
};

struct ResolvedSet {
  std::string name;
  EmbeddingSet set;
  std::vector<std::string> labels;  // empty when the manifest had none
};

SetManifest load_manifest(const std::filesystem::path& path);
SetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir,
                           const std::string& origin);
void save_manifest(const SetManifest& manifest, const std::filesystem::path& path);
std::string manifest_to_json(const SetManifest& manifest);

/// Concatenates the listed files in order. Source ids are "<file>:<row>".
ResolvedSet resolve_manifest(const SetManifest& manifest);

/// Loads a single .npy file, a directory of .npy files (lexicographic order),
/// or a manifest (.json). Without a manifest the space is `space` if given,
/// else inferred from D.
ResolvedSet load_embeddings(const std::filesystem::path& path, std::optional<SpaceTag> space = std::nullopt);

}  // namespace latent_diversity
