#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latent_diversity {

/// Identifies the latent space an embedding lives in. Scores computed in
/// different spaces are never comparable.
class SpaceTag {
 public:
  enum class Kind { Inception2048, Clip512, Custom };

  static SpaceTag inception2048() { return SpaceTag(Kind::Inception2048, 2048); }
  static SpaceTag clip512() { return SpaceTag(Kind::Clip512, 512); }
  static SpaceTag custom(Eigen::Index dim) { return SpaceTag(Kind::Custom, dim); }

  // Picks the named space when `dim` matches one, custom otherwise.
  static SpaceTag infer(Eigen::Index dim);

  /// Parses "inception2048", "clip512" or "custom:D".
  static std::optional<SpaceTag> parse(std::string_view text);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  std::string name() const;

  bool operator==(const SpaceTag&) const = default;

 private:
  SpaceTag(Kind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  Eigen::Index dim_;
};

/// N x D matrix of latent vectors for one set of artifacts.
///
/// The constructor enforces N >= 1, D >= 1, finite entries, a space tag whose
/// dimension equals D, and (when given) one source id per row.
class EmbeddingSet {
 public:
  EmbeddingSet(Eigen::MatrixXd data, SpaceTag space, std::vector<std::string> source_ids = {});

  const Eigen::MatrixXd& data() const { return data_; }
  const SpaceTag& space() const { return space_; }
  const std::vector<std::string>& source_ids() const { return source_ids_; }

  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index dims() const { return data_.cols(); }

  // Row subset in the given order; source ids follow their rows.
  EmbeddingSet select_rows(const std::vector<Eigen::Index>& rows) const;

 private:
  Eigen::MatrixXd data_;
  SpaceTag space_;
  std::vector<std::string> source_ids_;
};

// Throws InvalidData naming the first non-finite entry.
void require_finite(const Eigen::MatrixXd& data);

}  // namespace latent_diversity
