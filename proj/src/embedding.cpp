#include "latent_diversity/embedding.hpp"

#include "latent_diversity/error.hpp"

#include <charconv>
#include <cmath>

namespace latent_diversity {

SpaceTag SpaceTag::infer(Eigen::Index dim) {
  if (dim == 2048) return inception2048();
  if (dim == 512) return clip512();
  return custom(dim);
}

std::optional<SpaceTag> SpaceTag::parse(std::string_view text) {
  if (text == "inception2048") return inception2048();
  if (text == "clip512") return clip512();
  constexpr std::string_view prefix = "custom:";
  if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
  const auto digits = text.substr(prefix.size());
  long long dim = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
  if (ec != std::errc() || end != digits.data() + digits.size() || dim < 1) return std::nullopt;
  return custom(static_cast<Eigen::Index>(dim));
}

std::string SpaceTag::name() const {
  switch (kind_) {
    case Kind::Inception2048: return "inception2048";
    case Kind::Clip512: return "clip512";
    case Kind::Custom: break;
  }
  return "custom:" + std::to_string(dim_);
}

void require_finite(const Eigen::MatrixXd& data) {
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
      if (!std::isfinite(data(r, c))) {
        throw Error(ErrorCode::InvalidData, "non-finite entry at row " + std::to_string(r) +
                                                ", column " + std::to_string(c));
      }
    }
  }
}

EmbeddingSet::EmbeddingSet(Eigen::MatrixXd data, SpaceTag space, std::vector<std::string> source_ids)
    : data_(std::move(data)), space_(space), source_ids_(std::move(source_ids)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error(ErrorCode::BadShape, "embedding set must have at least one row and one column, got " +
                                         std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
  }
  if (space_.dim() != data_.cols()) {
    throw Error(ErrorCode::SpaceMismatch, "space " + space_.name() + " expects D=" +
                                              std::to_string(space_.dim()) + " but data has D=" +
                                              std::to_string(data_.cols()));
  }
  if (!source_ids_.empty() && static_cast<Eigen::Index>(source_ids_.size()) != data_.rows()) {
    throw Error(ErrorCode::InvalidData, std::to_string(source_ids_.size()) + " source ids for " +
                                            std::to_string(data_.rows()) + " rows");
  }
  require_finite(data_);
}

EmbeddingSet EmbeddingSet::select_rows(const std::vector<Eigen::Index>& rows) const {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), data_.cols());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = data_.row(rows[i]);
    if (!source_ids_.empty()) ids.push_back(source_ids_[static_cast<std::size_t>(rows[i])]);
  }
  return EmbeddingSet(std::move(sub), space_, std::move(ids));
}

}  // namespace latent_diversity
