#include "latent_diversity/error.hpp"

namespace latent_diversity {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateSpectrum:
    case ErrorCode::NumericalFailure:
    case ErrorCode::DegenerateVariance:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void rethrow_with_context(const Error& e, const std::string& context) {
  // what() already carries the code prefix; strip it so it is not doubled.
  std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  throw Error(e.code(), context + ": " + msg);
}

}  // namespace latent_diversity
