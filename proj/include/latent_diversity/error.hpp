#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latent_diversity {

enum class ErrorCode {
  InsufficientSamples,
  InvalidData,
  RankDeficient,
  DegenerateSpectrum,
  NumericalFailure,
  SpaceMismatch,
  UnsupportedFormat,
  CorruptFile,
  BadShape,
  MissingInput,
  InvalidManifest,
  DegenerateVariance,
};

std::string_view to_string(ErrorCode code);

// Numerical errors are the ones a caller can usually fix by changing K or
// the data size; everything else is a problem with the input itself.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Re-throws `e` with `context` prepended, keeping the error code.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace latent_diversity
