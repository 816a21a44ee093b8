#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace latent_diversity::npy {

enum class DType { Float32, Float64 };

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ArrayFile {
  std::filesystem::path path;
  DType dtype = DType::Float64;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

struct ArrayData {
  RowMatrix matrix;  // widened to double
  DType dtype = DType::Float64;
};

// Reads a 2-D little-endian float32/float64 .npy file (format version 1.0 or 2.0).
//
// Errors: MissingInput (cannot open), UnsupportedFormat (magic, version,
// dtype, fortran_order), BadShape (ndim != 2 or a zero extent), CorruptFile
// (malformed header or payload length mismatch).
ArrayData read_array(const std::filesystem::path& path);

// Header and payload parsing from an in-memory buffer; `origin` names the
// source in error messages.
ArrayData parse_array(const std::string& bytes, const std::string& origin);

// Writes a version 1.0 file with the canonical header numpy itself produces.
ArrayFile write_array(const Eigen::Ref<const RowMatrix>& matrix, const std::filesystem::path& path,
                      DType dtype = DType::Float64);

std::string serialize_array(const Eigen::Ref<const RowMatrix>& matrix, DType dtype);

// Header probe without loading the payload.
ArrayFile inspect_array(const std::filesystem::path& path);

}  // namespace latent_diversity::npy
