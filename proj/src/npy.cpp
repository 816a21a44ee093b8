#include "latent_diversity/npy.hpp"

#include "latent_diversity/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>
#include <vector>

namespace latent_diversity::npy {

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kAlign = 64;

struct Header {
  DType dtype = DType::Float64;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::size_t data_offset = 0;
};

std::size_t item_size(DType d) { return d == DType::Float32 ? 4 : 8; }

[[noreturn]] void fail(ErrorCode code, const std::string& origin, const std::string& what) {
  throw Error(code, origin + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Returns the raw text following `'key':` up to (not including) the next
// top-level comma, or the parenthesized group for tuples.
std::string_view dict_value(std::string_view dict, std::string_view key, const std::string& origin) {
  std::string quoted = "'" + std::string(key) + "'";
  auto pos = dict.find(quoted);
  if (pos == std::string_view::npos) {
    quoted = "\"" + std::string(key) + "\"";
    pos = dict.find(quoted);
  }
  if (pos == std::string_view::npos) fail(ErrorCode::CorruptFile, origin, "header has no '" + std::string(key) + "' key");
  pos = dict.find(':', pos + quoted.size());
  if (pos == std::string_view::npos) fail(ErrorCode::CorruptFile, origin, "malformed header near '" + std::string(key) + "'");
  auto rest = trim(dict.substr(pos + 1));
  if (!rest.empty() && rest.front() == '(') {
    const auto close = rest.find(')');
    if (close == std::string_view::npos) fail(ErrorCode::CorruptFile, origin, "unterminated shape tuple");
    return rest.substr(0, close + 1);
  }
  const auto end = rest.find_first_of(",}");
  return trim(rest.substr(0, end));
}

Header parse_header(std::string_view bytes, const std::string& origin) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    fail(ErrorCode::UnsupportedFormat, origin, "missing \\x93NUMPY magic");
  }
  if (bytes.size() < 10) fail(ErrorCode::CorruptFile, origin, "file ends inside the preamble");
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if ((major != 1 && major != 2) || minor != 0) {
    fail(ErrorCode::UnsupportedFormat, origin,
         "format version " + std::to_string(major) + "." + std::to_string(minor) + " is not supported");
  }
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    prefix = 10;
  } else {
    if (bytes.size() < 12) fail(ErrorCode::CorruptFile, origin, "file ends inside the preamble");
    for (int i = 3; i >= 0; --i) header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + i]);
    prefix = 12;
  }
  if (bytes.size() < prefix + header_len) fail(ErrorCode::CorruptFile, origin, "file ends inside the header");
  const auto dict = bytes.substr(prefix, header_len);
  if (dict.find('{') == std::string_view::npos || dict.find('}') == std::string_view::npos) {
    fail(ErrorCode::CorruptFile, origin, "header is not a dictionary");
  }

  Header h;
  h.data_offset = prefix + header_len;

  auto descr = dict_value(dict, "descr", origin);
  if (descr.size() >= 2 && (descr.front() == '\'' || descr.front() == '"')) descr = descr.substr(1, descr.size() - 2);
  if (descr == "<f4") {
    h.dtype = DType::Float32;
  } else if (descr == "<f8") {
    h.dtype = DType::Float64;
  } else {
    fail(ErrorCode::UnsupportedFormat, origin, "dtype '" + std::string(descr) + "' is not <f4 or <f8");
  }

  const auto fortran = dict_value(dict, "fortran_order", origin);
  if (fortran == "True") fail(ErrorCode::UnsupportedFormat, origin, "fortran_order=True arrays are not accepted");
  if (fortran != "False") fail(ErrorCode::CorruptFile, origin, "fortran_order must be True or False");

  const auto shape = dict_value(dict, "shape", origin);
  if (shape.size() < 2 || shape.front() != '(' || shape.back() != ')') {
    fail(ErrorCode::CorruptFile, origin, "shape is not a tuple");
  }
  std::vector<long long> dims;
  auto body = shape.substr(1, shape.size() - 2);
  while (!trim(body).empty()) {
    const auto comma = body.find(',');
    const auto token = trim(body.substr(0, comma));
    if (token.empty()) break;
    long long v = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size() || v < 0) {
      fail(ErrorCode::CorruptFile, origin, "bad shape entry '" + std::string(token) + "'");
    }
    dims.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  if (dims.size() != 2) fail(ErrorCode::BadShape, origin, "expected a 2-D array, got ndim=" + std::to_string(dims.size()));
  if (dims[0] == 0 || dims[1] == 0) {
    fail(ErrorCode::BadShape, origin, "shape (" + std::to_string(dims[0]) + ", " + std::to_string(dims[1]) + ") is empty");
  }
  h.rows = static_cast<Eigen::Index>(dims[0]);
  h.cols = static_cast<Eigen::Index>(dims[1]);
  return h;
}

template <typename T>
T load_le(const char* p) {
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
  return std::bit_cast<T>(buf);
}

template <typename T>
void store_le(std::string& out, T value) {
  auto buf = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
  out.append(buf.data(), buf.size());
}

std::string read_file(const std::filesystem::path& path, std::size_t limit = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, path.string() + ": cannot open file");
  if (limit == 0) return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::string bytes(limit, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(limit));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  return bytes;
}

}  // namespace

ArrayData parse_array(const std::string& bytes, const std::string& origin) {
  const Header h = parse_header(bytes, origin);
  const std::size_t count = static_cast<std::size_t>(h.rows) * static_cast<std::size_t>(h.cols);
  const std::size_t expected = count * item_size(h.dtype);
  const std::size_t actual = bytes.size() - h.data_offset;
  if (actual != expected) {
    fail(ErrorCode::CorruptFile, origin,
         "header declares " + std::to_string(h.rows) + "x" + std::to_string(h.cols) + " (" +
             std::to_string(expected) + " payload bytes) but file holds " + std::to_string(actual));
  }
  ArrayData out;
  out.dtype = h.dtype;
  out.matrix.resize(h.rows, h.cols);
  const char* p = bytes.data() + h.data_offset;
  double* dst = out.matrix.data();
  if (h.dtype == DType::Float64) {
    for (std::size_t i = 0; i < count; ++i) dst[i] = load_le<double>(p + 8 * i);
  } else {
    for (std::size_t i = 0; i < count; ++i) dst[i] = static_cast<double>(load_le<float>(p + 4 * i));
  }
  return out;
}

ArrayData read_array(const std::filesystem::path& path) { return parse_array(read_file(path), path.string()); }

ArrayFile inspect_array(const std::filesystem::path& path) {
  // Version 1.0 headers are at most 10 + 65535 bytes.
  const std::string prefix = read_file(path, 10 + 65536);
  const Header h = parse_header(prefix, path.string());
  return {path, h.dtype, h.rows, h.cols};
}

std::string serialize_array(const Eigen::Ref<const RowMatrix>& matrix, DType dtype) {
  std::string dict = "{'descr': '";
  dict += dtype == DType::Float32 ? "<f4" : "<f8";
  dict += "', 'fortran_order': False, 'shape': (" + std::to_string(matrix.rows()) + ", " +
          std::to_string(matrix.cols()) + "), }";
  const std::size_t unpadded = kMagic.size() + 2 + 2 + dict.size() + 1;
  dict.append((kAlign - unpadded % kAlign) % kAlign, ' ');
  dict += '\n';

  std::string out;
  const std::size_t count = static_cast<std::size_t>(matrix.size());
  out.reserve(10 + dict.size() + count * item_size(dtype));
  out.append(kMagic);
  out += '\x01';
  out += '\x00';
  store_le<std::uint16_t>(out, static_cast<std::uint16_t>(dict.size()));
  out += dict;
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (dtype == DType::Float64) {
        store_le<double>(out, matrix(r, c));
      } else {
        store_le<float>(out, static_cast<float>(matrix(r, c)));
      }
    }
  }
  return out;
}

ArrayFile write_array(const Eigen::Ref<const RowMatrix>& matrix, const std::filesystem::path& path, DType dtype) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw Error(ErrorCode::BadShape, path.string() + ": refusing to write an empty matrix");
  }
  const std::string bytes = serialize_array(matrix, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingInput, path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::CorruptFile, path.string() + ": write failed");
  return {path, dtype, matrix.rows(), matrix.cols()};
}

}  // namespace latent_diversity::npy
