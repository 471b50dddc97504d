#include "sarfusion/io/dictionary_file.hpp"

#include <algorithm>
#include <bit>
#include <type_traits>
#include <cstring>
#include <string>

#include "sarfusion/errors.hpp"
#include "sarfusion/io/files.hpp"

namespace sarfusion::io {

namespace {

constexpr char kMagic[4] = {'C', 'D', 'L', 'F'};
constexpr double kLoadNormTolerance = 1e-6;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw DataError("dictionary file truncated");
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

std::uint64_t byte_sum(const std::vector<unsigned char>& bytes, std::size_t count) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < count; ++i) sum += bytes[i];
  return sum;
}

}  // namespace

std::vector<unsigned char> encode_dictionary(const CoupledDictionary& dict) {
  if (dict.ms.rows() != dict.brovey.rows() || dict.ms.cols() != dict.brovey.cols()) {
    throw DimensionError("coupled dictionaries differ in shape");
  }
  const auto p = static_cast<std::uint32_t>(dict.ms.rows());
  const auto a = static_cast<std::uint32_t>(dict.ms.cols());
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  out.reserve(4 + 12 + 2 * std::size_t{p} * a * 8 + 8);
  put_le(out, kDictionaryFormatVersion);
  put_le(out, p);
  put_le(out, a);
  for (const auto* d : {&dict.ms, &dict.brovey}) {
    for (Eigen::Index r = 0; r < d->rows(); ++r) {
      for (Eigen::Index c = 0; c < d->cols(); ++c) put_le(out, (*d)(r, c));
    }
  }
  put_le(out, byte_sum(out, out.size()));
  return out;
}

CoupledDictionary decode_dictionary(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw UnsupportedFormat("missing CDLF magic");
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kDictionaryFormatVersion) {
    throw VersionError("unsupported dictionary format version " + std::to_string(version));
  }
  const auto p = get_le<std::uint32_t>(bytes, pos);
  const auto a = get_le<std::uint32_t>(bytes, pos);
  const std::size_t expected = 16 + 2 * std::size_t{p} * a * 8 + 8;
  if (bytes.size() != expected) {
    throw DataError("dictionary file size " + std::to_string(bytes.size()) + ", expected " +
                    std::to_string(expected));
  }
  std::size_t tail = expected - 8;
  if (get_le<std::uint64_t>(bytes, tail) != byte_sum(bytes, expected - 8)) {
    throw ChecksumError("dictionary checksum mismatch");
  }
  CoupledDictionary dict{Eigen::MatrixXd(p, a), Eigen::MatrixXd(p, a)};
  for (auto* d : {&dict.ms, &dict.brovey}) {
    for (Eigen::Index r = 0; r < d->rows(); ++r) {
      for (Eigen::Index c = 0; c < d->cols(); ++c) (*d)(r, c) = get_le<double>(bytes, pos);
    }
  }
  if (!dict.ms.allFinite() || !dict.brovey.allFinite()) throw DataError("dictionary holds non-finite values");
  if (dict.max_norm_deviation() > kLoadNormTolerance) throw DataError("dictionary atoms are not unit-norm");
  return dict;
}

void save_dictionary(const CoupledDictionary& dict, const std::filesystem::path& path) {
  write_atomically(path, encode_dictionary(dict));
}

CoupledDictionary load_dictionary(const std::filesystem::path& path) {
  return decode_dictionary(read_file(path));
}

}  // namespace sarfusion::io
