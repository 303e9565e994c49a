#include "rearrange/error.h"
#include "rearrange/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rearrange {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'A', '1'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace

void FeatureMatrix::validate() const {
  if (values.rows() == 0 || values.cols() == 0) {
    throw Error(ErrorKind::kMalformedHeader, "feature matrix '" + name + "' is empty");
  }
  if (!values.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "feature matrix '" + name + "' has non-finite values");
  }
  if (axis == Axis::kFrames) {
    if (frame_times.size() != static_cast<std::size_t>(values.rows())) {
      throw Error(ErrorKind::kMalformedHeader,
                  "feature matrix '" + name + "' frame_times length does not match rows");
    }
    for (std::size_t i = 0; i < frame_times.size(); ++i) {
      if (!std::isfinite(frame_times[i])) {
        throw Error(ErrorKind::kNonFinite, "feature matrix '" + name + "' has non-finite frame time");
      }
      if (i > 0 && frame_times[i] < frame_times[i - 1]) {
        throw Error(ErrorKind::kMalformedHeader,
                    "feature matrix '" + name + "' frame times not ascending");
      }
    }
  } else if (!frame_times.empty()) {
    throw Error(ErrorKind::kMalformedHeader,
                "feature matrix '" + name + "' is beat-synchronous but has frame times");
  }
}

std::vector<std::uint8_t> encode_feature_container(const FeatureMatrix& m) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + (m.axis == Axis::kFrames ? rows * 8 : 0) + rows * cols * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cols));
  out.push_back(static_cast<std::uint8_t>(m.axis));
  if (m.axis == Axis::kFrames) {
    for (double t : m.frame_times) put_le<double>(out, t);
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      put_le<float>(out, static_cast<float>(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
  return out;
}

FeatureMatrix decode_feature_container(std::span<const std::uint8_t> bytes, const std::string& name) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kMalformedHeader, "container '" + name + "' lacks FEA1 header");
  }
  const auto rows = get_le<std::uint32_t>(bytes, 4);
  const auto cols = get_le<std::uint32_t>(bytes, 8);
  const std::uint8_t axis_flag = bytes[12];
  if (axis_flag > 1) {
    throw Error(ErrorKind::kMalformedHeader, "container '" + name + "' has bad axis flag");
  }
  FeatureMatrix m;
  m.name = name;
  m.axis = static_cast<Axis>(axis_flag);
  const std::size_t times_bytes = m.axis == Axis::kFrames ? std::size_t{rows} * 8 : 0;
  const std::size_t expected = kHeaderSize + times_bytes + std::size_t{rows} * cols * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::kMalformedHeader,
                "container '" + name + "' size " + std::to_string(bytes.size()) +
                    " does not match header (expected " + std::to_string(expected) + ")");
  }
  std::size_t pos = kHeaderSize;
  if (m.axis == Axis::kFrames) {
    m.frame_times.resize(rows);
    for (auto& t : m.frame_times) {
      t = get_le<double>(bytes, pos);
      pos += 8;
    }
  }
  m.values.resize(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      m.values(i, j) = get_le<float>(bytes, pos);
      pos += 4;
    }
  }
  m.validate();
  return m;
}

FeatureMatrix read_feature_container(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open feature container " + path.string());
  const std::vector<std::uint8_t> bytes(std::istreambuf_iterator<char>(in), {});
  return decode_feature_container(bytes, name.empty() ? path.stem().string() : name);
}

void write_feature_container(const std::filesystem::path& path, const FeatureMatrix& m) {
  const auto bytes = encode_feature_container(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace rearrange
