// RIFF/WAVE reader and writer for 16-bit PCM, 24-bit PCM and 32-bit float.

#include "rearrange/audio.h"
#include "rearrange/error.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rearrange {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const noexcept { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const noexcept { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    need(4);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw Error(ErrorKind::kMalformedHeader, "truncated WAV file");
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

int bytes_per_sample(SampleFormat f) {
  switch (f) {
    case SampleFormat::kPcm16: return 2;
    case SampleFormat::kPcm24: return 3;
    case SampleFormat::kFloat32: return 4;
  }
  return 2;
}

struct FmtChunk {
  int sample_rate = 0;
  int channels = 0;
  SampleFormat format = SampleFormat::kPcm16;
};

FmtChunk parse_fmt(ByteReader& r, std::uint32_t size) {
  if (size < 16) throw Error(ErrorKind::kMalformedHeader, "WAV fmt chunk too small");
  const std::size_t start = r.pos();
  std::uint16_t tag = r.u16();
  const std::uint16_t channels = r.u16();
  const std::uint32_t rate = r.u32();
  r.u32();  // byte rate
  r.u16();  // block align
  const std::uint16_t bits = r.u16();
  if (tag == kFormatExtensible) {
    if (size < 40) throw Error(ErrorKind::kMalformedHeader, "WAV extensible fmt chunk too small");
    r.u16();  // cbSize
    r.u16();  // valid bits
    r.u32();  // channel mask
    tag = r.u16();  // first two bytes of the subformat GUID
  }
  r.seek(start + size);

  FmtChunk fmt;
  fmt.sample_rate = static_cast<int>(rate);
  fmt.channels = channels;
  if (tag == kFormatPcm && bits == 16) {
    fmt.format = SampleFormat::kPcm16;
  } else if (tag == kFormatPcm && bits == 24) {
    fmt.format = SampleFormat::kPcm24;
  } else if (tag == kFormatFloat && bits == 32) {
    fmt.format = SampleFormat::kFloat32;
  } else {
    throw Error(ErrorKind::kMalformedHeader,
                "unsupported WAV encoding (tag " + std::to_string(tag) + ", " +
                    std::to_string(bits) + " bits)");
  }
  if (fmt.channels < 1 || fmt.sample_rate < 1) {
    throw Error(ErrorKind::kMalformedHeader, "WAV header has no channels or sample rate");
  }
  return fmt;
}

struct ParsedWav {
  FmtChunk fmt;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
};

ParsedWav parse_wav(const std::vector<unsigned char>& bytes) {
  ByteReader r(bytes);
  if (r.tag() != "RIFF") throw Error(ErrorKind::kMalformedHeader, "not a RIFF file");
  r.u32();
  if (r.tag() != "WAVE") throw Error(ErrorKind::kMalformedHeader, "not a WAVE file");

  ParsedWav out;
  bool have_fmt = false;
  bool have_data = false;
  while (r.has(8) && !have_data) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      out.fmt = parse_fmt(r, size);
      have_fmt = true;
    } else if (id == "data") {
      out.data_offset = r.pos();
      out.data_size = std::min<std::size_t>(size, bytes.size() - r.pos());
      have_data = true;
    } else {
      r.seek(r.pos() + size + (size & 1u));
    }
    if (id == "fmt " && (size & 1u)) r.seek(r.pos() + 1);
  }
  if (!have_fmt) throw Error(ErrorKind::kMalformedHeader, "WAV file has no fmt chunk");
  if (!have_data) throw Error(ErrorKind::kMalformedHeader, "WAV file has no data chunk");
  return out;
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

float decode_sample(const unsigned char* p, SampleFormat f) {
  switch (f) {
    case SampleFormat::kPcm16: {
      const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return static_cast<float>(v) / 32768.0f;
    }
    case SampleFormat::kPcm24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<float>(v) / 8388608.0f;
    }
    case SampleFormat::kFloat32: {
      std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                           (static_cast<std::uint32_t>(p[2]) << 16) |
                           (static_cast<std::uint32_t>(p[3]) << 24);
      float v;
      std::memcpy(&v, &bits, sizeof v);
      return v;
    }
  }
  return 0.0f;
}

void encode_sample(std::vector<unsigned char>& out, float x, SampleFormat f) {
  switch (f) {
    case SampleFormat::kPcm16: {
      const double scaled = std::clamp(std::nearbyint(static_cast<double>(x) * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
      break;
    }
    case SampleFormat::kPcm24: {
      const double scaled =
          std::clamp(std::nearbyint(static_cast<double>(x) * 8388608.0), -8388608.0, 8388607.0);
      const auto v = static_cast<std::uint32_t>(static_cast<std::int32_t>(scaled)) & 0xFFFFFFu;
      out.push_back(static_cast<unsigned char>(v & 0xFF));
      out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
      out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
      break;
    }
    case SampleFormat::kFloat32: {
      std::uint32_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      put_u32(out, bits);
      break;
    }
  }
}

}  // namespace

WavInfo read_wav_info(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  const ParsedWav parsed = parse_wav(bytes);
  WavInfo info;
  info.sample_rate = parsed.fmt.sample_rate;
  info.channels = parsed.fmt.channels;
  info.format = parsed.fmt.format;
  info.frames = parsed.data_size /
                (static_cast<std::size_t>(bytes_per_sample(info.format)) * static_cast<std::size_t>(info.channels));
  return info;
}

AudioBuffer decode_wav(const std::vector<unsigned char>& bytes) {
  const ParsedWav parsed = parse_wav(bytes);
  AudioBuffer audio;
  audio.sample_rate = parsed.fmt.sample_rate;
  audio.channels = parsed.fmt.channels;
  audio.format = parsed.fmt.format;
  const auto width = static_cast<std::size_t>(bytes_per_sample(audio.format));
  const std::size_t frame_bytes = width * static_cast<std::size_t>(audio.channels);
  const std::size_t n = (parsed.data_size / frame_bytes) * static_cast<std::size_t>(audio.channels);
  audio.samples.resize(n);
  const unsigned char* p = bytes.data() + parsed.data_offset;
  for (std::size_t i = 0; i < n; ++i) audio.samples[i] = decode_sample(p + i * width, audio.format);
  return audio;
}

AudioBuffer read_wav(const std::filesystem::path& path) { return decode_wav(read_all(path)); }

std::vector<unsigned char> encode_wav(const AudioBuffer& audio) {
  if (audio.channels < 1 || audio.sample_rate < 1) {
    throw Error(ErrorKind::kInvalidArgument, "audio buffer has no channels or sample rate");
  }
  const auto width = static_cast<std::uint32_t>(bytes_per_sample(audio.format));
  const auto channels = static_cast<std::uint32_t>(audio.channels);
  const auto data_size = static_cast<std::uint32_t>(audio.frames() * channels * width);
  const std::uint16_t tag = audio.format == SampleFormat::kFloat32 ? kFormatFloat : kFormatPcm;

  std::vector<unsigned char> out;
  out.reserve(44 + data_size + 1);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size + (data_size & 1u));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * channels * width);
  put_u16(out, static_cast<std::uint16_t>(channels * width));
  put_u16(out, static_cast<std::uint16_t>(width * 8));
  put_tag(out, "data");
  put_u32(out, data_size);
  const std::size_t n = audio.frames() * channels;
  for (std::size_t i = 0; i < n; ++i) encode_sample(out, audio.samples[i], audio.format);
  if (data_size & 1u) out.push_back(0);
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  const auto bytes = encode_wav(audio);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace rearrange
