#include "rird/wavio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace rird {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr double kPcm16Scale = 32768.0;
constexpr double kPcm24Scale = 8388608.0;

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

std::string to_string(WavFormat f) {
  switch (f) {
    case WavFormat::pcm16: return "pcm16";
    case WavFormat::pcm24: return "pcm24";
    case WavFormat::float32: return "float32";
  }
  return "unknown";
}

WavFile read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw WavError("cannot open WAV file: " + path.string());
  }
  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) {
    throw WavError(path.string() + ": not a RIFF file");
  }
  read_le<std::uint32_t>(in);  // riff size, unused
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) {
    throw WavError(path.string() + ": not a WAVE file");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  std::vector<char> data;
  bool have_data = false;
  while (in.read(tag, 4)) {
    const std::uint32_t size = read_le<std::uint32_t>(in);
    if (!in) break;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      fmt.format = read_le<std::uint16_t>(in);
      fmt.channels = read_le<std::uint16_t>(in);
      fmt.sample_rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      fmt.bits = read_le<std::uint16_t>(in);
      if (size > 16) in.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      if (!in) throw WavError(path.string() + ": truncated data chunk");
      have_data = true;
      if (size & 1) in.seekg(1, std::ios::cur);
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || !have_data) {
    throw WavError(path.string() + ": missing fmt or data chunk");
  }
  if (fmt.channels != 1) {
    throw WavError(path.string() + ": " + std::to_string(fmt.channels) +
                   " channels; mono required");
  }

  WavFile file;
  file.signal.sample_rate = fmt.sample_rate;
  if (fmt.format == 1 && fmt.bits == 16) {
    file.format = WavFormat::pcm16;
    const std::size_t n = data.size() / 2;
    file.signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v;
      std::memcpy(&v, data.data() + 2 * i, 2);
      file.signal.samples[i] = static_cast<double>(v) / kPcm16Scale;
    }
  } else if (fmt.format == 1 && fmt.bits == 24) {
    file.format = WavFormat::pcm24;
    const std::size_t n = data.size() / 3;
    file.signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* p =
          reinterpret_cast<const unsigned char*>(data.data()) + 3 * i;
      std::int32_t v = (p[0] << 8) | (p[1] << 16) |
                       (static_cast<std::int32_t>(p[2]) << 24);
      v >>= 8;  // sign-extend
      file.signal.samples[i] = static_cast<double>(v) / kPcm24Scale;
    }
  } else if (fmt.format == 3 && fmt.bits == 32) {
    file.format = WavFormat::float32;
    const std::size_t n = data.size() / 4;
    file.signal.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data.data() + 4 * i, 4);
      file.signal.samples[i] = v;
    }
  } else {
    throw WavError(path.string() + ": unsupported format (tag " +
                   std::to_string(fmt.format) + ", " +
                   std::to_string(fmt.bits) +
                   " bits); PCM 16/24-bit or float 32-bit required");
  }
  if (file.signal.samples.empty()) {
    throw WavError(path.string() + ": empty data chunk");
  }
  return file;
}

void write_wav(const std::filesystem::path& path, const Signal& signal,
               WavFormat format) {
  validate(signal);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw WavError("cannot create WAV file: " + path.string());
  }
  const std::uint16_t bits = format == WavFormat::pcm16   ? 16
                             : format == WavFormat::pcm24 ? 24
                                                          : 32;
  const std::uint16_t bytes = bits / 8;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(signal.size() * bytes);
  const std::uint32_t rate = static_cast<std::uint32_t>(
      std::llround(signal.sample_rate));

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, format == WavFormat::float32 ? 3 : 1);
  write_le<std::uint16_t>(out, 1);
  write_le<std::uint32_t>(out, rate);
  write_le<std::uint32_t>(out, rate * bytes);
  write_le<std::uint16_t>(out, bytes);
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  for (double sample : signal.samples) {
    if (format == WavFormat::pcm16) {
      const double scaled = std::clamp(sample * kPcm16Scale, -32768.0, 32767.0);
      write_le<std::int16_t>(out,
                             static_cast<std::int16_t>(std::lrint(scaled)));
    } else if (format == WavFormat::pcm24) {
      const double scaled =
          std::clamp(sample * kPcm24Scale, -8388608.0, 8388607.0);
      const std::int32_t v = static_cast<std::int32_t>(std::lrint(scaled));
      const unsigned char triple[3] = {
          static_cast<unsigned char>(v & 0xff),
          static_cast<unsigned char>((v >> 8) & 0xff),
          static_cast<unsigned char>((v >> 16) & 0xff)};
      out.write(reinterpret_cast<const char*>(triple), 3);
    } else {
      write_le<float>(out, static_cast<float>(sample));
    }
  }
  if (!out) {
    throw WavError("short write to " + path.string());
  }
}

}  // namespace rird
