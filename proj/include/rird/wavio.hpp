#pragma once

#include <filesystem>
#include <stdexcept>

#include "rird/signal.hpp"

namespace rird {

struct WavError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class WavFormat { pcm16, pcm24, float32 };

std::string to_string(WavFormat f);

struct WavFile {
  Signal signal;
  WavFormat format = WavFormat::pcm16;
};

/// Reads a mono RIFF WAV (PCM 16/24-bit or IEEE float 32-bit). Integer
/// samples are scaled to [-1, 1). Throws WavError on anything else,
/// including multi-channel files.
WavFile read_wav(const std::filesystem::path& path);

void write_wav(const std::filesystem::path& path, const Signal& signal,
               WavFormat format);

}  // namespace rird
