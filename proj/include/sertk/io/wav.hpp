#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/binary.hpp"

namespace sertk {

// Mono PCM audio. Samples are normalized amplitudes in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }

  void validate() const {
    require(sample_rate > 0, "sample rate must be positive");
    for (double s : samples) {
      require(std::isfinite(s) && s >= -1.0 && s <= 1.0,
              "audio sample outside [-1, 1] or non-finite");
    }
  }
};

struct WavReadOptions {
  // Average all channels into one instead of rejecting multi-channel input.
  bool downmix = false;
};

namespace detail {

inline constexpr std::uint16_t kWavFormatPcm = 1;
inline constexpr std::uint16_t kWavFormatExtensible = 0xFFFE;

}  // namespace detail

// Decodes a RIFF/WAVE byte image. Only 16-bit signed PCM is accepted.
inline AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes,
                              const WavReadOptions& opts = {}) {
  ByteReader in(bytes, "wav");
  require(in.remaining() >= 12, "wav: file too short for RIFF header");
  require(in.take_tag() == "RIFF", "wav: missing RIFF tag");
  in.u32();  // riff size; chunk walk below is bounded by the real byte count
  require(in.take_tag() == "WAVE", "wav: missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_len = 0;

  while (in.remaining() >= 8) {
    const std::string tag = in.take_tag();
    const std::uint32_t len = in.u32();
    // Streaming writers leave 0 or 0xFFFFFFFF as the data length; those are
    // clamped to the bytes present, any other overrun is truncation.
    const bool placeholder = tag == "data" && (len == 0 || len == 0xFFFFFFFFu);
    require(in.remaining() >= len || placeholder, "wav: truncated chunk '" + tag + "'");
    if (tag == "fmt ") {
      require(len >= 16, "wav: fmt chunk too short");
      const std::size_t start = in.offset();
      std::uint16_t format = in.u16();
      channels = in.u16();
      rate = in.u32();
      in.u32();  // byte rate
      in.u16();  // block align
      bits = in.u16();
      if (format == detail::kWavFormatExtensible && len >= 40) {
        in.u16();  // cb size
        in.u16();  // valid bits
        in.u32();  // channel mask
        format = in.u16();  // first two bytes of the subformat GUID
      }
      require(format == detail::kWavFormatPcm,
              "wav: unsupported encoding (format tag " + std::to_string(format) +
                  "), only PCM is supported");
      in.seek(start + len);
      have_fmt = true;
    } else if (tag == "data") {
      data_len = placeholder ? in.remaining() : len;
      data = bytes.data() + in.offset();
      in.seek(in.offset() + data_len);
    } else {
      in.seek(in.offset() + len);
    }
    if (len % 2 == 1 && in.remaining() > 0) in.seek(in.offset() + 1);
  }

  require(have_fmt, "wav: missing fmt chunk");
  require(data != nullptr, "wav: missing data chunk");
  require(bits == 16, "wav: unsupported bit depth " + std::to_string(bits) + ", expected 16");
  require(channels >= 1, "wav: zero channels");
  require(rate > 0, "wav: zero sample rate");
  require(channels == 1 || opts.downmix,
          "wav: " + std::to_string(channels) + " channels; pass --downmix to average them");

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t n = data_len / frame_bytes;
  AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + i * frame_bytes + 2 * c;
      const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
      acc += static_cast<double>(v) / 32768.0;
    }
    out.samples[i] = acc / channels;
  }
  return out;
}

inline AudioBuffer read_wav(const std::filesystem::path& path, const WavReadOptions& opts = {}) {
  return decode_wav(read_file_bytes(path), opts);
}

// Encodes as 16-bit PCM mono. Values are scaled by 32768, rounded, and
// clipped to the int16 range.
inline std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio) {
  require(audio.sample_rate > 0, "wav: sample rate must be positive");
  const std::uint32_t data_len = static_cast<std::uint32_t>(audio.samples.size() * 2);
  ByteWriter out;
  out.tag("RIFF");
  out.u32(36 + data_len);
  out.tag("WAVE");
  out.tag("fmt ");
  out.u32(16);
  out.u16(detail::kWavFormatPcm);
  out.u16(1);
  out.u32(static_cast<std::uint32_t>(audio.sample_rate));
  out.u32(static_cast<std::uint32_t>(audio.sample_rate) * 2);
  out.u16(2);
  out.u16(16);
  out.tag("data");
  out.u32(data_len);
  for (double s : audio.samples) {
    const double scaled = std::round(s * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    out.u16(static_cast<std::uint16_t>(v));
  }
  return std::move(out).bytes();
}

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  write_file_atomic(path, encode_wav(audio));
}

}  // namespace sertk
