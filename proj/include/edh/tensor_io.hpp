#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace edh {

/// Little-endian float32 container: 4-byte magic, u32 width, u32 height,
/// u32 channels, then width*height*channels floats, pixel-major and
/// channel-minor. Depth maps ("EDHD") use one channel; boundary sets,
/// histograms and density features ("EDHF") use one channel per value.
struct ChannelTensor
{
  std::array<char, 4> magic{};
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 0;
  std::vector<float> data;

  std::span<const float> pixel(std::size_t index) const
  {
    return std::span<const float>(data).subspan(index * channels, channels);
  }
};

inline constexpr std::string_view kDepthMagic = "EDHD";
inline constexpr std::string_view kFeatureMagic = "EDHF";
inline constexpr std::size_t kTensorHeaderBytes = 16;

void write_tensor(const std::filesystem::path& path, std::string_view magic,
                  std::uint32_t width, std::uint32_t height,
                  std::uint32_t channels, std::span<const float> data);

/// Throws FileNotFound, or ParseError with the byte offset of the problem.
ChannelTensor read_tensor(const std::filesystem::path& path,
                          std::string_view expected_magic);

}  // namespace edh
