#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace edh {

enum class DepthFormat { csv, raw_f32 };

DepthFormat parse_depth_format(std::string_view name);

/// Row-major grid of scene distances in meters.
struct DepthMap
{
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> depths;

  std::size_t size() const { return depths.size(); }
  double at(std::uint32_t col, std::uint32_t row) const
  {
    return depths[static_cast<std::size_t>(row) * width + col];
  }

  /// Checks the shape and 0 < d <= z_max (0 <= d when allow_zero is set,
  /// which is what estimated maps need).
  void validate(double z_max, bool allow_zero = false) const;

  friend bool operator==(const DepthMap&, const DepthMap&) = default;
};

/// Photon levels of one pixel, as per-cycle totals.
struct PixelConfig
{
  double z = 0.0;
  double phi_sig_total = 0.0;
  double phi_bkg_total = 0.0;

  void validate() const;
  friend bool operator==(const PixelConfig&, const PixelConfig&) = default;
};

struct Scene
{
  DepthMap depth_map;
  // Either one entry (uniform photon levels) or one per pixel.
  std::vector<PixelConfig> pixel_configs;

  std::size_t num_pixels() const { return depth_map.size(); }
  /// Configuration of pixel `index` with its z taken from the depth map.
  PixelConfig pixel(std::size_t index) const;
  /// Copy with uniform photon levels replacing whatever was there.
  Scene with_photon_levels(double phi_sig_total, double phi_bkg_total) const;

  void validate(double z_max) const;
};

DepthMap load_depth_map(const std::filesystem::path& path, DepthFormat format,
                        double z_max, bool allow_zero = false);
void save_depth_map(const DepthMap& map, const std::filesystem::path& path,
                    DepthFormat format);

enum class SceneKind { staircase, constant, two_plane };

struct SceneParams
{
  SceneKind kind = SceneKind::constant;
  std::uint32_t width = 1;
  std::uint32_t height = 1;
  double phi_sig_total = 1.0;
  double phi_bkg_total = 1.0;
  // constant
  double z = 7.5;
  // staircase: n_steps columns per row (times cols_per_step)
  std::uint32_t n_steps = 10;
  std::uint32_t cols_per_step = 1;
  double z_min = 1.5;
  double z_far = 13.5;
  // two_plane: left half z1, right half z2
  double z1 = 3.0;
  double z2 = 12.0;
};

/// Deterministic synthetic scene. For a staircase, `width` is ignored and
/// set to n_steps * cols_per_step.
Scene synth_scene(const SceneParams& params, double z_max);

}  // namespace edh
