#pragma once

#include "edh/transient.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace edh::test {

/// Builds a stream from explicit per-cycle timestamp lists (each sorted here).
inline PhotonStream make_stream(std::vector<std::vector<double>> cycles,
                                std::uint32_t num_bins = 1024)
{
  std::vector<double> flat;
  std::vector<std::size_t> offsets{0};
  for (auto& c : cycles) {
    std::sort(c.begin(), c.end());
    flat.insert(flat.end(), c.begin(), c.end());
    offsets.push_back(flat.size());
  }
  return PhotonStream(std::move(flat), std::move(offsets), num_bins, 0);
}

inline std::filesystem::path temp_dir(const std::string& name)
{
  auto dir = std::filesystem::temp_directory_path() / ("edh_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace edh::test
