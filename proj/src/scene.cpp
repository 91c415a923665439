#include "edh/scene.hpp"

#include "edh/errors.hpp"
#include "edh/tensor_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace edh {
namespace {

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line)
{
  token = trim(token);
  double value = 0.0;
  const auto [ptr, ec] =
    std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw ParseError("not a number: '" + std::string(token) + "'", line);
  return value;
}

DepthMap load_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw FileNotFound(path.string());

  DepthMap map;
  bool have_header = false;
  std::uint32_t declared_w = 0, declared_h = 0;
  std::uint32_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty())
      continue;
    if (text.front() == '#') {
      if (rows > 0 || have_header)
        throw ParseError("header must be the first line", line_no);
      std::istringstream hs{std::string(text.substr(1))};
      if (!(hs >> declared_w >> declared_h) || declared_w == 0 || declared_h == 0)
        throw ParseError("malformed '# width height' header", line_no);
      have_header = true;
      continue;
    }
    std::uint32_t cols = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      map.depths.push_back(parse_double(text.substr(start, comma - start), line_no));
      ++cols;
      if (comma == std::string_view::npos)
        break;
      start = comma + 1;
    }
    if (rows == 0)
      map.width = cols;
    else if (cols != map.width)
      throw ParseError("row has " + std::to_string(cols) + " columns, expected " +
                         std::to_string(map.width),
                       line_no);
    ++rows;
  }
  map.height = rows;
  if (rows == 0)
    throw ParseError("no depth rows in " + path.string(), line_no);
  if (have_header && (declared_w != map.width || declared_h != map.height))
    throw ParseError("header declares " + std::to_string(declared_w) + "x" +
                       std::to_string(declared_h) + " but data is " +
                       std::to_string(map.width) + "x" + std::to_string(map.height),
                     1);
  return map;
}

void save_csv(const DepthMap& map, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out << "# " << map.width << ' ' << map.height << '\n';
  char buf[64];
  for (std::uint32_t r = 0; r < map.height; ++r) {
    for (std::uint32_t c = 0; c < map.width; ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, map.at(c, r));
      if (c > 0)
        out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out)
    throw IoError("write failed: " + path.string());
}

}  // namespace

DepthFormat parse_depth_format(std::string_view name)
{
  if (name == "csv")
    return DepthFormat::csv;
  if (name == "raw_f32" || name == "raw")
    return DepthFormat::raw_f32;
  throw InvalidParams("unknown depth format '" + std::string(name) + "'");
}

void DepthMap::validate(double z_max, bool allow_zero) const
{
  if (static_cast<std::size_t>(width) * height != depths.size())
    throw ShapeMismatch("depth map is " + std::to_string(width) + "x" +
                        std::to_string(height) + " but holds " +
                        std::to_string(depths.size()) + " values");
  for (double d : depths) {
    const bool low_ok = allow_zero ? d >= 0.0 : d > 0.0;
    if (!std::isfinite(d) || !low_ok || d > z_max)
      throw DepthOutOfRange(d, z_max);
  }
}

void PixelConfig::validate() const
{
  if (!(phi_sig_total >= 0.0) || !(phi_bkg_total >= 0.0))
    throw InvalidParams("photon levels must be non-negative");
  if (phi_sig_total == 0.0 && phi_bkg_total == 0.0)
    throw InvalidParams("signal and background photon levels are both zero");
}

PixelConfig Scene::pixel(std::size_t index) const
{
  PixelConfig p = pixel_configs.size() == 1 ? pixel_configs.front()
                                            : pixel_configs.at(index);
  p.z = depth_map.depths.at(index);
  return p;
}

Scene Scene::with_photon_levels(double phi_sig_total, double phi_bkg_total) const
{
  Scene s;
  s.depth_map = depth_map;
  s.pixel_configs = {PixelConfig{0.0, phi_sig_total, phi_bkg_total}};
  return s;
}

void Scene::validate(double z_max) const
{
  depth_map.validate(z_max);
  if (pixel_configs.size() != 1 && pixel_configs.size() != depth_map.size())
    throw ShapeMismatch("pixel config grid does not match the depth map");
  for (const auto& p : pixel_configs)
    p.validate();
}

DepthMap load_depth_map(const std::filesystem::path& path, DepthFormat format,
                        double z_max, bool allow_zero)
{
  DepthMap map;
  if (format == DepthFormat::csv) {
    map = load_csv(path);
  } else {
    const ChannelTensor t = read_tensor(path, kDepthMagic);
    if (t.channels != 1)
      throw ParseError("depth container must have one channel", 12);
    map.width = t.width;
    map.height = t.height;
    map.depths.assign(t.data.begin(), t.data.end());
  }
  map.validate(z_max, allow_zero);
  return map;
}

void save_depth_map(const DepthMap& map, const std::filesystem::path& path,
                    DepthFormat format)
{
  if (format == DepthFormat::csv) {
    save_csv(map, path);
    return;
  }
  std::vector<float> values(map.depths.begin(), map.depths.end());
  write_tensor(path, kDepthMagic, map.width, map.height, 1, values);
}

Scene synth_scene(const SceneParams& params, double z_max)
{
  Scene scene;
  DepthMap& map = scene.depth_map;
  switch (params.kind) {
    case SceneKind::constant:
      if (params.width == 0 || params.height == 0)
        throw InvalidParams("constant scene needs a non-empty grid");
      map.width = params.width;
      map.height = params.height;
      map.depths.assign(static_cast<std::size_t>(map.width) * map.height, params.z);
      break;
    case SceneKind::staircase: {
      if (params.n_steps < 1 || params.cols_per_step < 1 || params.height == 0)
        throw InvalidParams("staircase needs n_steps >= 1, cols_per_step >= 1, height >= 1");
      if (params.n_steps > 1 && !(params.z_min < params.z_far))
        throw InvalidParams("staircase needs z_min < z_far");
      map.width = params.n_steps * params.cols_per_step;
      map.height = params.height;
      map.depths.resize(static_cast<std::size_t>(map.width) * map.height);
      const double step = params.n_steps > 1
                            ? (params.z_far - params.z_min) / (params.n_steps - 1)
                            : 0.0;
      for (std::uint32_t r = 0; r < map.height; ++r)
        for (std::uint32_t c = 0; c < map.width; ++c) {
          const std::uint32_t s = c / params.cols_per_step;
          // Pin the last step to z_far exactly instead of accumulating.
          const double z = s + 1 == params.n_steps && params.n_steps > 1
                             ? params.z_far
                             : params.z_min + step * s;
          map.depths[static_cast<std::size_t>(r) * map.width + c] = z;
        }
      break;
    }
    case SceneKind::two_plane:
      if (params.width < 2 || params.height == 0)
        throw InvalidParams("two_plane scene needs width >= 2");
      map.width = params.width;
      map.height = params.height;
      map.depths.resize(static_cast<std::size_t>(map.width) * map.height);
      for (std::uint32_t r = 0; r < map.height; ++r)
        for (std::uint32_t c = 0; c < map.width; ++c)
          map.depths[static_cast<std::size_t>(r) * map.width + c] =
            c < map.width / 2 ? params.z1 : params.z2;
      break;
  }
  scene.pixel_configs = {PixelConfig{0.0, params.phi_sig_total, params.phi_bkg_total}};
  try {
    scene.validate(z_max);
  } catch (const DepthOutOfRange& e) {
    throw InvalidParams(std::string("scene depth outside range: ") + e.what());
  }
  return scene;
}

}  // namespace edh
