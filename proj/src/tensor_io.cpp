#include "edh/tensor_io.hpp"

#include "edh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace edh {
namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p)
{
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_tensor(const std::filesystem::path& path, std::string_view magic,
                  std::uint32_t width, std::uint32_t height,
                  std::uint32_t channels, std::span<const float> data)
{
  if (magic.size() != 4)
    throw InvalidParams("tensor magic must be 4 bytes");
  const std::size_t expected =
    static_cast<std::size_t>(width) * height * channels;
  if (data.size() != expected)
    throw ShapeMismatch("tensor payload has " + std::to_string(data.size()) +
                        " values, header declares " + std::to_string(expected));

  std::vector<unsigned char> bytes;
  bytes.reserve(kTensorHeaderBytes + 4 * data.size());
  bytes.insert(bytes.end(), magic.begin(), magic.end());
  put_u32(bytes, width);
  put_u32(bytes, height);
  put_u32(bytes, channels);
  for (float f : data)
    put_u32(bytes, std::bit_cast<std::uint32_t>(f));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("write failed: " + path.string());
}

ChannelTensor read_tensor(const std::filesystem::path& path,
                          std::string_view expected_magic)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FileNotFound(path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < kTensorHeaderBytes)
    throw ParseError("truncated header in " + path.string(), bytes.size());

  ChannelTensor t;
  std::copy_n(bytes.begin(), 4, reinterpret_cast<unsigned char*>(t.magic.data()));
  if (std::string_view(t.magic.data(), 4) != expected_magic)
    throw ParseError("bad magic in " + path.string() + ", expected " +
                       std::string(expected_magic),
                     0);
  t.width = get_u32(&bytes[4]);
  t.height = get_u32(&bytes[8]);
  t.channels = get_u32(&bytes[12]);

  const std::size_t count =
    static_cast<std::size_t>(t.width) * t.height * t.channels;
  const std::size_t payload = bytes.size() - kTensorHeaderBytes;
  if (payload != 4 * count)
    throw ParseError("payload size mismatch in " + path.string(),
                     kTensorHeaderBytes + std::min(payload, 4 * count));

  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    t.data[i] = std::bit_cast<float>(get_u32(&bytes[kTensorHeaderBytes + 4 * i]));
  return t;
}

}  // namespace edh
